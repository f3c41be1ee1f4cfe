#include <gtest/gtest.h>

#include "meadsr/protocol/packets.hpp"
#include "meadsr/protocol/route_cache.hpp"
#include "meadsr/protocol/tables.hpp"

using namespace meadsr;
using namespace std::chrono_literals;

namespace {
constexpr NodeId S = 0, A = 1, B = 2, C = 3, D = 4, X = 5;
}

TEST(RouteCache, InsertThenLookup)
{
  RouteCache c;
  c.insert({S, A, D}, SimTime{});
  EXPECT_EQ(c.lookup(D), (Route{S, A, D}));
  EXPECT_FALSE(c.lookup(X));
}

TEST(RouteCache, RejectsLoopedRoute)
{
  RouteCache c;
  EXPECT_THROW(c.insert({S, A, B, A, D}, SimTime{}), std::invalid_argument);
  EXPECT_THROW(c.insert({S}, SimTime{}), std::invalid_argument);
}

TEST(RouteCache, FifoEvictsOldest)
{
  RouteCache c(RouteCache::Mode::fifo, 3);
  c.insert({S, A, B, D}, 1s);
  c.insert({S, B, C, D}, 2s);
  c.insert({S, C, A, D}, 3s);
  c.insert({S, X, A, D}, 4s);
  ASSERT_EQ(c.entries(D)->size(), 3u);
  for (const auto& e : *c.entries(D)) EXPECT_NE(e.route, (Route{S, A, B, D}));
  EXPECT_EQ(c.entries(D)->front().route, (Route{S, B, C, D}));
}

TEST(RouteCache, FifoIgnoresDuplicateRoute)
{
  RouteCache c;
  EXPECT_TRUE(c.insert({S, A, D}, 1s));
  EXPECT_FALSE(c.insert({S, A, D}, 2s));
  EXPECT_EQ(c.size(), 1u);
}

TEST(RouteCache, FifoLookupPrefersShortestThenNewest)
{
  RouteCache c;
  c.insert({S, A, B, D}, 1s);
  c.insert({S, C, D}, 2s);
  c.insert({S, X, D}, 3s);
  EXPECT_EQ(c.lookup(D), (Route{S, X, D}));
}

TEST(RouteCache, FifoLookupUsesPrefixOfLongerRoute)
{
  RouteCache c;
  c.insert({S, A, B, D}, 1s);
  EXPECT_EQ(c.lookup(B), (Route{S, A, B}));
}

TEST(RouteCache, PrimaryAlternateKeepsBothPrefersPrimary)
{
  RouteCache c(RouteCache::Mode::primary_alternate);
  c.insert({S, A, D}, 1s, ReplyRole::primary);
  c.insert({S, B, C, D}, 2s, ReplyRole::alternate);
  EXPECT_EQ(c.lookup(D), (Route{S, A, D}));
  EXPECT_TRUE(c.has_role(D, ReplyRole::primary));
  EXPECT_TRUE(c.has_role(D, ReplyRole::alternate));
  EXPECT_EQ(c.size(), 2u);

  // A new primary replaces the old one; there are never more than two.
  c.insert({S, X, D}, 3s, ReplyRole::primary);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.lookup(D), (Route{S, X, D}));

  // Alternate arriving first is used until the primary shows up.
  RouteCache d(RouteCache::Mode::primary_alternate);
  d.insert({S, B, C, D}, 1s, ReplyRole::alternate);
  EXPECT_EQ(d.lookup(D), (Route{S, B, C, D}));
  d.insert({S, A, D}, 2s, ReplyRole::primary);
  EXPECT_EQ(d.lookup(D), (Route{S, A, D}));
}

TEST(RouteCache, PrimaryBreakFallsBackToAlternate)
{
  RouteCache c(RouteCache::Mode::primary_alternate);
  c.insert({S, A, D}, 1s, ReplyRole::primary);
  c.insert({S, B, D}, 1s, ReplyRole::alternate);
  c.invalidate_link(A, D);
  EXPECT_EQ(c.lookup(D), (Route{S, B, D}));
  c.invalidate_link(S, B);
  EXPECT_FALSE(c.lookup(D));
}

TEST(RouteCache, InvalidateRemovesOnlyRoutesUsingLink)
{
  RouteCache c;
  c.insert({S, A, B, D}, 1s);
  c.insert({S, C, D}, 2s);
  EXPECT_EQ(c.invalidate_link(A, B), 1u);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.lookup(D), (Route{S, C, D}));
}

TEST(RouteCache, InvalidateUnknownLinkIsNoOp)
{
  RouteCache c;
  c.insert({S, A, B, D}, 1s);
  c.insert({S, C, D}, 2s);
  EXPECT_EQ(c.invalidate_link(X, A), 0u);
  EXPECT_EQ(c.size(), 2u);
}

TEST(RouteCache, InvalidationIsDirected)
{
  RouteCache c;
  c.insert({S, B, A, D}, 1s);
  EXPECT_EQ(c.invalidate_link(A, B), 0u);
  EXPECT_EQ(c.lookup(D), (Route{S, B, A, D}));
}

TEST(RreqTable, FirstDuplicateExhausted)
{
  RreqTable t;
  Rreq r;
  r.src = S;
  r.seq = 1;
  auto first = t.record(r, A, 2);
  EXPECT_EQ(first.status, RreqStatus::first);

  auto dup = t.record(r, B, 5);
  EXPECT_EQ(dup.status, RreqStatus::duplicate);
  EXPECT_EQ(dup.entry.nb_hops, 2u);
  EXPECT_EQ(dup.entry.last_node, A);

  t.mark_duplicate_forwarded(S, 1);
  EXPECT_EQ(t.record(r, C, 1).status, RreqStatus::exhausted);
  EXPECT_EQ(t.size(), 1u);

  r.seq = 2;
  EXPECT_EQ(t.record(r, C, 1).status, RreqStatus::first);
  EXPECT_EQ(t.size(), 2u);
}

TEST(RreqTable, MarkingUnknownEntryIsABug)
{
  RreqTable t;
  EXPECT_THROW(t.mark_duplicate_forwarded(S, 9), LogicError);
}

TEST(RreqTable, OneEntryPerRequest)
{
  RreqTable t;
  Rreq r;
  for (std::uint32_t i = 0; i < 200; ++i) {
    r.src = i % 5;
    r.seq = i % 7;
    t.record(r, i % 3, i % 4 + 1);
  }
  EXPECT_EQ(t.size(), 35u);
}

TEST(RoutesTable, RoundLifecycle)
{
  RoutesTable t;
  EXPECT_EQ(t.round(S, 1), RoutesTable::Round::none);
  EXPECT_TRUE(t.add(RouteCandidate{S, 1, {S, A, D}, Energy{5}, 1ms}));
  EXPECT_FALSE(t.add(RouteCandidate{S, 1, {S, B, D}, Energy{6}, 2ms}));
  EXPECT_EQ(t.round(S, 1), RoutesTable::Round::collecting);
  EXPECT_EQ(t.candidates(S, 1).size(), 2u);
  auto got = t.close(S, 1);
  EXPECT_EQ(got.size(), 2u);
  EXPECT_EQ(t.round(S, 1), RoutesTable::Round::closed);
  EXPECT_TRUE(t.candidates(S, 1).empty());
  EXPECT_THROW(t.add(RouteCandidate{S, 1, {S, C, D}, Energy{1}, 3ms}), LogicError);
}

TEST(RoutesTable, IdenticalRoutesKeptDistinct)
{
  RoutesTable t;
  t.add(RouteCandidate{S, 1, {S, A, D}, Energy{5}, 1ms});
  t.add(RouteCandidate{S, 1, {S, A, D}, Energy{4}, 2ms});
  EXPECT_EQ(t.candidates(S, 1).size(), 2u);
}

TEST(SendBuffer, TakeExpireCapacity)
{
  SendBuffer b(30s, 2);
  DataPacket p;
  p.dst = D;
  EXPECT_TRUE(b.push(1, p, 0s));
  p.dst = X;
  EXPECT_TRUE(b.push(2, p, 5s));
  EXPECT_FALSE(b.push(3, p, 6s));
  EXPECT_EQ(b.next_expiry(), 30s);
  EXPECT_TRUE(b.expire(29s).empty());
  auto gone = b.expire(30s);
  ASSERT_EQ(gone.size(), 1u);
  EXPECT_EQ(gone[0].uid, 1u);
  EXPECT_TRUE(b.has(X));
  EXPECT_EQ(b.take(X).size(), 1u);
  EXPECT_TRUE(b.empty());
}

TEST(PacketSizes, NominalLayouts)
{
  PacketSizes z;
  Rreq r;
  r.route_record = {A, B};
  EXPECT_EQ(z.size_of(Packet{1, r}), 16u + 8u);
  r.min_bat_lev = Energy{1};
  EXPECT_EQ(z.size_of(Packet{1, r}), 16u + 8u + 8u);
  Rrep rep;
  rep.route = {S, A, D};
  EXPECT_EQ(z.size_of(Packet{1, rep}), 16u + 12u);
  EXPECT_EQ(z.size_of(Packet{1, Rerr{}}), 20u);
  DataPacket d;
  d.source_route = {S, A, B, D};
  d.payload_size = 512;
  EXPECT_EQ(z.size_of(Packet{1, d}), 24u + 16u + 512u);
}

TEST(PacketKind, Classification)
{
  EXPECT_TRUE((Packet{1, Rreq{}}).is_control());
  EXPECT_TRUE((Packet{1, Rrep{}}).is_control());
  EXPECT_TRUE((Packet{1, Rerr{}}).is_control());
  EXPECT_FALSE((Packet{1, DataPacket{}}).is_control());
  EXPECT_STREQ(to_string(PacketKind::rreq), "RREQ");
  EXPECT_EQ(parse_protocol("mea-dsr"), Protocol::mea_dsr);
  EXPECT_FALSE(parse_protocol("aodv"));
}

TEST(Routes, LoopFreedomAndLinks)
{
  EXPECT_TRUE(is_loop_free(Route{S, A, B, D}));
  EXPECT_FALSE(is_loop_free(Route{S, A, S}));
  EXPECT_TRUE(uses_link(Route{S, A, B}, A, B));
  EXPECT_FALSE(uses_link(Route{S, A, B}, B, A));
  EXPECT_EQ(format_route(Route{S, A, D}), "0,1,4");
}

#include <gtest/gtest.h>

#include "meadsr/protocol/dsr.hpp"
#include "support/fake_services.hpp"

using namespace meadsr;
using namespace tsupport;
using namespace std::chrono_literals;

namespace {

constexpr NodeId S = 0, A = 1, B = 2, C = 3, D = 4, X = 5;

struct DsrNode {
  explicit DsrNode(NodeId id, DsrConfig cfg = {}) : agent(id, fx, DiscoveryConfig{}, cfg) {}
  FakeServices fx;
  DsrAgent agent;
};

DataPacket payload_for(NodeId dst)
{
  DataPacket d;
  d.dst = dst;
  return d;
}

}  // namespace

TEST(DsrOriginate, CacheHitSendsDataWithoutRequest)
{
  DsrNode n(S);
  n.agent.cache().insert({S, A, D}, 0s);
  n.agent.originate(1, payload_for(D));
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 0u);
  auto data = n.fx.of(PacketKind::data);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0]->to, A);
  EXPECT_EQ(data[0]->packet.as<DataPacket>().source_route, (Route{S, A, D}));
  EXPECT_EQ(data[0]->packet.as<DataPacket>().cursor, 1u);
}

TEST(DsrOriginate, CacheMissBuffersAndFloodsOnce)
{
  DsrNode n(S);
  n.agent.originate(1, payload_for(D));
  n.agent.originate(2, payload_for(D));
  auto rreqs = n.fx.of(PacketKind::rreq);
  ASSERT_EQ(rreqs.size(), 1u);
  EXPECT_EQ(rreqs[0]->to, kBroadcast);
  const auto& r = rreqs[0]->packet.as<Rreq>();
  EXPECT_EQ(r.src, S);
  EXPECT_EQ(r.dst, D);
  EXPECT_EQ(r.seq, 1u);
  EXPECT_TRUE(r.route_record.empty());
  EXPECT_FALSE(r.min_bat_lev);
  EXPECT_EQ(n.agent.send_buffer().size(), 2u);
  EXPECT_TRUE(n.agent.discovery_pending(D));
}

TEST(DsrOriginate, UnansweredRequestIsRetriedWithBackoff)
{
  DsrNode n(S);
  n.agent.originate(1, payload_for(D));
  n.fx.advance(499ms);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 1u);
  n.fx.advance(1ms);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 2u);
  n.fx.advance(999ms);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 2u);
  n.fx.advance(1ms);
  ASSERT_EQ(n.fx.count(PacketKind::rreq), 3u);
  EXPECT_EQ(n.fx.of(PacketKind::rreq)[2]->packet.as<Rreq>().seq, 3u);
}

TEST(DsrOriginate, ReplyFlushesBuffer)
{
  DsrNode n(S);
  n.agent.originate(1, payload_for(D));
  n.agent.originate(2, payload_for(D));
  n.agent.receive(rrep_packet({S, A, D}, ReplyRole::primary, 1, 2), A);
  auto data = n.fx.of(PacketKind::data);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0]->packet.uid, 1u);
  EXPECT_EQ(data[1]->packet.uid, 2u);
  EXPECT_TRUE(n.agent.send_buffer().empty());
  EXPECT_FALSE(n.agent.discovery_pending(D));
  n.fx.advance(5s);  // the discovery timer was cancelled
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 1u);
}

TEST(DsrOriginate, BufferedDataExpires)
{
  DsrNode n(S);
  n.agent.originate(1, payload_for(D));
  n.fx.advance(31s);
  ASSERT_EQ(n.fx.dropped.size(), 1u);
  EXPECT_EQ(n.fx.dropped[0].cause, DropCause::send_buffer_timeout);
}

TEST(DsrRreq, IntermediateForwardsFirstCopyOnly)
{
  DsrNode n(B);
  n.agent.receive(rreq_packet(S, D, 1, {A}), A);
  auto fwd = n.fx.of(PacketKind::rreq);
  ASSERT_EQ(fwd.size(), 1u);
  EXPECT_EQ(fwd[0]->packet.as<Rreq>().route_record, (std::vector<NodeId>{A, B}));
  ASSERT_TRUE(fwd[0]->note);
  EXPECT_EQ(fwd[0]->note->prev, A);
  EXPECT_EQ(fwd[0]->note->hops, 2u);

  n.fx.clear();
  n.agent.receive(rreq_packet(S, D, 1, {C}), C);
  n.agent.receive(rreq_packet(S, D, 1, {}), S);
  EXPECT_TRUE(n.fx.sent.empty());
}

TEST(DsrRreq, OwnRequestOrLoopIgnored)
{
  DsrNode n(A);
  n.agent.receive(rreq_packet(A, D, 1, {B}), B);
  n.agent.receive(rreq_packet(S, D, 1, {A, B}), B);
  EXPECT_TRUE(n.fx.sent.empty());
}

TEST(DsrRreq, DestinationRepliesWithAccumulatedRoute)
{
  DsrNode n(D);
  n.agent.receive(rreq_packet(S, D, 1, {A, B}), B);
  auto reps = n.fx.of(PacketKind::rrep);
  ASSERT_EQ(reps.size(), 1u);
  const auto& r = reps[0]->packet.as<Rrep>();
  EXPECT_EQ(r.route, (Route{S, A, B, D}));
  EXPECT_EQ(r.path, (Route{D, B, A, S}));
  EXPECT_EQ(reps[0]->to, B);
  EXPECT_FALSE(reps[0]->jittered);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 0u);
  // The reverse route was learned on the way.
  EXPECT_EQ(n.agent.cache().lookup(S), (Route{D, B, A, S}));
}

TEST(DsrRreq, DestinationRepliesOnlyToFirstCopy)
{
  DsrNode n(D);
  n.agent.receive(rreq_packet(S, D, 1, {A}), A);
  n.agent.receive(rreq_packet(S, D, 1, {B}), B);
  EXPECT_EQ(n.fx.count(PacketKind::rrep), 1u);
}

TEST(DsrRreq, IntermediateRepliesFromCache)
{
  DsrNode n(B);
  n.agent.cache().insert({B, X, D}, 0s);
  n.agent.receive(rreq_packet(S, D, 1, {A}), A);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 0u);
  auto reps = n.fx.of(PacketKind::rrep);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0]->packet.as<Rrep>().route, (Route{S, A, B, X, D}));
  EXPECT_EQ(reps[0]->packet.as<Rrep>().path, (Route{B, A, S}));
  EXPECT_EQ(reps[0]->to, A);
  EXPECT_TRUE(reps[0]->jittered);
}

TEST(DsrRreq, CacheReplyJitterCanBeDisabled)
{
  DsrConfig cfg;
  cfg.cache_reply_jitter = false;
  DsrNode n(B, cfg);
  n.agent.cache().insert({B, X, D}, 0s);
  n.agent.receive(rreq_packet(S, D, 1, {A}), A);
  ASSERT_EQ(n.fx.count(PacketKind::rrep), 1u);
  EXPECT_FALSE(n.fx.of(PacketKind::rrep)[0]->jittered);
}

TEST(DsrRreq, LoopingCachedSuffixIsNotOffered)
{
  DsrNode n(B);
  n.agent.cache().insert({B, A, D}, 0s);  // would revisit A
  n.agent.receive(rreq_packet(S, D, 1, {A}), A);
  EXPECT_EQ(n.fx.count(PacketKind::rrep), 0u);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 1u);
}

TEST(DsrRreq, CacheRepliesDisabled)
{
  DsrConfig cfg;
  cfg.reply_from_cache = false;
  DsrNode n(B, cfg);
  n.agent.cache().insert({B, X, D}, 0s);
  n.agent.receive(rreq_packet(S, D, 1, {A}), A);
  EXPECT_EQ(n.fx.count(PacketKind::rrep), 0u);
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 1u);
}

TEST(DsrData, ForwardsAlongSourceRoute)
{
  DsrNode n(A);
  n.agent.receive(data_packet({S, A, B, D}, 1), S);
  auto out = n.fx.of(PacketKind::data);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0]->to, B);
  EXPECT_EQ(out[0]->packet.as<DataPacket>().cursor, 2u);
  EXPECT_EQ(out[0]->packet.uid, 7u);
  // Both directions are learned from the source route.
  EXPECT_EQ(n.agent.cache().lookup(D), (Route{A, B, D}));
  EXPECT_EQ(n.agent.cache().lookup(S), (Route{A, S}));
}

TEST(DsrData, DeliversAtDestination)
{
  DsrNode n(D);
  n.agent.receive(data_packet({S, A, D}, 2), A);
  ASSERT_EQ(n.fx.delivered.size(), 1u);
  EXPECT_EQ(n.fx.delivered[0].uid, 7u);
  EXPECT_TRUE(n.fx.sent.empty());
}

TEST(DsrData, CursorMismatchAbortsRun)
{
  DsrNode n(C);
  EXPECT_THROW(n.agent.receive(data_packet({S, A, B, D}, 1), S), LogicError);
}

TEST(DsrData, LinkBreakSalvagesFromCache)
{
  DsrNode n(A);
  n.agent.cache().insert({A, C, D}, 0s);
  n.agent.cache().insert({A, B, D}, 0s);
  n.agent.link_failure(data_packet({S, A, B, D}, 2), B);

  auto errs = n.fx.of(PacketKind::rerr);
  ASSERT_EQ(errs.size(), 1u);
  const auto& e = errs[0]->packet.as<Rerr>();
  EXPECT_EQ(errs[0]->to, S);
  EXPECT_EQ(e.broken_from, A);
  EXPECT_EQ(e.broken_to, B);
  EXPECT_EQ(e.path, (Route{A, S}));

  auto data = n.fx.of(PacketKind::data);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0]->to, C);
  EXPECT_EQ(data[0]->packet.as<DataPacket>().source_route, (Route{A, C, D}));
  EXPECT_EQ(data[0]->packet.as<DataPacket>().salvage_count, 1u);
  EXPECT_FALSE(n.agent.cache().lookup(B) && uses_link(*n.agent.cache().lookup(B), A, B));
}

TEST(DsrData, LinkBreakWithoutRouteDrops)
{
  DsrNode n(A);
  n.agent.link_failure(data_packet({S, A, B, D}, 2), B);
  EXPECT_EQ(n.fx.count(PacketKind::rerr), 1u);
  ASSERT_EQ(n.fx.dropped.size(), 1u);
  EXPECT_EQ(n.fx.dropped[0].cause, DropCause::link_break_no_route);
}

TEST(DsrData, SalvageLimitDrops)
{
  DsrNode n(A);
  n.agent.cache().insert({A, C, D}, 0s);
  n.agent.link_failure(data_packet({S, A, B, D}, 2, 7, 15), B);
  EXPECT_EQ(n.fx.count(PacketKind::data), 0u);
  ASSERT_EQ(n.fx.dropped.size(), 1u);
  EXPECT_EQ(n.fx.dropped[0].cause, DropCause::salvage_exhausted);
}

TEST(DsrData, FirstHopFailureAtSourceRetriesAnotherRoute)
{
  DsrNode n(S);
  n.agent.cache().insert({S, A, D}, 0s);
  n.agent.cache().insert({S, C, D}, 0s);
  n.agent.link_failure(data_packet({S, A, D}, 1), A);
  EXPECT_EQ(n.fx.count(PacketKind::rerr), 0u);
  auto data = n.fx.of(PacketKind::data);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0]->packet.as<DataPacket>().source_route, (Route{S, C, D}));
}

TEST(DsrRerr, IntermediatePrunesAndForwards)
{
  DsrNode n(A);
  n.agent.cache().insert({A, B, D}, 0s);
  n.agent.cache().insert({A, S}, 0s);
  n.agent.receive(rerr_packet({B, A, S}, B, D, 1), B);
  EXPECT_FALSE(n.agent.cache().lookup(D));
  auto errs = n.fx.of(PacketKind::rerr);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0]->to, S);
  EXPECT_EQ(errs[0]->packet.as<Rerr>().cursor, 2u);
}

TEST(DsrRerr, SourceWithSurvivingRouteDoesNotRediscover)
{
  DsrNode n(S);
  n.agent.cache().insert({S, A, B, D}, 0s);
  n.agent.cache().insert({S, C, D}, 0s);
  n.agent.receive(rerr_packet({A, S}, A, B, 1), A);
  n.agent.originate(1, payload_for(D));
  EXPECT_EQ(n.fx.count(PacketKind::rreq), 0u);
  ASSERT_EQ(n.fx.count(PacketKind::data), 1u);
  EXPECT_EQ(n.fx.of(PacketKind::data)[0]->packet.as<DataPacket>().source_route, (Route{S, C, D}));
}

TEST(DsrRerr, SourceWithEmptyCacheRediscoversWithNextSeq)
{
  DsrNode n(S);
  n.agent.originate(1, payload_for(D));
  n.agent.receive(rrep_packet({S, A, B, D}, ReplyRole::primary, 1, 3), A);
  n.fx.clear();
  n.agent.receive(rerr_packet({A, S}, A, B, 1), A);
  EXPECT_FALSE(n.agent.cache().lookup(D));
  n.agent.originate(2, payload_for(D));
  auto rreqs = n.fx.of(PacketKind::rreq);
  ASSERT_EQ(rreqs.size(), 1u);
  EXPECT_EQ(rreqs[0]->packet.as<Rreq>().seq, 2u);
  EXPECT_EQ(n.agent.send_buffer().size(), 1u);
}

TEST(DsrRrep, IntermediateRelaysTowardSource)
{
  DsrNode n(A);
  n.agent.receive(rrep_packet({S, A, B, D}, ReplyRole::primary, 1, 2), B);
  auto reps = n.fx.of(PacketKind::rrep);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0]->to, S);
  EXPECT_EQ(n.agent.cache().lookup(D), (Route{A, B, D}));
}

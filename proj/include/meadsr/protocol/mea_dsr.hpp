#pragma once

#include "meadsr/protocol/agent.hpp"

namespace meadsr {

struct MeaDsrConfig {
  SimTime wait_time{std::chrono::milliseconds{50}};
  bool alternate_rrep{true};

  void validate() const
  {
    if (wait_time <= SimTime::zero()) throw std::invalid_argument("mea-dsr: wait_time must be positive");
  }
};

// Multipath energy-aware DSR.
//
// Requests carry the running minimum residual energy of their forwarders.
// Intermediates never answer from cache; each forwards the first copy of a
// request and at most one duplicate that arrives over a different link with
// no more hops than the first. The destination collects candidates for
// wait_time after the first copy, then answers with the primary route (best
// min_bat_lev / hops) and the alternate most node-disjoint from it. Sources
// use the primary until it breaks, then the alternate; intermediates do not
// salvage.
class MeaDsrAgent final : public SourceRoutingAgent {
public:
  MeaDsrAgent(NodeId self, NodeServices& services, DiscoveryConfig discovery, MeaDsrConfig config)
      : SourceRoutingAgent(self, services, discovery, RouteCache{RouteCache::Mode::primary_alternate}),
        config_{config}
  {
    config_.validate();
  }

  Protocol protocol() const override { return Protocol::mea_dsr; }
  const MeaDsrConfig& config() const { return config_; }
  const RoutesTable& routes_table() const { return routes_table_; }

  // Selection round at the destination once Wait_time has elapsed.
  void on_wait_expiry(NodeId src, std::uint32_t seq)
  {
    auto candidates = routes_table_.close(src, seq);
    if (candidates.empty()) return;
    const SelectionResult sel = select_routes(candidates);
    services().audit_selection(id(), candidates, sel);
    reply(sel.primary, ReplyRole::primary);
    if (sel.alternate && config_.alternate_rrep) reply(*sel.alternate, ReplyRole::alternate);
  }

protected:
  std::optional<Energy> initial_min_bat_lev() const override { return services().residual(id()); }

  void handle_rreq(const Rreq& rreq, NodeId from, std::uint32_t hop_count) override
  {
    const NodeId self = id();
    if (rreq.src == self || contains_node(rreq.route_record, self)) return;

    if (self == rreq.dst) {
      if (routes_table_.round(rreq.src, rreq.seq) == RoutesTable::Round::closed) return;  // late copy
      RouteCandidate c;
      c.src = rreq.src;
      c.seq = rreq.seq;
      c.route.reserve(rreq.route_record.size() + 2);
      c.route.push_back(rreq.src);
      c.route.insert(c.route.end(), rreq.route_record.begin(), rreq.route_record.end());
      c.route.push_back(self);
      c.min_bat_lev = rreq.min_bat_lev.value_or(Energy{});
      c.arrival_time = now();
      const NodeId src = rreq.src;
      const std::uint32_t seq = rreq.seq;
      if (routes_table_.add(std::move(c))) {
        services().set_timer(self, config_.wait_time, [this, src, seq] { on_wait_expiry(src, seq); });
      }
      return;
    }

    const auto rec = rreq_table().record(rreq, from, hop_count);
    bool duplicate = false;
    switch (rec.status) {
      case RreqStatus::first: break;
      case RreqStatus::duplicate:
        if (from == rec.entry.last_node || hop_count > rec.entry.nb_hops) return;
        rreq_table().mark_duplicate_forwarded(rreq.src, rreq.seq);
        duplicate = true;
        break;
      case RreqStatus::exhausted: return;
    }

    Rreq fwd = rreq;
    const Energy mine = services().residual(self);
    if (from == rreq.src || !fwd.min_bat_lev) fwd.min_bat_lev = mine;
    else if (mine < *fwd.min_bat_lev) fwd.min_bat_lev = mine;
    fwd.route_record.push_back(self);
    services().broadcast(self, Packet{services().new_uid(), std::move(fwd)},
                         RreqForwardNote{from, hop_count, mine, duplicate});
  }

  void install_reply(const Rrep& rrep) override
  {
    if (!is_loop_free(rrep.route) || rrep.route.front() != id()) return;
    auto& seq = reply_seq_[rrep.dst];
    if (rrep.seq < seq) return;  // superseded discovery
    if (rrep.seq > seq) {
      cache().clear(rrep.dst);
      seq = rrep.seq;
    }
    cache().insert(rrep.route, now(), rrep.role);
    route_acquired(rrep.dst);
  }

  void data_link_failure(std::uint64_t uid, DataPacket pkt) override
  {
    services().drop_data(id(), uid, pkt, DropCause::link_break_no_salvage);
  }

private:
  void reply(const RouteCandidate& c, ReplyRole role)
  {
    Rrep rep;
    rep.src = c.src;
    rep.dst = id();
    rep.seq = c.seq;
    rep.route = c.route;
    rep.role = role;
    rep.path.assign(c.route.rbegin(), c.route.rend());
    rep.cursor = 1;
    const NodeId next = rep.path[1];
    services().unicast(id(), Packet{services().new_uid(), std::move(rep)}, next);
  }

  MeaDsrConfig config_;
  RoutesTable routes_table_;
  std::map<NodeId, std::uint32_t> reply_seq_;
};

}  // namespace meadsr

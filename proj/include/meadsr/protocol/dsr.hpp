#pragma once

#include "meadsr/protocol/agent.hpp"

namespace meadsr {

struct DsrConfig {
  std::uint32_t max_salvage_count{15};
  bool reply_from_cache{true};
  bool cache_reply_jitter{true};  // random delay before a cache reply (reply storm prevention)
  std::size_t max_routes_per_destination{3};
};

// Baseline DSR: every node drops duplicate requests, intermediates answer from
// their path caches, every node caches what it forwards, and data packets are
// salvaged from the local cache when a link breaks.
class DsrAgent final : public SourceRoutingAgent {
public:
  DsrAgent(NodeId self, NodeServices& services, DiscoveryConfig discovery, DsrConfig config)
      : SourceRoutingAgent(self, services, discovery,
                           RouteCache{RouteCache::Mode::fifo, config.max_routes_per_destination}),
        config_{config}
  {}

  Protocol protocol() const override { return Protocol::dsr; }
  const DsrConfig& config() const { return config_; }

protected:
  void handle_rreq(const Rreq& rreq, NodeId from, std::uint32_t hop_count) override
  {
    const NodeId self = id();
    if (rreq.src == self || contains_node(rreq.route_record, self)) return;
    if (rreq_table().record(rreq, from, hop_count).status != RreqStatus::first) return;

    // Reverse of the accumulated path leads back to the requester.
    Route back{self};
    back.insert(back.end(), rreq.route_record.rbegin(), rreq.route_record.rend());
    back.push_back(rreq.src);
    cache_insert(back);

    Route prefix{rreq.src};
    prefix.insert(prefix.end(), rreq.route_record.begin(), rreq.route_record.end());

    if (self == rreq.dst) {
      prefix.push_back(self);
      reply(rreq, prefix, prefix.size() - 1);
      return;
    }
    if (config_.reply_from_cache) {
      if (auto suffix = cache().lookup(rreq.dst)) {
        Route full = prefix;
        full.insert(full.end(), suffix->begin(), suffix->end());
        // A looping concatenation is never offered; the request goes on instead.
        if (is_loop_free(full)) {
          reply(rreq, full, prefix.size());
          return;
        }
      }
    }
    Rreq fwd = rreq;
    fwd.route_record.push_back(self);
    services().broadcast(self, Packet{services().new_uid(), std::move(fwd)},
                         RreqForwardNote{from, hop_count, services().residual(self), false});
  }

  void install_reply(const Rrep& rrep) override
  {
    if (!is_loop_free(rrep.route) || rrep.route.front() != id()) return;
    cache_insert(rrep.route);
    route_acquired(rrep.dst);
  }

  void learn_route(const Route& route, std::size_t my_index) override
  {
    if (my_index + 1 < route.size()) cache_insert(Route(route.begin() + static_cast<std::ptrdiff_t>(my_index), route.end()));
    if (my_index > 0) {
      Route back(route.rbegin() + static_cast<std::ptrdiff_t>(route.size() - 1 - my_index), route.rend());
      cache_insert(back);
    }
  }

  void data_link_failure(std::uint64_t uid, DataPacket pkt) override
  {
    if (pkt.salvage_count >= config_.max_salvage_count) {
      services().drop_data(id(), uid, pkt, DropCause::salvage_exhausted);
      return;
    }
    auto route = cache().lookup(pkt.dst);
    if (!route) {
      services().drop_data(id(), uid, pkt, DropCause::link_break_no_route);
      return;
    }
    ++pkt.salvage_count;
    send_data(uid, std::move(pkt), *route);
  }

private:
  void cache_insert(const Route& r)
  {
    if (r.size() >= 2 && is_loop_free(r)) cache().insert(r, now());
  }

  // Sends a reply carrying `route`, produced by the node at route[replier].
  void reply(const Rreq& rreq, const Route& route, std::size_t replier)
  {
    Rrep rep;
    rep.src = rreq.src;
    rep.dst = rreq.dst;
    rep.seq = rreq.seq;
    rep.route = route;
    rep.role = ReplyRole::primary;
    rep.path.assign(route.rbegin() + static_cast<std::ptrdiff_t>(route.size() - 1 - replier), route.rend());
    rep.cursor = 1;
    const NodeId next = rep.path[1];
    Packet p{services().new_uid(), std::move(rep)};
    if (replier + 1 < route.size() && config_.cache_reply_jitter) services().unicast_jittered(id(), std::move(p), next);
    else services().unicast(id(), std::move(p), next);
  }

  DsrConfig config_;
};

}  // namespace meadsr

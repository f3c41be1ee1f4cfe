#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "meadsr/core/scheduler.hpp"
#include "meadsr/protocol/packets.hpp"
#include "meadsr/protocol/route_cache.hpp"
#include "meadsr/protocol/selection.hpp"
#include "meadsr/protocol/tables.hpp"
#include "meadsr/world/link_layer.hpp"

namespace meadsr {

// Extra detail recorded in the trace when a RREQ is rebroadcast.
struct RreqForwardNote {
  NodeId prev{kBroadcast};    // neighbour the forwarded copy came from
  std::uint32_t hops{0};      // hop count of that copy
  Energy residual;            // forwarder's residual at the decision
  bool duplicate{false};
};

// Services a routing agent uses from its node and the world around it.
class NodeServices {
public:
  virtual ~NodeServices() = default;
  virtual SimTime now() const = 0;
  virtual std::uint64_t new_uid() = 0;
  virtual Energy residual(NodeId n) const = 0;
  virtual bool alive(NodeId n) const = 0;
  virtual void broadcast(NodeId self, Packet p, std::optional<RreqForwardNote> note) = 0;
  virtual void unicast(NodeId self, Packet p, NodeId next_hop) = 0;
  // Unicast after the same random delay broadcasts get.
  virtual void unicast_jittered(NodeId self, Packet p, NodeId next_hop) = 0;
  virtual EventHandle set_timer(NodeId self, SimTime delay, std::function<void()> fn) = 0;
  virtual void cancel_timer(EventHandle h) = 0;
  virtual void deliver(NodeId self, std::uint64_t uid, const DataPacket& p) = 0;
  virtual void drop_data(NodeId self, std::uint64_t uid, const DataPacket& p, DropCause cause) = 0;
  virtual void audit_selection(NodeId self, const std::vector<RouteCandidate>& candidates,
                               const SelectionResult& result) = 0;
};

struct DiscoveryConfig {
  SimTime send_buffer_timeout{std::chrono::seconds{30}};
  std::size_t send_buffer_capacity{64};
  SimTime backoff_initial{std::chrono::milliseconds{500}};
  SimTime backoff_max{std::chrono::seconds{10}};
};

// Behaviour common to DSR and MEA-DSR: send buffering, rate-limited route
// discovery, source-routed forwarding of data, RREP and RERR relaying, and
// route error handling at the source.
class SourceRoutingAgent {
public:
  SourceRoutingAgent(NodeId self, NodeServices& services, DiscoveryConfig discovery, RouteCache cache)
      : self_{self},
        services_{services},
        discovery_cfg_{discovery},
        cache_{std::move(cache)},
        send_buffer_{discovery.send_buffer_timeout, discovery.send_buffer_capacity}
  {}
  virtual ~SourceRoutingAgent() = default;
  SourceRoutingAgent(const SourceRoutingAgent&) = delete;
  SourceRoutingAgent& operator=(const SourceRoutingAgent&) = delete;

  virtual Protocol protocol() const = 0;

  NodeId id() const { return self_; }
  const RouteCache& cache() const { return cache_; }
  RouteCache& cache() { return cache_; }
  const RreqTable& rreq_table() const { return rreq_table_; }
  const SendBuffer& send_buffer() const { return send_buffer_; }
  std::uint32_t last_rreq_seq() const { return rreq_seq_; }
  bool discovery_pending(NodeId dst) const
  {
    auto it = discoveries_.find(dst);
    return it != discoveries_.end() && it->second.pending;
  }

  // Data handed down by the traffic layer at its source.
  void originate(std::uint64_t uid, DataPacket pkt)
  {
    pkt.src = self_;
    if (auto route = route_to(pkt.dst)) {
      send_data(uid, std::move(pkt), *route);
      return;
    }
    const NodeId dst = pkt.dst;
    buffer(uid, std::move(pkt));
    if (!discovery_pending(dst)) start_discovery(dst);
  }

  void receive(const Packet& p, NodeId from)
  {
    switch (p.kind()) {
      case PacketKind::rreq: {
        const auto& rreq = p.as<Rreq>();
        handle_rreq(rreq, from, rreq.hop_count());
        break;
      }
      case PacketKind::rrep: handle_rrep(p.as<Rrep>()); break;
      case PacketKind::rerr: handle_rerr(p.as<Rerr>()); break;
      case PacketKind::data: handle_data(p.uid, p.as<DataPacket>()); break;
    }
  }

  // The MAC gave up on a unicast frame to next_hop.
  void link_failure(const Packet& p, NodeId next_hop)
  {
    cache_.invalidate_link(self_, next_hop);
    if (p.kind() != PacketKind::data) return;  // lost replies and errors are not repaired
    DataPacket pkt = p.as<DataPacket>();
    const std::size_t my_index = pkt.cursor - 1;
    if (pkt.source_route.at(my_index) != self_) throw LogicError("link failure reported by a node off the route");
    if (my_index == 0 && pkt.src == self_) {
      // Our own packet: pick another route or wait for a new one.
      pkt.cursor = 0;
      pkt.source_route.clear();
      originate(p.uid, std::move(pkt));
      return;
    }
    if (my_index > 0) send_rerr(pkt.source_route, my_index, next_hop);
    data_link_failure(p.uid, std::move(pkt));
  }

  // Errors reported upstream along `route` by the node at `reporter_index`.
  void send_rerr(const Route& route, std::size_t reporter_index, NodeId broken_to)
  {
    Rerr e;
    e.reporter = self_;
    e.broken_from = self_;
    e.broken_to = broken_to;
    e.session_src = route.front();
    e.path.assign(route.rbegin() + static_cast<std::ptrdiff_t>(route.size() - 1 - reporter_index), route.rend());
    e.cursor = 1;
    const NodeId next = e.path[1];
    services_.unicast(self_, Packet{services_.new_uid(), std::move(e)}, next);
  }

protected:
  virtual void handle_rreq(const Rreq& rreq, NodeId from, std::uint32_t hop_count) = 0;
  virtual void install_reply(const Rrep& rrep) = 0;
  virtual void data_link_failure(std::uint64_t uid, DataPacket pkt) = 0;
  // Called on every node a source-routed packet passes through.
  virtual void learn_route(const Route& route, std::size_t my_index) { (void)route; (void)my_index; }
  virtual std::optional<Energy> initial_min_bat_lev() const { return std::nullopt; }

  virtual std::optional<Route> route_to(NodeId dst) const { return cache_.lookup(dst); }

  NodeServices& services() { return services_; }
  const NodeServices& services() const { return services_; }
  RreqTable& rreq_table() { return rreq_table_; }
  SimTime now() const { return services_.now(); }

  void send_data(std::uint64_t uid, DataPacket pkt, const Route& route)
  {
    if (route.size() < 2 || route.front() != self_) throw LogicError("send_data: route does not start here");
    pkt.source_route = route;
    pkt.cursor = 1;
    const NodeId next = route[1];
    services_.unicast(self_, Packet{uid, std::move(pkt)}, next);
  }

  void start_discovery(NodeId dst)
  {
    auto& d = discoveries_[dst];
    if (d.backoff == SimTime::zero()) d.backoff = discovery_cfg_.backoff_initial;
    d.pending = true;
    Rreq rreq;
    rreq.src = self_;
    rreq.dst = dst;
    rreq.seq = ++rreq_seq_;
    rreq.min_bat_lev = initial_min_bat_lev();
    services_.broadcast(self_, Packet{services_.new_uid(), std::move(rreq)},
                        RreqForwardNote{kBroadcast, 0, services_.residual(self_), false});
    d.timer = services_.set_timer(self_, d.backoff, [this, dst] { discovery_timeout(dst); });
  }

  // A usable route to dst was learned at this source.
  void route_acquired(NodeId dst)
  {
    if (auto it = discoveries_.find(dst); it != discoveries_.end()) {
      services_.cancel_timer(it->second.timer);
      discoveries_.erase(it);
    }
    flush(dst);
  }

  void flush(NodeId dst)
  {
    auto route = route_to(dst);
    if (!route) return;
    for (auto& item : send_buffer_.take(dst)) send_data(item.uid, std::move(item.packet), *route);
  }

  void handle_rrep(Rrep rrep)
  {
    if (rrep.path.at(rrep.cursor) != self_) throw LogicError("RREP delivered to a node off its path");
    if (rrep.cursor + 1 == rrep.path.size()) {
      if (self_ != rrep.src) throw LogicError("RREP path does not end at its source");
      install_reply(rrep);
      return;
    }
    const auto idx = static_cast<std::size_t>(
        std::find(rrep.route.begin(), rrep.route.end(), self_) - rrep.route.begin());
    if (idx < rrep.route.size()) learn_route(rrep.route, idx);
    ++rrep.cursor;
    const NodeId next = rrep.path[rrep.cursor];
    services_.unicast(self_, Packet{services_.new_uid(), std::move(rrep)}, next);
  }

  void handle_rerr(Rerr rerr)
  {
    if (rerr.path.at(rerr.cursor) != self_) throw LogicError("RERR delivered to a node off its path");
    cache_.invalidate_link(rerr.broken_from, rerr.broken_to);
    if (rerr.cursor + 1 == rerr.path.size()) {
      // Session source: rediscover only for traffic that is still waiting.
      for (NodeId dst : waiting_destinations()) {
        if (route_to(dst)) flush(dst);
        else if (!discovery_pending(dst)) start_discovery(dst);
      }
      return;
    }
    ++rerr.cursor;
    const NodeId next = rerr.path[rerr.cursor];
    services_.unicast(self_, Packet{services_.new_uid(), std::move(rerr)}, next);
  }

  void handle_data(std::uint64_t uid, DataPacket pkt)
  {
    if (pkt.cursor >= pkt.source_route.size() || pkt.source_route[pkt.cursor] != self_) {
      throw LogicError("data packet cursor does not point at the receiving node");
    }
    learn_route(pkt.source_route, pkt.cursor);
    if (pkt.cursor + 1 == pkt.source_route.size()) {
      services_.deliver(self_, uid, pkt);
      return;
    }
    ++pkt.cursor;
    const NodeId next = pkt.source_route[pkt.cursor];
    services_.unicast(self_, Packet{uid, std::move(pkt)}, next);
  }

private:
  struct Discovery {
    bool pending{false};
    SimTime backoff{0};
    EventHandle timer;
  };

  void buffer(std::uint64_t uid, DataPacket pkt)
  {
    if (!send_buffer_.push(uid, pkt, now())) {
      services_.drop_data(self_, uid, pkt, DropCause::send_buffer_full);
      return;
    }
    arm_expiry();
  }

  void arm_expiry()
  {
    auto next = send_buffer_.next_expiry();
    if (!next || expiry_armed_) return;
    expiry_armed_ = true;
    services_.set_timer(self_, *next - now(), [this] {
      expiry_armed_ = false;
      for (auto& item : send_buffer_.expire(now())) {
        services_.drop_data(self_, item.uid, item.packet, DropCause::send_buffer_timeout);
      }
      arm_expiry();
    });
  }

  std::vector<NodeId> waiting_destinations() const
  {
    std::vector<NodeId> out;
    for (const auto& item : send_buffer_.items()) {
      if (std::find(out.begin(), out.end(), item.packet.dst) == out.end()) out.push_back(item.packet.dst);
    }
    return out;
  }

  void discovery_timeout(NodeId dst)
  {
    auto it = discoveries_.find(dst);
    if (it == discoveries_.end()) return;
    if (route_to(dst)) {
      route_acquired(dst);
      return;
    }
    if (!send_buffer_.has(dst)) {
      it->second.pending = false;
      return;
    }
    it->second.backoff = std::min(it->second.backoff * 2, discovery_cfg_.backoff_max);
    start_discovery(dst);
  }

  NodeId self_;
  NodeServices& services_;
  DiscoveryConfig discovery_cfg_;
  RouteCache cache_;
  RreqTable rreq_table_;
  SendBuffer send_buffer_;
  std::map<NodeId, Discovery> discoveries_;
  std::uint32_t rreq_seq_{0};
  bool expiry_armed_{false};
};

}  // namespace meadsr

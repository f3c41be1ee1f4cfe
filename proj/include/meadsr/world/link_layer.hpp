#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meadsr/core/random.hpp"
#include "meadsr/core/scheduler.hpp"
#include "meadsr/energy/energy.hpp"
#include "meadsr/protocol/packets.hpp"
#include "meadsr/world/mobility.hpp"

namespace meadsr {

enum class InterferenceMode : std::uint8_t { none, overlap };

struct LinkLayerConfig {
  std::int64_t bandwidth{2'000'000};  // bits per second
  std::size_t queue_capacity{50};
  std::uint32_t mac_retries{4};       // attempts per unicast frame
  SimTime broadcast_jitter_max{std::chrono::milliseconds{10}};
  InterferenceMode interference{InterferenceMode::overlap};
  double loss_probability{0.0};

  void validate() const
  {
    if (bandwidth <= 0) throw std::invalid_argument("link: bandwidth must be positive");
    if (queue_capacity < 1) throw std::invalid_argument("link: queue_capacity must be at least 1");
    if (mac_retries < 1) throw std::invalid_argument("link: mac_retries must be at least 1");
    if (broadcast_jitter_max < SimTime::zero()) throw std::invalid_argument("link: negative jitter");
    if (!(loss_probability >= 0.0 && loss_probability <= 1.0)) {
      throw std::invalid_argument("link: loss_probability must lie in [0,1]");
    }
  }
};

// Time on air, rounded up to the nanosecond.
inline SimTime airtime(std::uint32_t size_bytes, std::int64_t bandwidth_bps)
{
  if (size_bytes == 0) throw std::invalid_argument("airtime: empty frame");
  if (bandwidth_bps <= 0) throw std::invalid_argument("airtime: bandwidth must be positive");
  const std::int64_t bit_ns = std::int64_t{size_bytes} * 8 * 1'000'000'000;
  return SimTime{(bit_ns + bandwidth_bps - 1) / bandwidth_bps};
}

enum class DropCause : std::uint8_t {
  ifq_full,
  retry_exhausted,
  node_dead,
  send_buffer_full,
  send_buffer_timeout,
  salvage_exhausted,
  link_break_no_route,
  link_break_no_salvage,
  run_end,
};

inline const char* to_string(DropCause c)
{
  switch (c) {
    case DropCause::ifq_full: return "ifq-full";
    case DropCause::retry_exhausted: return "retry";
    case DropCause::node_dead: return "node-dead";
    case DropCause::send_buffer_full: return "sbuf-full";
    case DropCause::send_buffer_timeout: return "sbuf-timeout";
    case DropCause::salvage_exhausted: return "salvage-exhausted";
    case DropCause::link_break_no_route: return "link-break-no-route";
    case DropCause::link_break_no_salvage: return "link-break-no-salvage";
    case DropCause::run_end: return "run-end";
  }
  return "?";
}

// What the link layer needs from the rest of the world.
class LinkLayerHost {
public:
  virtual ~LinkLayerHost() = default;
  virtual std::size_t node_count() const = 0;
  virtual Vec2 position(NodeId n, SimTime t) const = 0;
  virtual bool alive(NodeId n) const = 0;
  // Draws radio energy; returns false when the battery ran out before the
  // full amount could be drawn.
  virtual bool charge(NodeId n, ChargeMode mode, SimTime airtime, std::uint64_t uid) = 0;
  virtual void on_transmit(NodeId n, const Packet& p, NodeId to, std::uint32_t size, std::uint32_t attempt) = 0;
  virtual void on_receive(NodeId n, const Packet& p, NodeId from, std::uint32_t size) = 0;
  virtual void on_drop(NodeId n, const Packet& p, DropCause cause) = 0;
  virtual void on_link_failure(NodeId n, const Packet& p, NodeId next_hop) = 0;
};

// Simplified half-duplex MAC over a unit-disk channel.
//
// Each node serves a drop-tail FIFO one frame at a time with no carrier
// sensing. A frame reaches every live node in range when it starts; with
// overlap interference any two receptions that overlap in time at the same
// node destroy each other, and a node that starts transmitting loses what it
// was receiving. Unicast frames are retried back to back up to mac_retries
// attempts before the routing layer is told the link failed.
class LinkLayer {
public:
  LinkLayer(LinkLayerConfig config, const Arena& arena, const EnergyModel& energy, Scheduler& scheduler,
            LinkLayerHost& host, RandomStream loss_rng, PacketSizes sizes = {})
      : config_{config},
        arena_{arena},
        energy_{energy},
        scheduler_{scheduler},
        host_{host},
        loss_rng_{std::move(loss_rng)},
        sizes_{sizes},
        ifaces_(host.node_count())
  {
    config_.validate();
  }

  const LinkLayerConfig& config() const { return config_; }
  const PacketSizes& sizes() const { return sizes_; }

  std::size_t queue_length(NodeId n) const { return ifaces_.at(n).queue.size(); }
  bool transmitting(NodeId n) const { return ifaces_.at(n).current.has_value(); }

  std::vector<NodeId> neighbors_in_range(NodeId n, SimTime t) const
  {
    std::vector<NodeId> out;
    if (!host_.alive(n)) return out;
    const Vec2 here = host_.position(n, t);
    for (NodeId m = 0; m < ifaces_.size(); ++m) {
      if (m != n && host_.alive(m) && arena_.in_range(here, host_.position(m, t))) out.push_back(m);
    }
    return out;
  }

  // Hands a frame to node n's interface queue. next_hop == kBroadcast sends
  // to every neighbour.
  void enqueue(NodeId n, Packet p, NodeId next_hop)
  {
    auto& iface = ifaces_.at(n);
    if (!host_.alive(n)) {
      host_.on_drop(n, p, DropCause::node_dead);
      return;
    }
    if (iface.queue.size() >= config_.queue_capacity) {
      host_.on_drop(n, p, DropCause::ifq_full);
      return;
    }
    const std::uint32_t size = sizes_.size_of(p);
    iface.queue.push_back(Frame{std::move(p), next_hop, size, airtime(size, config_.bandwidth), 0});
    if (!iface.current) start_next(n);
  }

  // Discards everything queued at a node that has died.
  void node_died(NodeId n)
  {
    auto& iface = ifaces_.at(n);
    while (!iface.queue.empty()) {
      Frame f = std::move(iface.queue.front());
      iface.queue.pop_front();
      host_.on_drop(n, f.packet, DropCause::node_dead);
    }
    for (auto& rx : iface.receptions) rx.corrupted = true;
  }

  // Frames still held by the link layer, for end-of-run accounting.
  template <class Fn> void for_each_pending(Fn&& fn) const
  {
    for (NodeId n = 0; n < ifaces_.size(); ++n) {
      const auto& iface = ifaces_[n];
      if (iface.current) fn(n, iface.current->frame.packet);
      for (const auto& f : iface.queue) fn(n, f.packet);
    }
  }

private:
  struct Frame {
    Packet packet;
    NodeId next_hop;
    std::uint32_t size;
    SimTime airtime;
    std::uint32_t attempt;
  };
  struct Transmission {
    Frame frame;
    std::uint64_t id{0};
    std::vector<NodeId> listeners;
  };
  struct Reception {
    std::uint64_t tx_id;
    SimTime end;
    bool intended;
    bool corrupted;
  };
  struct Interface {
    std::deque<Frame> queue;
    std::optional<Transmission> current;
    std::vector<Reception> receptions;
  };

  void start_next(NodeId n)
  {
    auto& iface = ifaces_[n];
    if (iface.queue.empty() || !host_.alive(n)) return;
    Frame f = std::move(iface.queue.front());
    iface.queue.pop_front();
    iface.current = Transmission{std::move(f), 0, {}};
    attempt(n);
  }

  void attempt(NodeId n)
  {
    auto& iface = ifaces_[n];
    Transmission& tx = *iface.current;
    Frame& f = tx.frame;
    ++f.attempt;
    tx.id = ++next_tx_id_;
    tx.listeners.clear();
    const SimTime now = scheduler_.now();
    const SimTime end = now + f.airtime;
    const bool broadcast = f.next_hop == kBroadcast;

    host_.on_transmit(n, f.packet, f.next_hop, f.size, f.attempt);
    // Half duplex: whatever this node was hearing is lost.
    for (auto& rx : iface.receptions) rx.corrupted = true;

    if (!host_.charge(n, ChargeMode::tx, f.airtime, f.packet.uid)) {
      // Battery ran out mid-frame: the frame never completes.
      Frame lost = std::move(f);
      iface.current.reset();
      host_.on_drop(n, lost.packet, DropCause::node_dead);
      return;
    }

    const Vec2 here = host_.position(n, now);
    for (NodeId r = 0; r < ifaces_.size(); ++r) {
      if (r == n || !host_.alive(r)) continue;
      if (!arena_.in_range(here, host_.position(r, now))) continue;
      auto& rif = ifaces_[r];
      const bool intended = broadcast || r == f.next_hop;
      if (rif.current) continue;  // transmitting, deaf
      Reception rx{tx.id, end, intended, false};
      if (config_.interference == InterferenceMode::overlap) {
        for (auto& other : rif.receptions) {
          if (other.end > now) {
            other.corrupted = true;
            rx.corrupted = true;
          }
        }
      }
      if (intended || energy_.overhear_charging) {
        if (!host_.charge(r, ChargeMode::rx, f.airtime, f.packet.uid)) rx.corrupted = true;
      }
      if (intended && config_.loss_probability > 0.0 && loss_rng_.bernoulli(config_.loss_probability)) {
        rx.corrupted = true;
      }
      rif.receptions.push_back(rx);
      tx.listeners.push_back(r);
    }
    const std::uint64_t id = tx.id;
    scheduler_.schedule_at(end, EventKind::packet_delivery, [this, n, id] { finish(n, id); });
  }

  void finish(NodeId n, std::uint64_t tx_id)
  {
    auto& iface = ifaces_[n];
    if (!iface.current || iface.current->id != tx_id) return;
    Transmission tx = std::move(*iface.current);
    iface.current.reset();

    std::vector<NodeId> delivered;
    for (NodeId r : tx.listeners) {
      auto& list = ifaces_[r].receptions;
      auto it = std::find_if(list.begin(), list.end(), [&](const Reception& x) { return x.tx_id == tx_id; });
      if (it == list.end()) continue;
      const bool ok = it->intended && !it->corrupted && host_.alive(r);
      list.erase(it);
      if (ok) delivered.push_back(r);
    }

    const bool broadcast = tx.frame.next_hop == kBroadcast;
    if (!broadcast && delivered.empty() && host_.alive(n) && tx.frame.attempt < config_.mac_retries) {
      iface.current = std::move(tx);
      attempt(n);
      return;
    }

    for (NodeId r : delivered) host_.on_receive(r, tx.frame.packet, n, tx.frame.size);
    if (!broadcast && delivered.empty()) {
      host_.on_drop(n, tx.frame.packet, DropCause::retry_exhausted);
      host_.on_link_failure(n, tx.frame.packet, tx.frame.next_hop);
    }
    if (!iface.current) start_next(n);
  }

  LinkLayerConfig config_;
  const Arena& arena_;
  const EnergyModel& energy_;
  Scheduler& scheduler_;
  LinkLayerHost& host_;
  RandomStream loss_rng_;
  PacketSizes sizes_;
  std::vector<Interface> ifaces_;
  std::uint64_t next_tx_id_{0};
};

}  // namespace meadsr

#pragma once

#include <algorithm>
#include <memory>
#include <unordered_map>
#include <vector>

#include "meadsr/core/scheduler.hpp"
#include "meadsr/metrics/metrics.hpp"
#include "meadsr/metrics/trace.hpp"
#include "meadsr/scenario/scenario.hpp"

namespace meadsr {

struct RunResult {
  MetricsReport metrics;
  std::vector<Energy> initial;
  std::vector<Energy> consumed;
  std::vector<Session> sessions;
  RunSummary events;
};

// One (scenario, seed) run: the world, both protocol stacks' shared plumbing
// and the bookkeeping behind the metrics. Not reusable; construct one per run.
class Simulation final : private LinkLayerHost, private NodeServices {
public:
  Simulation(const Scenario& scenario, std::uint64_t seed, TraceWriter* trace = nullptr)
      : scenario_{validated(scenario)},
        seed_{seed},
        trace_{trace ? trace : &null_trace_},
        ledger_{scenario.node_count, scenario.initial_energy, scenario.energy},
        link_{scenario.link, scenario_.arena, ledger_.model(), scheduler_, *this, RandomStream{seed, "loss"},
              scenario.sizes},
        jitter_rng_{seed, "jitter"}
  {
    RandomStream placement{seed, "placement"};
    nodes_.resize(scenario_.node_count);
    NodeServices& services = *this;
    for (NodeId n = 0; n < nodes_.size(); ++n) {
      auto& node = nodes_[n];
      node.mobility_rng = std::make_unique<RandomStream>(seed, "mobility/" + std::to_string(n));
      node.mobility = MobilityState::at_rest(scenario_.arena.uniform_point(placement), scenario_.pause_time,
                                             scenario_.speeds);
      if (scenario_.protocol == Protocol::dsr) {
        node.agent = std::make_unique<DsrAgent>(n, services, scenario_.discovery, scenario_.dsr);
      } else {
        node.agent = std::make_unique<MeaDsrAgent>(n, services, scenario_.discovery, scenario_.mea);
      }
    }
    RandomStream traffic{seed, "traffic"};
    if (scenario_.traffic.count > 0) sessions_ = generate_sessions(scenario_.traffic, scenario_.node_count, traffic);
  }

  const Scenario& scenario() const { return scenario_; }
  const EnergyLedger& ledger() const { return ledger_; }
  const std::vector<Session>& sessions() const { return sessions_; }
  const RunCounters& counters() const { return counters_; }
  Scheduler& scheduler() { return scheduler_; }
  SourceRoutingAgent& agent(NodeId n) { return *nodes_.at(n).agent; }
  Vec2 position_of(NodeId n, SimTime t) const { return position(n, t); }
  const LinkLayer& link() const { return link_; }

  RunResult run()
  {
    write_header();
    for (NodeId n = 0; n < nodes_.size(); ++n) schedule_mobility(n, nodes_[n].mobility.pause_until());
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
      sources_.emplace_back(sessions_[i]);
      schedule_emission(i);
    }
    RunResult result;
    result.events = scheduler_.run_until(scenario_.run_length);
    finish();
    result.initial.reserve(nodes_.size());
    result.consumed.reserve(nodes_.size());
    for (NodeId n = 0; n < nodes_.size(); ++n) {
      result.initial.push_back(ledger_.initial(n));
      result.consumed.push_back(ledger_.consumed(n));
    }
    result.metrics = compute_metrics(counters_, result.initial, result.consumed);
    result.sessions = sessions_;
    write_footer(result.events);
    return result;
  }

private:
  static const Scenario& validated(const Scenario& s)
  {
    s.validate();
    return s;
  }

  struct Node {
    MobilityState mobility;
    std::unique_ptr<RandomStream> mobility_rng;
    std::unique_ptr<SourceRoutingAgent> agent;
    bool dead{false};
  };

  // --- world ---------------------------------------------------------------

  void schedule_mobility(NodeId n, SimTime when)
  {
    if (when > scenario_.run_length) return;
    scheduler_.schedule_at(when, EventKind::mobility_waypoint, [this, n] {
      auto& node = nodes_[n];
      auto step = rwp_step(node.mobility, scheduler_.now(), scenario_.arena, *node.mobility_rng);
      node.mobility = step.state;
      schedule_mobility(n, step.next_change);
    });
  }

  void schedule_emission(std::size_t i)
  {
    const SimTime when = sources_[i].next_time();
    if (when >= scenario_.run_length) return;
    scheduler_.schedule_at(when, EventKind::traffic_generation, [this, i] {
      auto emission = sources_[i].emit(scheduler_.now());
      const std::uint64_t uid = new_uid();
      const DataPacket& p = emission.packet;
      ++counters_.data_generated;
      trace_->event(now(), "gen")
          .kv("uid", uid)
          .pair("flow", p.src, p.flow_seq)
          .kv("node", p.src)
          .kv("dst", p.dst)
          .kv("size", p.payload_size);
      live_data_.emplace(uid, p.src);
      if (nodes_[p.src].dead) {
        drop_data(p.src, uid, p, DropCause::node_dead);
      } else {
        nodes_[p.src].agent->originate(uid, std::move(emission.packet));
      }
      schedule_emission(i);
    });
  }

  void finish()
  {
    link_.for_each_pending([this](NodeId n, const Packet& p) {
      if (p.is_control()) {
        trace_->event(scenario_.run_length, "drop").kv("uid", p.uid).kv("kind", to_string(p.kind())).kv("node", n).kv(
            "cause", "run-end");
      }
    });
    std::vector<std::pair<std::uint64_t, NodeId>> left(live_data_.begin(), live_data_.end());
    std::sort(left.begin(), left.end());
    for (auto [uid, src] : left) {
      trace_->event(scenario_.run_length, "drop").kv("uid", uid).kv("kind", "DATA").kv("node", src).kv("cause",
                                                                                                     "run-end");
    }
    live_data_.clear();
  }

  void write_header()
  {
    trace_->header()
        .kv("trace", "meadsr-v1")
        .kv("protocol", to_string(scenario_.protocol))
        .kv("seed", seed_)
        .kv("config", config_hash(scenario_))
        .kv("nodes", static_cast<std::uint64_t>(nodes_.size()))
        .kv("run_length_ns", scenario_.run_length.count());
    for (NodeId n = 0; n < nodes_.size(); ++n) {
      trace_->header().kv("node", n).kv("initial_pj", ledger_.initial(n).picojoules());
    }
    for (const auto& s : sessions_) {
      trace_->header()
          .kv("session", s.src)
          .kv("dst", s.dst)
          .kv("rate", s.rate)
          .kv("payload", s.payload)
          .kv("start_ns", s.start_time.count());
    }
  }

  void write_footer(const RunSummary& events)
  {
    for (NodeId n = 0; n < nodes_.size(); ++n) {
      trace_->header()
          .kv("energy", n)
          .kv("initial_pj", ledger_.initial(n).picojoules())
          .kv("consumed_pj", ledger_.consumed(n).picojoules())
          .kv("residual_pj", ledger_.residual(n).picojoules());
    }
    trace_->header().kv("end", scenario_.run_length.count()).kv("dispatched", events.dispatched).kv("cancelled",
                                                                                                   events.cancelled);
  }

  void trace_rreq_fields(TraceWriter::Line& line, const Packet& p)
  {
    if (p.kind() != PacketKind::rreq) return;
    const auto& q = p.as<Rreq>();
    line.pair("rreq", q.src, q.seq).kv("dst", q.dst);
  }

  // --- LinkLayerHost ------------------------------------------------------

  std::size_t node_count() const override { return scenario_.node_count; }

  Vec2 position(NodeId n, SimTime t) const override { return position_at(nodes_[n].mobility, t); }

  bool alive(NodeId n) const override { return !nodes_[n].dead; }

  bool charge(NodeId n, ChargeMode mode, SimTime air, std::uint64_t uid) override
  {
    const Energy want = mode == ChargeMode::tx ? ledger_.model().tx_cost(air) : ledger_.model().rx_cost(air);
    const Energy drawn = ledger_.charge(n, want);
    trace_->event(now(), "charge")
        .kv("node", n)
        .kv("mode", mode == ChargeMode::tx ? "tx" : "rx")
        .kv("pj", drawn.picojoules())
        .kv("uid", uid);
    if (!ledger_.alive(n) && !nodes_[n].dead) {
      nodes_[n].dead = true;
      link_.node_died(n);
    }
    return drawn == want;
  }

  void on_transmit(NodeId n, const Packet& p, NodeId to, std::uint32_t size, std::uint32_t attempt) override
  {
    if (attempt == 1 && p.is_control()) ++counters_.control_tx;
    auto line = trace_->event(now(), "tx");
    line.kv("uid", p.uid).kv("kind", to_string(p.kind())).kv("node", n).node("to", to).kv("size", size).kv(
        "attempt", attempt);
    trace_rreq_fields(line, p);
  }

  void on_receive(NodeId n, const Packet& p, NodeId from, std::uint32_t size) override
  {
    {
      auto line = trace_->event(now(), "rx");
      line.kv("uid", p.uid).kv("kind", to_string(p.kind())).kv("node", n).kv("from", from).kv("size", size);
      if (p.kind() == PacketKind::rreq) {
        trace_rreq_fields(line, p);
        line.kv("hops", p.as<Rreq>().hop_count());
      }
    }
    nodes_[n].agent->receive(p, from);
  }

  void on_drop(NodeId n, const Packet& p, DropCause cause) override
  {
    if (p.kind() == PacketKind::data) {
      // Retry exhaustion hands the packet back to routing (see on_link_failure).
      if (cause == DropCause::retry_exhausted) {
        trace_->event(now(), "lfail").kv("uid", p.uid).kv("kind", "DATA").kv("node", n);
        return;
      }
      drop_data(n, p.uid, p.as<DataPacket>(), cause);
      return;
    }
    trace_->event(now(), "drop").kv("uid", p.uid).kv("kind", to_string(p.kind())).kv("node", n).kv("cause",
                                                                                                 to_string(cause));
  }

  void on_link_failure(NodeId n, const Packet& p, NodeId next_hop) override
  {
    if (nodes_[n].dead) {
      if (p.kind() == PacketKind::data) drop_data(n, p.uid, p.as<DataPacket>(), DropCause::node_dead);
      return;
    }
    nodes_[n].agent->link_failure(p, next_hop);
  }

  // --- NodeServices -------------------------------------------------------

  SimTime now() const override { return scheduler_.now(); }
  std::uint64_t new_uid() override { return ++next_uid_; }
  Energy residual(NodeId n) const override { return ledger_.residual(n); }

  void broadcast(NodeId self, Packet p, std::optional<RreqForwardNote> note) override
  {
    scheduler_.schedule_in(draw_jitter(), EventKind::timer_expiry, [this, self, p = std::move(p), note]() mutable {
      trace_enqueue(self, p, kBroadcast, note);
      link_.enqueue(self, std::move(p), kBroadcast);
    });
  }

  SimTime draw_jitter()
  {
    const auto max_ns = static_cast<std::uint64_t>(scenario_.link.broadcast_jitter_max.count());
    return SimTime{static_cast<std::int64_t>(max_ns ? jitter_rng_.below(max_ns + 1) : 0)};
  }

  void unicast_jittered(NodeId self, Packet p, NodeId next_hop) override
  {
    scheduler_.schedule_in(draw_jitter(), EventKind::timer_expiry, [this, self, next_hop, p = std::move(p)]() mutable {
      unicast(self, std::move(p), next_hop);
    });
  }

  void unicast(NodeId self, Packet p, NodeId next_hop) override
  {
    trace_enqueue(self, p, next_hop, std::nullopt);
    link_.enqueue(self, std::move(p), next_hop);
  }

  void trace_enqueue(NodeId self, const Packet& p, NodeId to, const std::optional<RreqForwardNote>& note)
  {
    if (!trace_->enabled()) return;
    auto line = trace_->event(now(), "enq");
    line.kv("uid", p.uid)
        .kv("kind", to_string(p.kind()))
        .kv("node", self)
        .node("to", to)
        .kv("size", link_.sizes().size_of(p));
    trace_rreq_fields(line, p);
    if (note) {
      line.node("prev", note->prev)
          .kv("hops", note->hops)
          .kv("res", note->residual.picojoules())
          .kv("dup", note->duplicate ? 1 : 0)
          .route("rec", p.as<Rreq>().route_record);
      if (const auto& mbl = p.as<Rreq>().min_bat_lev) line.kv("mbl", mbl->picojoules());
    }
    if (p.kind() == PacketKind::data) {
      const auto& d = p.as<DataPacket>();
      line.pair("flow", d.src, d.flow_seq).kv("salvage", d.salvage_count).route("route", d.source_route);
    }
  }

  EventHandle set_timer(NodeId, SimTime delay, std::function<void()> fn) override
  {
    return scheduler_.schedule_in(delay, EventKind::timer_expiry, std::move(fn));
  }

  void cancel_timer(EventHandle h) override { scheduler_.cancel(h); }

  void deliver(NodeId self, std::uint64_t uid, const DataPacket& p) override
  {
    ++counters_.data_received;
    live_data_.erase(uid);
    trace_->event(now(), "deliver").kv("uid", uid).kv("node", self).pair("flow", p.src, p.flow_seq).kv(
        "hops", static_cast<std::uint64_t>(p.source_route.size() - 1));
  }

  void drop_data(NodeId self, std::uint64_t uid, const DataPacket& p, DropCause cause) override
  {
    live_data_.erase(uid);
    trace_->event(now(), "drop")
        .kv("uid", uid)
        .kv("kind", "DATA")
        .kv("node", self)
        .kv("cause", to_string(cause))
        .pair("flow", p.src, p.flow_seq);
  }

  void audit_selection(NodeId self, const std::vector<RouteCandidate>& candidates,
                       const SelectionResult& result) override
  {
    if (!trace_->enabled()) return;
    std::string cands;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i) cands += ';';
      cands += format_route(candidates[i].route);
      cands += '/';
      cands += std::to_string(candidates[i].min_bat_lev.picojoules());
      cands += '/';
      cands += std::to_string(candidates[i].arrival_time.count());
    }
    auto line = trace_->event(now(), "select");
    line.kv("node", self)
        .pair("rreq", candidates.front().src, candidates.front().seq)
        .kv("primary", static_cast<std::uint64_t>(result.primary_index));
    if (result.alternate_index) line.kv("alternate", static_cast<std::uint64_t>(*result.alternate_index));
    else line.kv("alternate", "-");
    line.kv("cands", cands);
  }

  Scenario scenario_;
  std::uint64_t seed_;
  TraceWriter null_trace_;
  TraceWriter* trace_;
  Scheduler scheduler_;
  EnergyLedger ledger_;
  LinkLayer link_;
  RandomStream jitter_rng_;
  std::vector<Node> nodes_;
  std::vector<Session> sessions_;
  std::vector<CbrSource> sources_;
  RunCounters counters_;
  std::unordered_map<std::uint64_t, NodeId> live_data_;
  std::uint64_t next_uid_{0};
};

}  // namespace meadsr

#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "meadsr/core/types.hpp"

namespace meadsr {

enum class EventKind : std::uint8_t { packet_delivery, mobility_waypoint, traffic_generation, timer_expiry };

inline const char* to_string(EventKind k)
{
  switch (k) {
    case EventKind::packet_delivery: return "packet-delivery";
    case EventKind::mobility_waypoint: return "mobility-waypoint";
    case EventKind::traffic_generation: return "traffic-generation";
    case EventKind::timer_expiry: return "timer-expiry";
  }
  return "?";
}

struct EventHandle {
  std::uint64_t sequence{0};
  bool valid() const { return sequence != 0; }
};

struct RunSummary {
  std::uint64_t dispatched{0};
  std::uint64_t cancelled{0};
};

// Single-threaded discrete-event loop. Events fire in (fire_time, sequence)
// order; sequence numbers are assigned at insertion, so simultaneous events
// fire in insertion order.
class Scheduler {
public:
  using Callback = std::function<void()>;
  using Observer = std::function<void(SimTime, std::uint64_t, EventKind)>;

  SimTime now() const { return now_; }

  EventHandle schedule_at(SimTime when, EventKind kind, Callback cb)
  {
    if (when < now_) {
      throw LogicError("schedule: fire time " + std::to_string(when.count()) + "ns precedes clock " +
                       std::to_string(now_.count()) + "ns");
    }
    const std::uint64_t seq = ++next_sequence_;
    queue_.push(Entry{when, seq, kind, std::move(cb)});
    return EventHandle{seq};
  }

  EventHandle schedule_in(SimTime delay, EventKind kind, Callback cb)
  {
    return schedule_at(now_ + delay, kind, std::move(cb));
  }

  void cancel(EventHandle h)
  {
    if (h.valid()) cancelled_.insert(h.sequence);
  }

  void set_observer(Observer obs) { observer_ = std::move(obs); }

  std::size_t pending() const { return queue_.size(); }

  RunSummary run_until(SimTime end)
  {
    if (end <= SimTime::zero()) throw LogicError("run_until: end time must be positive");
    RunSummary summary;
    while (!queue_.empty() && queue_.top().fire_time <= end) {
      // priority_queue::top is const; the entry is moved out before pop.
      Entry e = std::move(const_cast<Entry&>(queue_.top()));
      queue_.pop();
      if (auto it = cancelled_.find(e.sequence); it != cancelled_.end()) {
        cancelled_.erase(it);
        ++summary.cancelled;
        continue;
      }
      now_ = e.fire_time;
      if (observer_) observer_(e.fire_time, e.sequence, e.kind);
      ++summary.dispatched;
      e.callback();
    }
    if (end > now_) now_ = end;
    return summary;
  }

private:
  struct Entry {
    SimTime fire_time;
    std::uint64_t sequence;
    EventKind kind;
    Callback callback;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const
    {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  SimTime now_{0};
  std::uint64_t next_sequence_{0};
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<std::uint64_t> cancelled_;
  Observer observer_;
};

}  // namespace meadsr

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "meadsr/core/types.hpp"
#include "meadsr/protocol/packets.hpp"

namespace meadsr {

// ---------------------------------------------------------------------------
// Route request table: one entry per (src, seq) seen by a node.

struct RreqTableEntry {
  NodeId src{0};
  std::uint32_t seq{0};
  std::uint32_t nb_hops{0};    // hop count of the first copy received
  NodeId last_node{0};         // neighbour that transmitted the first copy
  std::uint32_t duplicates_forwarded{0};
};

enum class RreqStatus : std::uint8_t { first, duplicate, exhausted };

struct RreqRecordResult {
  RreqStatus status;
  RreqTableEntry entry;  // state as stored before this copy
};

class RreqTable {
public:
  RreqRecordResult record(const Rreq& rreq, NodeId from, std::uint32_t hop_count)
  {
    auto [it, inserted] = entries_.try_emplace(std::pair{rreq.src, rreq.seq});
    if (inserted) {
      it->second = RreqTableEntry{rreq.src, rreq.seq, hop_count, from, 0};
      return {RreqStatus::first, it->second};
    }
    if (it->second.duplicates_forwarded >= 1) return {RreqStatus::exhausted, it->second};
    return {RreqStatus::duplicate, it->second};
  }

  void mark_duplicate_forwarded(NodeId src, std::uint32_t seq)
  {
    auto it = entries_.find({src, seq});
    if (it == entries_.end()) throw LogicError("rreq table: no entry to mark");
    it->second.duplicates_forwarded = 1;
  }

  const RreqTableEntry* find(NodeId src, std::uint32_t seq) const
  {
    auto it = entries_.find({src, seq});
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }

private:
  std::map<std::pair<NodeId, std::uint32_t>, RreqTableEntry> entries_;
};

// ---------------------------------------------------------------------------
// Routes table: candidate routes collected by a destination during Wait_time.

struct RouteCandidate {
  NodeId src{0};
  std::uint32_t seq{0};
  Route route;  // src ... dst
  Energy min_bat_lev;
  SimTime arrival_time{0};

  // Number of links, the route length used for selection.
  std::uint32_t hops() const { return static_cast<std::uint32_t>(route.size()) - 1; }
};

class RoutesTable {
public:
  enum class Round : std::uint8_t { none, collecting, closed };

  Round round(NodeId src, std::uint32_t seq) const
  {
    auto it = rounds_.find({src, seq});
    return it == rounds_.end() ? Round::none : it->second.state;
  }

  // Returns true when this is the first candidate of its round.
  bool add(RouteCandidate c)
  {
    auto& r = rounds_[{c.src, c.seq}];
    if (r.state == Round::closed) throw LogicError("routes table: round already closed");
    const bool first = r.state == Round::none;
    r.state = Round::collecting;
    r.candidates.push_back(std::move(c));
    return first;
  }

  const std::vector<RouteCandidate>& candidates(NodeId src, std::uint32_t seq) const
  {
    static const std::vector<RouteCandidate> empty;
    auto it = rounds_.find({src, seq});
    return it == rounds_.end() ? empty : it->second.candidates;
  }

  // Ends the round and releases its candidates.
  std::vector<RouteCandidate> close(NodeId src, std::uint32_t seq)
  {
    auto& r = rounds_[{src, seq}];
    r.state = Round::closed;
    return std::exchange(r.candidates, {});
  }

private:
  struct RoundState {
    Round state{Round::none};
    std::vector<RouteCandidate> candidates;
  };
  std::map<std::pair<NodeId, std::uint32_t>, RoundState> rounds_;
};

// ---------------------------------------------------------------------------
// Send buffer: data waiting for a route.

class SendBuffer {
public:
  struct Item {
    std::uint64_t uid{0};
    DataPacket packet;
    SimTime enqueued{0};
  };

  SendBuffer(SimTime timeout, std::size_t capacity) : timeout_{timeout}, capacity_{capacity} {}

  SimTime timeout() const { return timeout_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  bool push(std::uint64_t uid, DataPacket pkt, SimTime now)
  {
    if (items_.size() >= capacity_) return false;
    items_.push_back(Item{uid, std::move(pkt), now});
    return true;
  }

  bool has(NodeId dst) const
  {
    for (const auto& i : items_) {
      if (i.packet.dst == dst) return true;
    }
    return false;
  }

  std::vector<Item> take(NodeId dst)
  {
    std::vector<Item> out;
    for (auto it = items_.begin(); it != items_.end();) {
      if (it->packet.dst == dst) {
        out.push_back(std::move(*it));
        it = items_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  // Removes and returns every packet that has waited at least `timeout`.
  std::vector<Item> expire(SimTime now)
  {
    std::vector<Item> out;
    while (!items_.empty() && now - items_.front().enqueued >= timeout_) {
      out.push_back(std::move(items_.front()));
      items_.pop_front();
    }
    return out;
  }

  std::optional<SimTime> next_expiry() const
  {
    if (items_.empty()) return std::nullopt;
    return items_.front().enqueued + timeout_;
  }

  const std::deque<Item>& items() const { return items_; }

private:
  SimTime timeout_;
  std::size_t capacity_;
  std::deque<Item> items_;  // ordered by enqueue time
};

}  // namespace meadsr

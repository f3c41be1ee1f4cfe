#pragma once

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

#include "meadsr/core/types.hpp"
#include "meadsr/protocol/packets.hpp"

namespace meadsr {

// Path cache holding whole source routes that start at the owning node.
//
// In `fifo` mode (DSR) up to `max_per_destination` routes are kept per
// destination and the oldest is evicted first. In `primary_alternate` mode
// (MEA-DSR) a destination has at most one primary and one alternate route.
class RouteCache {
public:
  enum class Mode : std::uint8_t { fifo, primary_alternate };

  struct Entry {
    Route route;
    SimTime inserted{0};
    ReplyRole role{ReplyRole::primary};
  };

  explicit RouteCache(Mode mode = Mode::fifo, std::size_t max_per_destination = 3)
      : mode_{mode}, max_per_destination_{max_per_destination}
  {
    if (max_per_destination_ == 0) throw std::invalid_argument("route cache: capacity must be at least 1");
  }

  Mode mode() const { return mode_; }

  // Returns false when an identical route is already stored.
  bool insert(const Route& route, SimTime now, ReplyRole role = ReplyRole::primary)
  {
    if (route.size() < 2) throw std::invalid_argument("route cache: route needs at least two nodes");
    if (!is_loop_free(route)) throw std::invalid_argument("route cache: looped route " + format_route(route));
    auto& bucket = routes_[route.back()];
    if (mode_ == Mode::primary_alternate) {
      for (auto it = bucket.begin(); it != bucket.end(); ++it) {
        if (it->role == role) {
          bucket.erase(it);
          break;
        }
      }
      Entry e{route, now, role};
      if (role == ReplyRole::primary) bucket.push_front(std::move(e));
      else bucket.push_back(std::move(e));
      return true;
    }
    for (const auto& e : bucket) {
      if (e.route == route) return false;
    }
    bucket.push_back(Entry{route, now, role});
    while (bucket.size() > max_per_destination_) bucket.pop_front();
    return true;
  }

  void clear(NodeId dst) { routes_.erase(dst); }

  // fifo: the shortest route reaching dst (stored under dst or passing
  // through it), newest first among equals.
  // primary_alternate: the primary when present, otherwise the alternate.
  std::optional<Route> lookup(NodeId dst) const
  {
    if (mode_ == Mode::primary_alternate) {
      auto it = routes_.find(dst);
      if (it == routes_.end() || it->second.empty()) return std::nullopt;
      return it->second.front().route;
    }
    std::optional<Route> best;
    auto consider = [&](const Route& r, std::size_t len) {
      if (!best || len < best->size() || len == best->size()) best = Route(r.begin(), r.begin() + len);
    };
    if (auto it = routes_.find(dst); it != routes_.end()) {
      for (const auto& e : it->second) consider(e.route, e.route.size());
    }
    if (best) return best;
    for (const auto& [key, bucket] : routes_) {
      for (const auto& e : bucket) {
        for (std::size_t i = 1; i + 1 < e.route.size(); ++i) {
          if (e.route[i] == dst) {
            consider(e.route, i + 1);
            break;
          }
        }
      }
    }
    return best;
  }

  const std::deque<Entry>* entries(NodeId dst) const
  {
    auto it = routes_.find(dst);
    return it == routes_.end() ? nullptr : &it->second;
  }

  bool has_role(NodeId dst, ReplyRole role) const
  {
    if (auto* b = entries(dst)) {
      for (const auto& e : *b) {
        if (e.role == role) return true;
      }
    }
    return false;
  }

  // Drops every route that traverses the directed link from -> to.
  std::size_t invalidate_link(NodeId from, NodeId to)
  {
    std::size_t removed = 0;
    for (auto it = routes_.begin(); it != routes_.end();) {
      auto& bucket = it->second;
      for (auto e = bucket.begin(); e != bucket.end();) {
        if (uses_link(e->route, from, to)) {
          e = bucket.erase(e);
          ++removed;
        } else {
          ++e;
        }
      }
      it = bucket.empty() ? routes_.erase(it) : std::next(it);
    }
    return removed;
  }

  std::size_t size() const
  {
    std::size_t n = 0;
    for (const auto& [k, b] : routes_) n += b.size();
    return n;
  }

private:
  Mode mode_;
  std::size_t max_per_destination_;
  std::map<NodeId, std::deque<Entry>> routes_;
};

}  // namespace meadsr

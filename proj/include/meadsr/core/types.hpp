#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace meadsr {

using NodeId = std::uint32_t;
inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();

// Simulated time is an integer nanosecond count so ordering is exact.
using SimTime = std::chrono::nanoseconds;

inline SimTime from_seconds(double s)
{
  return SimTime{static_cast<std::int64_t>(std::llround(s * 1e9))};
}

inline double to_seconds(SimTime t) { return static_cast<double>(t.count()) * 1e-9; }

// Energy held as an integer count of picojoules so that ledgers and traces
// add up exactly. 1 mW for 1 ns is exactly 1 pJ.
class Energy {
public:
  constexpr Energy() = default;
  constexpr explicit Energy(std::int64_t picojoules) : pj_{picojoules} {}

  static Energy from_joules(double j) { return Energy{std::llround(j * 1e12)}; }

  constexpr std::int64_t picojoules() const { return pj_; }
  double joules() const { return static_cast<double>(pj_) * 1e-12; }

  constexpr Energy& operator+=(Energy o) { pj_ += o.pj_; return *this; }
  constexpr Energy& operator-=(Energy o) { pj_ -= o.pj_; return *this; }
  friend constexpr Energy operator+(Energy a, Energy b) { return Energy{a.pj_ + b.pj_}; }
  friend constexpr Energy operator-(Energy a, Energy b) { return Energy{a.pj_ - b.pj_}; }
  friend constexpr auto operator<=>(Energy, Energy) = default;

private:
  std::int64_t pj_{0};
};

// Full node sequence, source first and destination last.
using Route = std::vector<NodeId>;

inline bool is_loop_free(std::span<const NodeId> route)
{
  std::vector<NodeId> sorted(route.begin(), route.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

inline bool contains_node(std::span<const NodeId> route, NodeId n)
{
  return std::find(route.begin(), route.end(), n) != route.end();
}

// True when `route` traverses the directed link from -> to.
inline bool uses_link(std::span<const NodeId> route, NodeId from, NodeId to)
{
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    if (route[i] == from && route[i + 1] == to) return true;
  }
  return false;
}

inline std::string format_route(std::span<const NodeId> route)
{
  std::string out;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(route[i]);
  }
  return out;
}

// Raised for conditions that indicate a bug in the simulation itself; the
// run is aborted rather than producing misleading results.
class LogicError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace meadsr

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meadsr/core/random.hpp"
#include "meadsr/core/types.hpp"

namespace meadsr {

struct Vec2 {
  double x{0.0};
  double y{0.0};
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Arena {
  double width{1000.0};
  double height{1000.0};
  double tx_range{250.0};

  void validate() const
  {
    if (!(width > 0) || !(height > 0) || !(tx_range > 0)) {
      throw std::invalid_argument("arena: width, height and tx_range must be positive");
    }
  }

  bool contains(Vec2 p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height; }

  Vec2 clamp(Vec2 p) const { return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)}; }

  // Closed unit disk: a peer exactly tx_range away is reachable.
  bool in_range(Vec2 a, Vec2 b) const
  {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy <= tx_range * tx_range;
  }

  Vec2 uniform_point(RandomStream& rng) const { return {rng.uniform(0.0, width), rng.uniform(0.0, height)}; }
};

struct SpeedInterval {
  double lo{5.0};
  double hi{10.0};
  friend bool operator==(const SpeedInterval&, const SpeedInterval&) = default;
};

// One Random Waypoint leg: the node rests at `origin` until `depart`, moves in
// a straight line at `speed`, reaches `waypoint` at `arrival` and then rests
// for `pause_time`.
struct MobilityState {
  Vec2 origin;
  SimTime depart{0};
  Vec2 waypoint;
  SimTime arrival{0};
  double speed{0.0};
  SimTime pause_time{0};
  SpeedInterval speed_interval;

  SimTime pause_until() const { return arrival + pause_time; }
  bool moving_at(SimTime t) const { return t > depart && t < arrival; }

  // Nodes start at rest for one full pause period before their first leg.
  static MobilityState at_rest(Vec2 where, SimTime pause_time, SpeedInterval speeds)
  {
    MobilityState s;
    s.origin = s.waypoint = where;
    s.pause_time = pause_time;
    s.speed_interval = speeds;
    return s;
  }
};

inline Vec2 position_at(const MobilityState& s, SimTime t)
{
  if (t >= s.arrival) return s.waypoint;
  if (t <= s.depart) return s.origin;
  const double frac = static_cast<double>((t - s.depart).count()) / static_cast<double>((s.arrival - s.depart).count());
  Vec2 p{s.origin.x + (s.waypoint.x - s.origin.x) * frac, s.origin.y + (s.waypoint.y - s.origin.y) * frac};
  // Interpolating between two in-arena points cannot leave the arena except
  // through rounding; keep the endpoints' bounding box.
  p.x = std::clamp(p.x, std::min(s.origin.x, s.waypoint.x), std::max(s.origin.x, s.waypoint.x));
  p.y = std::clamp(p.y, std::min(s.origin.y, s.waypoint.y), std::max(s.origin.y, s.waypoint.y));
  return p;
}

struct MobilityStep {
  MobilityState state;
  SimTime next_change;
};

// Starts the next leg at `now` (the end of the current pause): draws a
// uniform waypoint and a uniform speed and returns when the following pause
// ends, which is the next time this node needs attention.
inline MobilityStep rwp_step(const MobilityState& current, SimTime now, const Arena& arena, RandomStream& rng)
{
  if (now < current.arrival) throw LogicError("rwp_step: called before the current leg finished");
  MobilityState next = current;
  next.origin = current.waypoint;
  next.depart = now;
  next.waypoint = arena.uniform_point(rng);
  next.speed = rng.uniform(current.speed_interval.lo, current.speed_interval.hi);
  const double travel = distance(next.origin, next.waypoint) / next.speed;
  next.arrival = now + from_seconds(travel);
  return {next, next.pause_until()};
}

}  // namespace meadsr

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meadsr/scenario/scenario.hpp"

namespace meadsr {

enum class SweepAxis : std::uint8_t { mobility, density, send_rate, session_count };

inline const char* to_string(SweepAxis a)
{
  switch (a) {
    case SweepAxis::mobility: return "mobility";
    case SweepAxis::density: return "density";
    case SweepAxis::send_rate: return "send-rate";
    case SweepAxis::session_count: return "session-count";
  }
  return "?";
}

inline std::optional<SweepAxis> parse_axis(std::string_view s)
{
  if (s == "mobility" || s == "mobility-pause") return SweepAxis::mobility;
  if (s == "density" || s == "node-density") return SweepAxis::density;
  if (s == "send-rate" || s == "rate") return SweepAxis::send_rate;
  if (s == "session-count" || s == "sessions") return SweepAxis::session_count;
  return std::nullopt;
}

// x-axis label for charts and CSV headers.
inline const char* axis_quantity(SweepAxis a)
{
  switch (a) {
    case SweepAxis::mobility: return "pause time (s)";
    case SweepAxis::density: return "nodes";
    case SweepAxis::send_rate: return "send rate (pkt/s)";
    case SweepAxis::session_count: return "sessions";
  }
  return "?";
}

struct SweepPoint {
  Scenario scenario;  // protocol field is overridden per run
  std::string series; // speed class on the mobility axis, "all" elsewhere
  double x{0.0};      // value along the axis, in unscaled units
};

struct SweepSuite {
  SweepAxis axis{SweepAxis::mobility};
  double scale{1.0};
  std::vector<SweepPoint> points;
};

// Baseline environment. scale shrinks the arena side, node count, run length
// and every time that is measured against the run (pause, session starts);
// the radio range is kept.
inline Scenario table1_base(double scale = 1.0)
{
  if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("suite: scale must lie in (0, 1]");
  Scenario s;
  s.arena = Arena{1000.0 * scale, 1000.0 * scale, 250.0};
  s.node_count = static_cast<std::size_t>(std::lround(50 * scale));
  s.run_length = from_seconds(600.0 * scale);
  s.pause_time = from_seconds(100.0 * scale);
  s.speeds = speed_interval(SpeedClass::moderate);
  s.traffic.count = 10;
  s.traffic.rate = 4.0;
  s.traffic.payload = 512;
  s.traffic.start_min = SimTime::zero();
  s.traffic.start_max = from_seconds(120.0 * scale);
  return s;
}

inline SweepSuite build_table1_suite(SweepAxis axis, double scale = 1.0)
{
  SweepSuite suite;
  suite.axis = axis;
  suite.scale = scale;
  const Scenario base = table1_base(scale);
  auto add = [&](Scenario s, std::string series, double x, const std::string& tag) {
    s.name = std::string(to_string(axis)) + "/" + series + "/" + tag;
    suite.points.push_back(SweepPoint{std::move(s), std::move(series), x});
  };
  switch (axis) {
    case SweepAxis::mobility:
      for (SpeedClass c : {SpeedClass::low, SpeedClass::moderate, SpeedClass::high}) {
        for (int pause = 0; pause <= 600; pause += 100) {
          Scenario s = base;
          s.speeds = speed_interval(c);
          s.pause_time = from_seconds(pause * scale);
          add(std::move(s), to_string(c), pause, "pause-" + std::to_string(pause));
        }
      }
      break;
    case SweepAxis::density:
      for (int nodes = 50; nodes <= 100; nodes += 10) {
        Scenario s = base;
        s.node_count = static_cast<std::size_t>(std::lround(nodes * scale));
        add(std::move(s), "all", nodes, "nodes-" + std::to_string(nodes));
      }
      break;
    case SweepAxis::send_rate:
      for (int rate = 2; rate <= 12; rate += 2) {
        Scenario s = base;
        s.traffic.rate = rate;
        add(std::move(s), "all", rate, "rate-" + std::to_string(rate));
      }
      break;
    case SweepAxis::session_count:
      for (int sessions = 10; sessions <= 40; sessions += 5) {
        Scenario s = base;
        s.traffic.count = static_cast<std::size_t>(sessions);
        add(std::move(s), "all", sessions, "sessions-" + std::to_string(sessions));
      }
      break;
  }
  return suite;
}

}  // namespace meadsr

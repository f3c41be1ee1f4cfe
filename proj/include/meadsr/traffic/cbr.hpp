#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "meadsr/core/random.hpp"
#include "meadsr/core/types.hpp"
#include "meadsr/protocol/packets.hpp"

namespace meadsr {

// One constant-bit-rate UDP flow, active from start_time to the end of the run.
struct Session {
  NodeId src{0};
  NodeId dst{0};
  double rate{4.0};  // packets per second
  std::uint32_t payload{512};
  SimTime start_time{0};
};

struct SessionParams {
  std::size_t count{10};
  double rate{4.0};
  std::uint32_t payload{512};
  SimTime start_min{0};
  SimTime start_max{std::chrono::seconds{120}};
};

// Pairs are drawn independently (repeats allowed) with src != dst.
inline std::vector<Session> generate_sessions(const SessionParams& params, std::size_t node_pool, RandomStream& rng)
{
  if (node_pool < 2) throw std::invalid_argument("traffic: need at least two nodes");
  if (params.count < 1) throw std::invalid_argument("traffic: need at least one session");
  if (!(params.rate > 0)) throw std::invalid_argument("traffic: rate must be positive");
  if (params.start_max < params.start_min) throw std::invalid_argument("traffic: empty start window");
  std::vector<Session> out;
  out.reserve(params.count);
  for (std::size_t i = 0; i < params.count; ++i) {
    Session s;
    s.src = static_cast<NodeId>(rng.below(node_pool));
    s.dst = static_cast<NodeId>(rng.below(node_pool - 1));
    if (s.dst >= s.src) ++s.dst;
    s.rate = params.rate;
    s.payload = params.payload;
    const auto span = static_cast<std::uint64_t>((params.start_max - params.start_min).count());
    s.start_time = params.start_min + SimTime{static_cast<std::int64_t>(rng.below(span + 1))};
    out.push_back(s);
  }
  return out;
}

// Emission k of a session happens at start + floor(k / rate), so the
// schedule never drifts however long the run.
inline SimTime emission_time(const Session& s, std::uint64_t k)
{
  const double offset_ns = std::floor(static_cast<double>(k) * 1e9 / s.rate);
  return s.start_time + SimTime{static_cast<std::int64_t>(offset_ns)};
}

inline SimTime cbr_interval(const Session& s) { return emission_time(s, 1) - emission_time(s, 0); }

// Stateful emitter for one session; the traffic layer never retransmits.
class CbrSource {
public:
  struct Emission {
    DataPacket packet;
    SimTime next;
  };

  explicit CbrSource(Session s) : session_{s} {}

  const Session& session() const { return session_; }
  std::uint64_t emitted() const { return count_; }
  SimTime next_time() const { return emission_time(session_, count_); }

  Emission emit(SimTime now)
  {
    if (now < session_.start_time) throw LogicError("cbr: emission before session start");
    DataPacket p;
    p.src = session_.src;
    p.dst = session_.dst;
    p.flow_seq = static_cast<std::uint32_t>(count_);
    p.payload_size = session_.payload;
    p.generated_at = now;
    ++count_;
    return {std::move(p), next_time()};
  }

private:
  Session session_;
  std::uint64_t count_{0};
};

// Number of packets a session emits in [start, run_end).
inline std::uint64_t emission_count(const Session& s, SimTime run_end)
{
  if (s.start_time >= run_end) return 0;
  std::uint64_t k = 0;
  while (emission_time(s, k) < run_end) ++k;
  return k;
}

}  // namespace meadsr

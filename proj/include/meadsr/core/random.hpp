#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace meadsr {

namespace detail {

inline constexpr std::uint64_t fnv1a(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// A labelled random substream. The generator and every conversion below are
// fully specified, so (master_seed, label) yields the same sequence on any
// conforming platform. Streams with different labels are seeded independently.
class RandomStream {
public:
  RandomStream(std::uint64_t master_seed, std::string label)
      : master_seed_{master_seed},
        label_{std::move(label)},
        engine_{detail::splitmix64(master_seed_ ^ detail::fnv1a(label_))}
  {}

  std::uint64_t master_seed() const { return master_seed_; }
  const std::string& label() const { return label_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi); returns lo for a degenerate interval.
  double uniform(double lo, double hi)
  {
    if (lo > hi) throw std::invalid_argument("uniform: lo > hi");
    if (lo == hi) return lo;
    double v = lo + (hi - lo) * next_unit();
    return v < hi ? v : lo;
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    if (n == 0) throw std::invalid_argument("below: n == 0");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return p > 0.0 && next_unit() < p; }

private:
  std::uint64_t master_seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

inline double draw_uniform(RandomStream& stream, double lo, double hi)
{
  return stream.uniform(lo, hi);
}

}  // namespace meadsr

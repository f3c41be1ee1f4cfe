#pragma once

// Brute-force reference for destination-side route selection. Every
// candidate is compared against every other with exact integer arithmetic;
// the winner is the unique candidate nobody beats.

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace tsupport {

struct OracleCandidate {
  std::vector<std::int64_t> route;
  std::int64_t mbl{0};
  std::int64_t arrival{0};
};

// sign of a/b - c/d for b, d > 0
inline int frac_cmp(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
{
  const __int128 l = static_cast<__int128>(a) * d;
  const __int128 r = static_cast<__int128>(c) * b;
  return (l > r) - (l < r);
}

inline int energy_per_hop_cmp(const OracleCandidate& x, const OracleCandidate& y)
{
  return frac_cmp(x.mbl, static_cast<std::int64_t>(x.route.size()) - 1, y.mbl,
                  static_cast<std::int64_t>(y.route.size()) - 1);
}

// Disjunction as (numerator, denominator): 1 - |I(c) & I(p)| / max(1, |I(c)|).
inline std::pair<std::int64_t, std::int64_t> disjunction_frac(const OracleCandidate& c, const OracleCandidate& p)
{
  std::set<std::int64_t> mine(c.route.begin() + 1, c.route.end() - 1);
  std::set<std::int64_t> theirs(p.route.begin() + 1, p.route.end() - 1);
  std::int64_t shared = 0;
  for (auto n : mine) shared += theirs.count(n);
  const std::int64_t den = mine.empty() ? 1 : static_cast<std::int64_t>(mine.size());
  return {den - shared, den};
}

// True when x is strictly preferred to y as primary.
inline bool better_primary(const OracleCandidate& x, std::size_t xi, const OracleCandidate& y, std::size_t yi)
{
  if (int c = energy_per_hop_cmp(x, y)) return c > 0;
  if (x.arrival != y.arrival) return x.arrival < y.arrival;
  if (x.route != y.route) return x.route < y.route;
  return xi < yi;
}

inline bool better_alternate(const OracleCandidate& x, std::size_t xi, const OracleCandidate& y, std::size_t yi,
                             const OracleCandidate& primary)
{
  const auto dx = disjunction_frac(x, primary);
  const auto dy = disjunction_frac(y, primary);
  if (int c = frac_cmp(dx.first, dx.second, dy.first, dy.second)) return c > 0;
  if (int c = energy_per_hop_cmp(x, y)) return c > 0;
  if (x.arrival != y.arrival) return x.arrival < y.arrival;
  if (x.route != y.route) return x.route < y.route;
  return xi < yi;
}

inline std::size_t oracle_primary(const std::vector<OracleCandidate>& cs)
{
  for (std::size_t i = 0; i < cs.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < cs.size() && !beaten; ++j) {
      if (j != i && better_primary(cs[j], j, cs[i], i)) beaten = true;
    }
    if (!beaten) return i;
  }
  throw std::logic_error("oracle: no maximal primary");
}

inline std::optional<std::size_t> oracle_alternate(const std::vector<OracleCandidate>& cs, std::size_t primary)
{
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i == primary) continue;
    bool beaten = false;
    for (std::size_t j = 0; j < cs.size() && !beaten; ++j) {
      if (j != i && j != primary && better_alternate(cs[j], j, cs[i], i, cs[primary])) beaten = true;
    }
    if (!beaten) return i;
  }
  return std::nullopt;
}

}  // namespace tsupport

#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "meadsr/protocol/tables.hpp"

namespace meadsr {

// Destination-side route selection for MEA-DSR.
//
// The primary route maximises min_bat_lev / hops. The alternate maximises its
// disjunction ratio from the primary and falls back to the same energy ratio
// among equally disjoint candidates. All comparisons are exact: ratios are
// compared by cross-multiplication on integer picojoules.

namespace detail {

// <0, 0, >0 as a.mbl/a.hops is below, equal to, above b.mbl/b.hops.
inline int compare_energy_ratio(const RouteCandidate& a, const RouteCandidate& b)
{
  const __int128 lhs = static_cast<__int128>(a.min_bat_lev.picojoules()) * b.hops();
  const __int128 rhs = static_cast<__int128>(b.min_bat_lev.picojoules()) * a.hops();
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

inline std::vector<NodeId> intermediates(const Route& r)
{
  if (r.size() <= 2) return {};
  std::vector<NodeId> out(r.begin() + 1, r.end() - 1);
  std::sort(out.begin(), out.end());
  return out;
}

inline void check_candidate(const RouteCandidate& c)
{
  if (c.route.size() < 2) throw std::invalid_argument("selection: route needs at least one hop");
  if (c.min_bat_lev.picojoules() < 0) throw std::invalid_argument("selection: negative min_bat_lev");
}

}  // namespace detail

// Exact fraction shared / |I(candidate)| turned into 1 - overlap.
struct DisjunctionRatio {
  std::uint32_t numerator{1};
  std::uint32_t denominator{1};

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

  friend int compare(DisjunctionRatio a, DisjunctionRatio b)
  {
    const std::uint64_t lhs = std::uint64_t{a.numerator} * b.denominator;
    const std::uint64_t rhs = std::uint64_t{b.numerator} * a.denominator;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
};

inline DisjunctionRatio disjunction(const RouteCandidate& candidate, const RouteCandidate& primary)
{
  if (candidate.route.size() < 2 || primary.route.size() < 2 || candidate.route.front() != primary.route.front() ||
      candidate.route.back() != primary.route.back()) {
    throw std::invalid_argument("disjunction: routes must share endpoints");
  }
  const auto mine = detail::intermediates(candidate.route);
  const auto theirs = detail::intermediates(primary.route);
  std::vector<NodeId> shared;
  std::set_intersection(mine.begin(), mine.end(), theirs.begin(), theirs.end(), std::back_inserter(shared));
  const auto den = static_cast<std::uint32_t>(std::max<std::size_t>(1, mine.size()));
  return {den - static_cast<std::uint32_t>(shared.size()), den};
}

inline double disjunction_ratio(const RouteCandidate& candidate, const RouteCandidate& primary)
{
  return disjunction(candidate, primary).value();
}

inline std::size_t select_primary_index(std::span<const RouteCandidate> candidates)
{
  if (candidates.empty()) throw std::invalid_argument("select_primary: no candidates");
  std::size_t best = 0;
  detail::check_candidate(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    detail::check_candidate(c);
    const int cmp = detail::compare_energy_ratio(c, b);
    if (cmp > 0 || (cmp == 0 && (c.arrival_time < b.arrival_time ||
                                 (c.arrival_time == b.arrival_time && c.route < b.route)))) {
      best = i;
    }
  }
  return best;
}

inline RouteCandidate select_primary(std::span<const RouteCandidate> candidates)
{
  return candidates[select_primary_index(candidates)];
}

inline std::optional<std::size_t> select_alternate_index(std::span<const RouteCandidate> candidates,
                                                         std::size_t primary)
{
  std::optional<std::size_t> best;
  DisjunctionRatio best_ratio{};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i == primary) continue;
    const auto& c = candidates[i];
    const DisjunctionRatio ratio = disjunction(c, candidates[primary]);
    if (!best) {
      best = i;
      best_ratio = ratio;
      continue;
    }
    const auto& b = candidates[*best];
    int cmp = compare(ratio, best_ratio);
    if (cmp == 0) cmp = detail::compare_energy_ratio(c, b);
    if (cmp == 0) cmp = c.arrival_time < b.arrival_time ? 1 : (c.arrival_time > b.arrival_time ? -1 : 0);
    if (cmp == 0) cmp = c.route < b.route ? 1 : 0;
    if (cmp > 0) {
      best = i;
      best_ratio = ratio;
    }
  }
  return best;
}

inline std::optional<RouteCandidate> select_alternate(std::span<const RouteCandidate> candidates,
                                                      const RouteCandidate& primary)
{
  // The primary is identified by position when it belongs to the set.
  std::size_t primary_index = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.route == primary.route && c.arrival_time == primary.arrival_time && c.min_bat_lev == primary.min_bat_lev) {
      primary_index = i;
      break;
    }
  }
  if (primary_index == candidates.size()) {
    std::vector<RouteCandidate> all(candidates.begin(), candidates.end());
    all.push_back(primary);
    auto idx = select_alternate_index(all, all.size() - 1);
    if (!idx) return std::nullopt;
    return all[*idx];
  }
  auto idx = select_alternate_index(candidates, primary_index);
  if (!idx) return std::nullopt;
  return candidates[*idx];
}

struct SelectionResult {
  RouteCandidate primary;
  std::optional<RouteCandidate> alternate;
  std::size_t primary_index{0};
  std::optional<std::size_t> alternate_index;
};

inline SelectionResult select_routes(std::span<const RouteCandidate> candidates)
{
  const std::size_t p = select_primary_index(candidates);
  const auto a = select_alternate_index(candidates, p);
  SelectionResult r{candidates[p], std::nullopt, p, a};
  if (a) r.alternate = candidates[*a];
  return r;
}

}  // namespace meadsr

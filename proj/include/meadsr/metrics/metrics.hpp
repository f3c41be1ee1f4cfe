#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "meadsr/core/types.hpp"

namespace meadsr {

struct RunCounters {
  std::uint64_t control_tx{0};      // hop-level RREQ/RREP/RERR transmissions
  std::uint64_t data_generated{0};
  std::uint64_t data_received{0};
};

// The five per-run metrics plus the raw counters behind them. nro and cep
// are undefined (empty) when no data packet was received.
struct MetricsReport {
  std::optional<double> nro;
  double pdf{0.0};
  std::optional<double> cep;  // J per delivered packet
  double sdcen{0.0};          // J
  double mrer{1.0};
  RunCounters counters;
  double total_energy{0.0};   // J
};

inline MetricsReport compute_metrics(const RunCounters& counters, std::span<const Energy> initial,
                                     std::span<const Energy> consumed)
{
  if (initial.size() != consumed.size() || initial.empty()) {
    throw std::invalid_argument("metrics: need one initial and consumed value per node");
  }
  MetricsReport m;
  m.counters = counters;

  Energy total;
  for (Energy e : consumed) total += e;
  m.total_energy = total.joules();

  if (counters.data_received > 0) {
    m.nro = static_cast<double>(counters.control_tx) / static_cast<double>(counters.data_received);
    m.cep = m.total_energy / static_cast<double>(counters.data_received);
  }
  m.pdf = counters.data_generated == 0
              ? 0.0
              : static_cast<double>(counters.data_received) / static_cast<double>(counters.data_generated);

  const double n = static_cast<double>(consumed.size());
  const double mean = m.total_energy / n;
  double squares = 0.0;
  for (Energy e : consumed) {
    const double d = e.joules() - mean;
    squares += d * d;
  }
  m.sdcen = std::sqrt(squares / n);

  m.mrer = 1.0;
  for (std::size_t i = 0; i < consumed.size(); ++i) {
    const double ratio = static_cast<double>((initial[i] - consumed[i]).picojoules()) /
                         static_cast<double>(initial[i].picojoules());
    m.mrer = std::min(m.mrer, ratio);
  }
  return m;
}

enum class Metric : std::uint8_t { nro, pdf, cep, sdcen, mrer };

inline constexpr std::array<Metric, 5> kAllMetrics{Metric::nro, Metric::pdf, Metric::cep, Metric::sdcen,
                                                   Metric::mrer};

inline const char* to_string(Metric m)
{
  switch (m) {
    case Metric::nro: return "nro";
    case Metric::pdf: return "pdf";
    case Metric::cep: return "cep";
    case Metric::sdcen: return "sdcen";
    case Metric::mrer: return "mrer";
  }
  return "?";
}

inline std::optional<double> metric_value(const MetricsReport& r, Metric m)
{
  switch (m) {
    case Metric::nro: return r.nro;
    case Metric::pdf: return r.pdf;
    case Metric::cep: return r.cep;
    case Metric::sdcen: return r.sdcen;
    case Metric::mrer: return r.mrer;
  }
  return std::nullopt;
}

// Cross-seed statistics of one metric; undefined samples are left out.
struct MetricSummary {
  double mean{std::numeric_limits<double>::quiet_NaN()};
  double stddev{std::numeric_limits<double>::quiet_NaN()};
  double min{std::numeric_limits<double>::quiet_NaN()};
  double max{std::numeric_limits<double>::quiet_NaN()};
  std::size_t samples{0};
  std::size_t undefined_count{0};
};

inline MetricSummary summarize(std::span<const std::optional<double>> values)
{
  MetricSummary s;
  std::vector<double> v;
  for (const auto& x : values) {
    if (x) v.push_back(*x);
    else ++s.undefined_count;
  }
  s.samples = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(v.size()));
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

struct AggregateSummary {
  std::array<MetricSummary, 5> metrics;
  std::size_t runs{0};
  const MetricSummary& operator[](Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

inline AggregateSummary aggregate(std::span<const MetricsReport> reports)
{
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  AggregateSummary out;
  out.runs = reports.size();
  for (Metric m : kAllMetrics) {
    std::vector<std::optional<double>> vals;
    vals.reserve(reports.size());
    for (const auto& r : reports) vals.push_back(metric_value(r, m));
    out.metrics[static_cast<std::size_t>(m)] = summarize(vals);
  }
  return out;
}

}  // namespace meadsr

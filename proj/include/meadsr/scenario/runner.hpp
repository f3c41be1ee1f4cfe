#pragma once

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "meadsr/scenario/simulation.hpp"
#include "meadsr/scenario/suite.hpp"

namespace meadsr {

// One line of results.csv.
struct RunRow {
  std::string axis;
  std::string series;
  double x{0.0};
  std::string protocol;
  std::uint64_t seed{0};
  std::string config_hash;
  std::size_t nodes{0};
  double pause_s{0.0};
  double speed_lo{0.0};
  double speed_hi{0.0};
  std::size_t sessions{0};
  double rate{0.0};
  double run_length_s{0.0};
  MetricsReport metrics;
};

inline constexpr const char* kResultsHeader =
    "axis,series,x,protocol,seed,config_hash,nodes,pause_s,speed_lo,speed_hi,sessions,rate,run_length_s,"
    "nro,pdf,cep,sdcen,mrer,control_tx,data_generated,data_received,total_energy_j";

class RunError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_double(double v)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string{}; }

inline std::vector<std::string> split(const std::string& line, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline double parse_double(const std::string& s)
{
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::runtime_error("results: bad number '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s)
{
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::runtime_error("results: bad integer '" + s + "'");
  return v;
}

}  // namespace detail

inline std::string format_row(const RunRow& r)
{
  using detail::fmt_double;
  std::string s;
  s += r.axis + ',' + r.series + ',' + fmt_double(r.x) + ',' + r.protocol + ',' + std::to_string(r.seed) + ',' +
       r.config_hash + ',' + std::to_string(r.nodes) + ',' + fmt_double(r.pause_s) + ',' + fmt_double(r.speed_lo) +
       ',' + fmt_double(r.speed_hi) + ',' + std::to_string(r.sessions) + ',' + fmt_double(r.rate) + ',' +
       fmt_double(r.run_length_s) + ',';
  const auto& m = r.metrics;
  s += detail::fmt_optional(m.nro) + ',' + fmt_double(m.pdf) + ',' + detail::fmt_optional(m.cep) + ',' +
       fmt_double(m.sdcen) + ',' + fmt_double(m.mrer) + ',' + std::to_string(m.counters.control_tx) + ',' +
       std::to_string(m.counters.data_generated) + ',' + std::to_string(m.counters.data_received) + ',' +
       fmt_double(m.total_energy);
  return s;
}

inline RunRow parse_row(const std::string& line)
{
  using detail::parse_double;
  using detail::parse_u64;
  const auto f = detail::split(line, ',');
  if (f.size() != 22) throw std::runtime_error("results: expected 22 columns, got " + std::to_string(f.size()));
  RunRow r;
  r.axis = f[0];
  r.series = f[1];
  r.x = parse_double(f[2]);
  r.protocol = f[3];
  r.seed = parse_u64(f[4]);
  r.config_hash = f[5];
  r.nodes = parse_u64(f[6]);
  r.pause_s = parse_double(f[7]);
  r.speed_lo = parse_double(f[8]);
  r.speed_hi = parse_double(f[9]);
  r.sessions = parse_u64(f[10]);
  r.rate = parse_double(f[11]);
  r.run_length_s = parse_double(f[12]);
  auto& m = r.metrics;
  if (!f[13].empty()) m.nro = parse_double(f[13]);
  m.pdf = parse_double(f[14]);
  if (!f[15].empty()) m.cep = parse_double(f[15]);
  m.sdcen = parse_double(f[16]);
  m.mrer = parse_double(f[17]);
  m.counters.control_tx = parse_u64(f[18]);
  m.counters.data_generated = parse_u64(f[19]);
  m.counters.data_received = parse_u64(f[20]);
  m.total_energy = parse_double(f[21]);
  return r;
}

inline void write_results_csv(std::ostream& out, const std::vector<RunRow>& rows)
{
  out << kResultsHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

inline std::vector<RunRow> read_results_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) throw std::runtime_error("results: missing or unexpected header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

inline std::vector<RunRow> read_results_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_results_csv(in);
}

// Runs one (scenario, seed); the scenario's own protocol is used.
inline RunResult run_once(const Scenario& s, std::uint64_t seed, TraceWriter* trace = nullptr)
{
  Simulation sim(s, seed, trace);
  return sim.run();
}

inline RunRow make_row(const Scenario& s, std::uint64_t seed, const MetricsReport& m, std::string axis = "single",
                       std::string series = "all", double x = 0.0)
{
  RunRow r;
  r.axis = std::move(axis);
  r.series = std::move(series);
  r.x = x;
  r.protocol = to_string(s.protocol);
  r.seed = seed;
  r.config_hash = config_hash(s);
  r.nodes = s.node_count;
  r.pause_s = to_seconds(s.pause_time);
  r.speed_lo = s.speeds.lo;
  r.speed_hi = s.speeds.hi;
  r.sessions = s.traffic.count;
  r.rate = s.traffic.rate;
  r.run_length_s = to_seconds(s.run_length);
  r.metrics = m;
  return r;
}

inline std::filesystem::path default_output_dir()
{
  if (const char* env = std::getenv("MEADSR_OUTPUT_DIR"); env && *env) return env;
  return "results";
}

struct RunTask {
  Scenario scenario;
  std::uint64_t seed{0};
  std::string axis;
  std::string series;
  double x{0.0};
};

struct RunnerOptions {
  std::filesystem::path output_dir;  // empty: nothing is written
  bool write_traces{false};
  unsigned threads{0};               // 0: hardware concurrency
  // Called once per finished run, serialized; the trace text is only present
  // when keep_trace is set.
  std::function<void(const RunTask&, const RunResult&, const std::string& trace)> on_run;
  bool keep_trace{false};
};

// Executes the tasks on a worker pool. Rows come back in task order no
// matter how the work was scheduled.
inline std::vector<RunRow> run_tasks(const std::vector<RunTask>& tasks, const RunnerOptions& opt = {})
{
  std::vector<RunRow> rows(tasks.size());
  std::vector<std::string> energy(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex collect;
  std::exception_ptr failure;
  std::string failed_task;

  if (!opt.output_dir.empty()) std::filesystem::create_directories(opt.output_dir);

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const RunTask& task = tasks[i];
      try {
        const bool tracing = opt.keep_trace || (opt.write_traces && !opt.output_dir.empty());
        TraceWriter trace = tracing ? TraceWriter{nullptr} : TraceWriter{};
        RunResult res = run_once(task.scenario, task.seed, &trace);
        RunRow row = make_row(task.scenario, task.seed, res.metrics, task.axis, task.series, task.x);
        if (opt.write_traces && !opt.output_dir.empty()) {
          std::ofstream out(opt.output_dir / ("trace-" + row.config_hash + "-" + std::to_string(task.seed) + ".log"),
                            std::ios::binary);
          out << trace.text();
        }
        std::string snapshot;
        for (std::size_t n = 0; n < res.initial.size(); ++n) {
          snapshot += row.config_hash + ',' + row.protocol + ',' + std::to_string(task.seed) + ',' + std::to_string(n) +
                      ',' + std::to_string(res.initial[n].picojoules()) + ',' +
                      std::to_string(res.consumed[n].picojoules()) + ',' +
                      std::to_string((res.initial[n] - res.consumed[n]).picojoules()) + '\n';
        }
        std::lock_guard lock(collect);
        if (opt.on_run) opt.on_run(task, res, trace.text());
        rows[i] = std::move(row);
        energy[i] = std::move(snapshot);
      } catch (...) {
        std::lock_guard lock(collect);
        if (!failure) {
          failure = std::current_exception();
          failed_task = task.scenario.name + " protocol=" + to_string(task.scenario.protocol) +
                        " seed=" + std::to_string(task.seed);
        }
        next.store(tasks.size());
      }
    }
  };

  unsigned n = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw RunError("run failed (" + failed_task + "): " + e.what());
    }
  }
  if (!opt.output_dir.empty()) {
    std::ofstream out(opt.output_dir / "energy.csv", std::ios::binary);
    out << "config_hash,protocol,seed,node,initial_pj,consumed_pj,residual_pj\n";
    for (const auto& e : energy) out << e;
  }
  return rows;
}

inline std::vector<RunTask> suite_tasks(const SweepSuite& suite, const std::vector<Protocol>& protocols,
                                        const std::vector<std::uint64_t>& seeds)
{
  if (seeds.empty()) throw std::invalid_argument("suite: need at least one seed");
  std::vector<RunTask> tasks;
  for (const auto& point : suite.points) {
    for (Protocol p : protocols) {
      Scenario s = point.scenario;
      s.protocol = p;
      s.seeds = seeds;
      for (std::uint64_t seed : seeds) tasks.push_back(RunTask{s, seed, to_string(suite.axis), point.series, point.x});
    }
  }
  return tasks;
}

// --- derived tables -------------------------------------------------------

struct GroupKey {
  std::string axis;
  std::string series;
  double x;
  std::string protocol;
  auto operator<=>(const GroupKey&) const = default;
};

inline std::map<GroupKey, AggregateSummary> group_results(const std::vector<RunRow>& rows)
{
  std::map<GroupKey, std::vector<MetricsReport>> groups;
  for (const auto& r : rows) groups[GroupKey{r.axis, r.series, r.x, r.protocol}].push_back(r.metrics);
  std::map<GroupKey, AggregateSummary> out;
  for (const auto& [k, reports] : groups) out.emplace(k, aggregate(reports));
  return out;
}

inline void write_summary_csv(std::ostream& out, const std::vector<RunRow>& rows)
{
  using detail::fmt_double;
  out << "axis,series,x,protocol,metric,mean,stddev,min,max,samples,undefined\n";
  for (const auto& [k, agg] : group_results(rows)) {
    for (Metric m : kAllMetrics) {
      const auto& s = agg[m];
      out << k.axis << ',' << k.series << ',' << fmt_double(k.x) << ',' << k.protocol << ',' << to_string(m) << ',';
      if (s.samples) {
        out << fmt_double(s.mean) << ',' << fmt_double(s.stddev) << ',' << fmt_double(s.min) << ',' << fmt_double(s.max);
      } else {
        out << ",,,";
      }
      out << ',' << s.samples << ',' << s.undefined_count << '\n';
    }
  }
}

// Panels of one figure: (axis, series, metric) with one column pair per protocol.
struct FigureData {
  std::string axis;
  std::string series;
  Metric metric;
  std::vector<std::string> protocols;
  std::vector<double> xs;
  // [protocol][x] -> summary
  std::vector<std::vector<MetricSummary>> values;
};

inline std::vector<FigureData> figure_data(const std::vector<RunRow>& rows)
{
  const auto groups = group_results(rows);
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<std::string>, std::vector<double>>> panels;
  for (const auto& [k, agg] : groups) {
    auto& [protos, xs] = panels[{k.axis, k.series}];
    if (std::find(protos.begin(), protos.end(), k.protocol) == protos.end()) protos.push_back(k.protocol);
    if (std::find(xs.begin(), xs.end(), k.x) == xs.end()) xs.push_back(k.x);
  }
  std::vector<FigureData> out;
  for (auto& [key, px] : panels) {
    auto [protos, xs] = px;
    std::sort(protos.begin(), protos.end());
    std::sort(xs.begin(), xs.end());
    for (Metric m : kAllMetrics) {
      FigureData f{key.first, key.second, m, protos, xs, {}};
      for (const auto& p : protos) {
        std::vector<MetricSummary> col;
        for (double x : xs) {
          auto it = groups.find(GroupKey{key.first, key.second, x, p});
          col.push_back(it == groups.end() ? MetricSummary{} : it->second[m]);
        }
        f.values.push_back(std::move(col));
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

inline std::string figure_stem(const FigureData& f)
{
  std::string s = std::string(to_string(f.metric)) + "-" + f.axis;
  if (f.series != "all") s += "-" + f.series;
  return s;
}

inline void write_figure_csv(std::ostream& out, const FigureData& f)
{
  using detail::fmt_double;
  out << "x";
  for (const auto& p : f.protocols) out << ',' << p << "_mean," << p << "_stddev," << p << "_samples";
  out << '\n';
  for (std::size_t i = 0; i < f.xs.size(); ++i) {
    out << fmt_double(f.xs[i]);
    for (std::size_t p = 0; p < f.protocols.size(); ++p) {
      const auto& s = f.values[p][i];
      if (s.samples) out << ',' << fmt_double(s.mean) << ',' << fmt_double(s.stddev) << ',' << s.samples;
      else out << ",,,0";
    }
    out << '\n';
  }
}

// summary.csv and figures/*.csv, all computed from results.csv in `dir`.
inline void write_derived_tables(const std::filesystem::path& dir)
{
  const auto rows = read_results_csv(dir / "results.csv");
  {
    std::ofstream out(dir / "summary.csv", std::ios::binary);
    write_summary_csv(out, rows);
  }
  std::filesystem::create_directories(dir / "figures");
  for (const auto& f : figure_data(rows)) {
    std::ofstream out(dir / "figures" / (figure_stem(f) + ".csv"), std::ios::binary);
    write_figure_csv(out, f);
  }
}

inline std::vector<RunRow> run_suite(const SweepSuite& suite, const std::vector<Protocol>& protocols,
                                     const std::vector<std::uint64_t>& seeds, const RunnerOptions& opt = {})
{
  auto rows = run_tasks(suite_tasks(suite, protocols, seeds), opt);
  if (!opt.output_dir.empty()) {
    {
      std::ofstream out(opt.output_dir / "results.csv", std::ios::binary);
      write_results_csv(out, rows);
    }
    write_derived_tables(opt.output_dir);
  }
  return rows;
}

}  // namespace meadsr

// Command-line front end: run scenario files, sweep suites, redraw charts.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meadsr/meadsr.hpp"

namespace {

using namespace meadsr;

std::vector<Protocol> parse_protocol_list(const std::string& text)
{
  std::vector<Protocol> out;
  for (const auto& item : detail::split(text, ',')) {
    auto p = parse_protocol(item);
    if (!p) throw CLI::ValidationError("--protocols", "unknown protocol '" + item + "'");
    out.push_back(*p);
  }
  return out;
}

void progress(std::size_t done, std::size_t total)
{
  std::cerr << "\r" << done << "/" << total << " runs" << std::flush;
  if (done == total) std::cerr << "\n";
}

int cmd_run(const std::string& file, std::filesystem::path out_dir, bool traces, unsigned threads)
{
  const Scenario s = load_scenario(file);
  if (out_dir.empty()) out_dir = default_output_dir() / ("run-" + config_hash(s));
  std::vector<RunTask> tasks;
  for (auto seed : s.seeds) tasks.push_back(RunTask{s, seed, "single", "all", 0.0});
  RunnerOptions opt;
  opt.output_dir = out_dir;
  opt.write_traces = traces;
  opt.threads = threads;
  std::size_t done = 0;
  opt.on_run = [&](const RunTask&, const RunResult&, const std::string&) { progress(++done, tasks.size()); };
  const auto rows = run_tasks(tasks, opt);
  {
    std::ofstream out(out_dir / "results.csv", std::ios::binary);
    write_results_csv(out, rows);
  }
  write_derived_tables(out_dir);
  for (const auto& r : rows) {
    std::cout << "seed " << r.seed << ": nro=" << detail::fmt_optional(r.metrics.nro)
              << " pdf=" << detail::fmt_double(r.metrics.pdf) << " cep=" << detail::fmt_optional(r.metrics.cep)
              << " sdcen=" << detail::fmt_double(r.metrics.sdcen) << " mrer=" << detail::fmt_double(r.metrics.mrer)
              << "\n";
  }
  std::cout << "wrote " << out_dir.string() << "\n";
  return 0;
}

int cmd_suite(const std::string& axis_name, double scale, unsigned seeds, const std::string& protocols,
              std::filesystem::path out_dir, bool traces, unsigned threads, bool plots)
{
  const auto axis = parse_axis(axis_name);
  if (!axis) throw CLI::ValidationError("axis", "expected mobility, density, send-rate or session-count");
  if (seeds < 1) throw CLI::ValidationError("--seeds", "need at least one seed");
  const SweepSuite suite = build_table1_suite(*axis, scale);
  std::vector<std::uint64_t> seed_list;
  for (unsigned i = 1; i <= seeds; ++i) seed_list.push_back(i);
  if (out_dir.empty()) out_dir = default_output_dir() / to_string(*axis);

  RunnerOptions opt;
  opt.output_dir = out_dir;
  opt.write_traces = traces;
  opt.threads = threads;
  const std::size_t total = suite.points.size() * parse_protocol_list(protocols).size() * seed_list.size();
  std::size_t done = 0;
  opt.on_run = [&](const RunTask&, const RunResult&, const std::string&) { progress(++done, total); };
  run_suite(suite, parse_protocol_list(protocols), seed_list, opt);
  if (plots) std::cout << emit_plots(out_dir) << " charts\n";
  std::cout << "wrote " << out_dir.string() << "\n";
  return 0;
}

int cmd_validate(const std::string& file)
{
  const Scenario s = load_scenario(file);
  std::cout << scenario_to_json(s).dump(2) << "\n";
  std::cout << "config_hash " << config_hash(s) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"MANET routing simulator: DSR and multipath energy-aware DSR"};
  app.require_subcommand(1);

  std::string file;
  std::string out;
  unsigned threads = 0;
  bool traces = true;

  auto* run = app.add_subcommand("run", "run every seed of a scenario file");
  run->add_option("scenario", file, "scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory");
  run->add_flag("!--no-trace", traces, "do not write trace files");
  run->add_option("--threads", threads, "worker threads (0: all cores)");

  std::string axis;
  double scale = 0.5;
  unsigned seeds = 10;
  std::string protocols = "dsr,mea-dsr";
  bool suite_traces = false;
  bool no_plots = false;
  auto* suite = app.add_subcommand("suite", "run a sweep suite");
  suite->add_option("axis", axis, "mobility | density | send-rate | session-count")->required();
  suite->add_option("--scale", scale, "shrink arena, nodes and run length")->check(CLI::Range(0.01, 1.0));
  suite->add_option("--seeds", seeds, "seeds 1..N");
  suite->add_option("--protocols", protocols, "comma separated protocol list");
  suite->add_option("--out", out, "output directory");
  suite->add_flag("--traces", suite_traces, "write one trace file per run");
  suite->add_flag("--no-plots", no_plots, "skip SVG charts");
  suite->add_option("--threads", threads, "worker threads (0: all cores)");

  std::string dir;
  auto* plot = app.add_subcommand("plot", "redraw charts from results.csv");
  plot->add_option("results_dir", dir, "directory holding results.csv")->required()->check(CLI::ExistingDirectory);

  auto* validate = app.add_subcommand("validate", "check a scenario file and print its canonical form");
  validate->add_option("scenario", file, "scenario JSON file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(file, out, traces, threads);
    if (*suite) return cmd_suite(axis, scale, seeds, protocols, out, suite_traces, threads, !no_plots);
    if (*plot) {
      std::cout << emit_plots(dir) << " charts written to " << (std::filesystem::path(dir) / "charts").string()
                << "\n";
      return 0;
    }
    if (*validate) return cmd_validate(file);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

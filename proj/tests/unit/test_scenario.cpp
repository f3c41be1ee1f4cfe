#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "meadsr/scenario/plot.hpp"
#include "meadsr/scenario/runner.hpp"
#include "meadsr/scenario/suite.hpp"

using namespace meadsr;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

ScenarioError::Kind error_kind(const std::string& text)
{
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ScenarioError::Kind::io;
}

fs::path scratch(const std::string& name)
{
  auto p = fs::temp_directory_path() / ("meadsr-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(LoadScenario, MinimalFileGetsDefaults)
{
  auto s = parse_scenario(R"({"nodes": 50, "protocol": "mea-dsr"})");
  EXPECT_EQ(s.node_count, 50u);
  EXPECT_EQ(s.protocol, Protocol::mea_dsr);
  EXPECT_EQ(s.arena.width, 1000.0);
  EXPECT_EQ(s.arena.tx_range, 250.0);
  EXPECT_EQ(s.run_length, 600s);
  EXPECT_EQ(s.pause_time, 100s);
  EXPECT_EQ(s.traffic.count, 10u);
  EXPECT_EQ(s.traffic.rate, 4.0);
  EXPECT_EQ(s.traffic.payload, 512u);
  EXPECT_EQ(s.traffic.start_max, 120s);
  EXPECT_EQ(s.initial_energy, Energy::from_joules(100));
  EXPECT_EQ(s.energy.tx_power, 1.4);
  EXPECT_EQ(s.energy.rx_power, 1.0);
  EXPECT_FALSE(s.energy.overhear_charging);
  EXPECT_EQ(s.link.bandwidth, 2'000'000);
  EXPECT_EQ(s.mea.wait_time, 50ms);
  EXPECT_EQ(s.discovery.send_buffer_timeout, 30s);
  EXPECT_EQ(s.dsr.max_routes_per_destination, 3u);
  EXPECT_EQ(s.seeds.size(), 10u);
}

TEST(LoadScenario, NegativePauseRejected)
{
  EXPECT_EQ(error_kind(R"({"mobility": {"pause_time": -1}})"), ScenarioError::Kind::invalid_value);
}

TEST(LoadScenario, SpeedClassHigh)
{
  auto s = parse_scenario(R"({"mobility": {"speed_class": "high"}})");
  EXPECT_EQ(s.speeds, (SpeedInterval{20, 25}));
  EXPECT_EQ(parse_scenario(R"({"mobility": {"speed_class": "low"}})").speeds, (SpeedInterval{0.5, 1}));
  EXPECT_EQ(parse_scenario(R"({"mobility": {"speed_interval": [2, 3]}})").speeds, (SpeedInterval{2, 3}));
}

TEST(LoadScenario, DistinctDiagnostics)
{
  EXPECT_EQ(error_kind(R"({"nodes": 50,)"), ScenarioError::Kind::malformed);
  EXPECT_EQ(error_kind(R"({"nodes": "many"})"), ScenarioError::Kind::malformed);
  EXPECT_EQ(error_kind(R"({"nodez": 50})"), ScenarioError::Kind::unknown_key);
  EXPECT_EQ(error_kind(R"({"traffic": {"burst": 1}})"), ScenarioError::Kind::unknown_key);
  EXPECT_EQ(error_kind(R"({"nodes": 1})"), ScenarioError::Kind::invalid_value);
  EXPECT_EQ(error_kind(R"({"protocol": "aodv"})"), ScenarioError::Kind::invalid_value);
  EXPECT_EQ(error_kind(R"({"link": {"loss_probability": 2}})"), ScenarioError::Kind::invalid_value);
  EXPECT_EQ(error_kind(R"({"energy": {"initial": 0}})"), ScenarioError::Kind::invalid_value);
  EXPECT_EQ(error_kind(R"({"mobility": {"speed_class": "high", "speed_interval": [1, 2]}})"),
            ScenarioError::Kind::invalid_value);
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.kind(), ScenarioError::Kind::io);
  }
  try {
    parse_scenario(R"({"arena": {"depth": 3}})");
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("arena.depth"), std::string::npos);
  }
}

TEST(LoadScenario, ZeroSessionsAllowed)
{
  EXPECT_EQ(parse_scenario(R"({"traffic": {"sessions": 0}})").traffic.count, 0u);
}

TEST(LoadScenario, CanonicalRoundTrip)
{
  auto s = parse_scenario(R"({"nodes": 30, "protocol": "dsr", "mobility": {"pause_time": 12.5, "speed_class": "high"},
                              "traffic": {"rate": 6}, "dsr": {"cache_reply_jitter": false}})");
  auto again = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(again).dump(), scenario_to_json(s).dump());
  EXPECT_EQ(config_hash(again), config_hash(s));
  EXPECT_EQ(config_hash(s).size(), 16u);
}

TEST(LoadScenario, HashIgnoresSeedsButNotParameters)
{
  auto a = parse_scenario(R"({"seeds": [1]})");
  auto b = parse_scenario(R"({"seeds": [2, 3]})");
  auto c = parse_scenario(R"({"traffic": {"rate": 5}})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Suite, PointCounts)
{
  EXPECT_EQ(build_table1_suite(SweepAxis::mobility).points.size(), 21u);
  EXPECT_EQ(build_table1_suite(SweepAxis::density).points.size(), 6u);
  EXPECT_EQ(build_table1_suite(SweepAxis::send_rate).points.size(), 6u);
  EXPECT_EQ(build_table1_suite(SweepAxis::session_count).points.size(), 7u);
}

TEST(Suite, PointsDifferOnlyAlongAxis)
{
  for (SweepAxis axis : {SweepAxis::mobility, SweepAxis::density, SweepAxis::send_rate, SweepAxis::session_count}) {
    const auto suite = build_table1_suite(axis);
    for (const auto& p : suite.points) {
      Scenario s = p.scenario;
      Scenario base = table1_base();
      switch (axis) {
        case SweepAxis::mobility: base.pause_time = s.pause_time; base.speeds = s.speeds; break;
        case SweepAxis::density: base.node_count = s.node_count; break;
        case SweepAxis::send_rate: base.traffic.rate = s.traffic.rate; break;
        case SweepAxis::session_count: base.traffic.count = s.traffic.count; break;
      }
      base.name = s.name;
      EXPECT_EQ(scenario_to_json(s).dump(), scenario_to_json(base).dump()) << s.name;
    }
  }
}

TEST(Suite, AxisValues)
{
  const auto density = build_table1_suite(SweepAxis::density);
  for (const auto& p : density.points) {
    EXPECT_EQ(p.scenario.pause_time, 100s);
    EXPECT_EQ(p.scenario.speeds, (SpeedInterval{5, 10}));
    EXPECT_EQ(p.scenario.node_count, static_cast<std::size_t>(p.x));
  }
  const auto rate = build_table1_suite(SweepAxis::send_rate);
  EXPECT_EQ(rate.points.front().scenario.traffic.rate, 2.0);
  EXPECT_EQ(rate.points.back().scenario.traffic.rate, 12.0);
  const auto mob = build_table1_suite(SweepAxis::mobility);
  EXPECT_EQ(mob.points[6].scenario.pause_time, 600s);
  EXPECT_EQ(mob.points[14].series, "high");
  EXPECT_EQ(mob.points[14].scenario.speeds, (SpeedInterval{20, 25}));
}

TEST(Suite, DeskScale)
{
  const auto s = table1_base(0.5);
  EXPECT_EQ(s.arena.width, 500.0);
  EXPECT_EQ(s.arena.height, 500.0);
  EXPECT_EQ(s.arena.tx_range, 250.0);
  EXPECT_EQ(s.node_count, 25u);
  EXPECT_EQ(s.run_length, 300s);
  const auto mob = build_table1_suite(SweepAxis::mobility, 0.5);
  EXPECT_EQ(mob.points[6].scenario.pause_time, 300s);  // static at desk scale too
  EXPECT_EQ(mob.points[6].x, 600.0);
  EXPECT_THROW(table1_base(0), std::invalid_argument);
  EXPECT_THROW(table1_base(1.5), std::invalid_argument);
}

TEST(Suite, AxisNames)
{
  EXPECT_EQ(parse_axis("mobility-pause"), SweepAxis::mobility);
  EXPECT_EQ(parse_axis("send-rate"), SweepAxis::send_rate);
  EXPECT_FALSE(parse_axis("speed"));
}

TEST(ResultsCsv, RowRoundTrip)
{
  RunRow r;
  r.axis = "mobility";
  r.series = "high";
  r.x = 300;
  r.protocol = "dsr";
  r.seed = 12;
  r.config_hash = "0123456789abcdef";
  r.nodes = 25;
  r.pause_s = 150;
  r.speed_lo = 20;
  r.speed_hi = 25;
  r.sessions = 10;
  r.rate = 4;
  r.run_length_s = 300;
  r.metrics.nro = 1.0 / 3.0;
  r.metrics.pdf = 0.1;
  r.metrics.sdcen = 0.30000000000000004;
  r.metrics.mrer = 0.75;
  r.metrics.counters = {10, 20, 30};
  r.metrics.total_energy = 12.5;
  const std::string line = format_row(r);
  const RunRow back = parse_row(line);
  EXPECT_EQ(format_row(back), line);
  EXPECT_EQ(back.metrics.nro, r.metrics.nro);
  EXPECT_FALSE(back.metrics.cep);
  EXPECT_EQ(back.metrics.sdcen, r.metrics.sdcen);
  EXPECT_EQ(detail::split(std::string(kResultsHeader), ',').size(), detail::split(line, ',').size());
}

TEST(Runner, TwentyRowsForTwoProtocolsTenSeeds)
{
  SweepSuite suite;
  suite.axis = SweepAxis::send_rate;
  Scenario s = table1_base(0.1);
  suite.points.push_back({s, "all", 4});
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto rows = run_suite(suite, {Protocol::dsr, Protocol::mea_dsr}, seeds, RunnerOptions{{}, false, 1, {}, false});
  EXPECT_EQ(rows.size(), 20u);
  const auto groups = group_results(rows);
  ASSERT_EQ(groups.size(), 2u);
  for (const auto& [k, agg] : groups) EXPECT_EQ(agg.runs, 10u);
}

TEST(Runner, FailedRunNamesTheTuple)
{
  Scenario bad = table1_base(0.1);
  bad.node_count = 1;
  try {
    run_tasks({RunTask{bad, 4, "x", "all", 0}});
    FAIL();
  } catch (const RunError& e) {
    EXPECT_NE(std::string(e.what()).find("seed=4"), std::string::npos);
  }
}

TEST(Runner, OutputsAreDeterministicAndPlotsDeriveFromCsv)
{
  const auto suite = build_table1_suite(SweepAxis::mobility, 0.1);
  const auto a = scratch("a"), b = scratch("b");
  RunnerOptions oa{a, true, 1, {}, false}, ob{b, true, 2, {}, false};
  run_suite(suite, {Protocol::dsr, Protocol::mea_dsr}, {1, 2}, oa);
  run_suite(suite, {Protocol::dsr, Protocol::mea_dsr}, {1, 2}, ob);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / fs::relative(e.path(), a))) << e.path();
  }
  EXPECT_GT(files, 40u);  // results, summary, energy, figures and traces

  EXPECT_EQ(read_results_csv(a / "results.csv").size(), 21u * 2 * 2);
  EXPECT_EQ(emit_plots(a), 15u);
  EXPECT_TRUE(fs::exists(a / "charts" / "nro-mobility-high.svg"));
  EXPECT_TRUE(fs::exists(a / "figures" / "mrer-mobility-low.csv"));

  // Charts regenerate from the CSV alone.
  fs::remove_all(a / "charts");
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename().string().rfind("trace-", 0) == 0) fs::remove(e.path());
  }
  EXPECT_EQ(emit_plots(a), 15u);
  EXPECT_EQ(slurp(a / "charts" / "pdf-mobility-moderate.svg"), [&] {
    emit_plots(b);
    return slurp(b / "charts" / "pdf-mobility-moderate.svg");
  }());
  fs::remove_all(a);
  fs::remove_all(b);
}

namespace {

std::size_t error_bars(const std::string& svg)
{
  std::size_t n = 0;
  std::istringstream in(svg);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("<line", 0) == 0 && line.find("#ddd") == std::string::npos &&
        line.find("stroke-width") == std::string::npos) {
      ++n;
    }
  }
  return n;
}

}  // namespace

TEST(Plots, SingleSeedHasNoErrorBars)
{
  RunRow r;
  r.axis = "send-rate";
  r.series = "all";
  r.protocol = "dsr";
  std::vector<RunRow> rows;
  for (double x : {2.0, 4.0}) {
    r.x = x;
    r.metrics.pdf = x / 10;
    rows.push_back(r);
  }
  auto figs = figure_data(rows);
  ASSERT_EQ(figs.size(), 5u);
  for (const auto& f : figs) EXPECT_EQ(error_bars(render_svg(f)), 0u);

  for (double x : {2.0, 4.0}) {
    r.x = x;
    r.metrics.pdf = x / 5;
    rows.push_back(r);
  }
  for (const auto& f : figure_data(rows)) {
    if (f.metric == Metric::pdf) {
      EXPECT_EQ(error_bars(render_svg(f)), 2u);
    }
  }
}

TEST(Plots, EmptyResultsRejected)
{
  const auto d = scratch("empty");
  fs::create_directories(d);
  {
    std::ofstream out(d / "results.csv");
    out << kResultsHeader << '\n';
  }
  EXPECT_THROW(emit_plots(d), std::runtime_error);
  fs::remove_all(d);
}

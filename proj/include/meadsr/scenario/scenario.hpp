#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "meadsr/core/random.hpp"
#include "meadsr/energy/energy.hpp"
#include "meadsr/protocol/dsr.hpp"
#include "meadsr/protocol/mea_dsr.hpp"
#include "meadsr/traffic/cbr.hpp"
#include "meadsr/world/link_layer.hpp"
#include "meadsr/world/mobility.hpp"

namespace meadsr {

enum class SpeedClass : std::uint8_t { low, moderate, high };

inline const char* to_string(SpeedClass c)
{
  switch (c) {
    case SpeedClass::low: return "low";
    case SpeedClass::moderate: return "moderate";
    case SpeedClass::high: return "high";
  }
  return "?";
}

inline SpeedInterval speed_interval(SpeedClass c)
{
  switch (c) {
    case SpeedClass::low: return {0.5, 1.0};
    case SpeedClass::moderate: return {5.0, 10.0};
    case SpeedClass::high: return {20.0, 25.0};
  }
  return {};
}

inline std::optional<SpeedClass> parse_speed_class(const std::string& s)
{
  if (s == "low") return SpeedClass::low;
  if (s == "moderate") return SpeedClass::moderate;
  if (s == "high") return SpeedClass::high;
  return std::nullopt;
}

class ScenarioError : public std::runtime_error {
public:
  enum class Kind : std::uint8_t { malformed, invalid_value, unknown_key, io };

  ScenarioError(Kind kind, const std::string& what) : std::runtime_error(prefix(kind) + what), kind_{kind} {}
  Kind kind() const { return kind_; }

private:
  static std::string prefix(Kind k)
  {
    switch (k) {
      case Kind::malformed: return "malformed scenario: ";
      case Kind::invalid_value: return "invalid scenario value: ";
      case Kind::unknown_key: return "unknown scenario key: ";
      case Kind::io: return "cannot read scenario: ";
    }
    return "";
  }
  Kind kind_;
};

struct Scenario {
  std::string name{"scenario"};
  Arena arena;
  std::size_t node_count{50};
  SimTime run_length{std::chrono::seconds{600}};
  SimTime pause_time{std::chrono::seconds{100}};
  SpeedInterval speeds{5.0, 10.0};
  SessionParams traffic;
  Protocol protocol{Protocol::mea_dsr};
  Energy initial_energy{Energy::from_joules(100.0)};
  EnergyModel energy;
  LinkLayerConfig link;
  PacketSizes sizes;
  DiscoveryConfig discovery;
  DsrConfig dsr;
  MeaDsrConfig mea;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  void validate() const
  {
    auto bad = [](const std::string& m) { throw ScenarioError(ScenarioError::Kind::invalid_value, m); };
    try {
      arena.validate();
      energy.validate();
      link.validate();
      mea.validate();
    } catch (const std::invalid_argument& e) {
      bad(e.what());
    }
    if (node_count < 2) bad("nodes must be at least 2");
    if (run_length <= SimTime::zero()) bad("run_length must be positive");
    if (pause_time < SimTime::zero()) bad("pause_time must not be negative");
    if (!(speeds.lo > 0) || speeds.hi < speeds.lo) bad("speed interval must satisfy 0 < lo <= hi");
    if (!(traffic.rate > 0)) bad("traffic.rate must be positive");
    if (traffic.payload == 0) bad("traffic.payload must be positive");
    if (traffic.start_min < SimTime::zero() || traffic.start_max < traffic.start_min) bad("traffic start window is empty");
    if (initial_energy.picojoules() <= 0) bad("energy.initial must be positive");
    if (discovery.send_buffer_timeout <= SimTime::zero()) bad("routing.send_buffer_timeout must be positive");
    if (discovery.send_buffer_capacity < 1) bad("routing.send_buffer_capacity must be at least 1");
    if (discovery.backoff_initial <= SimTime::zero() || discovery.backoff_max < discovery.backoff_initial) {
      bad("routing backoff must satisfy 0 < initial <= max");
    }
    if (dsr.max_routes_per_destination < 1) bad("dsr.max_routes_per_destination must be at least 1");
    if (seeds.empty()) bad("seeds must not be empty");
  }
};

// ---------------------------------------------------------------------------
// JSON mapping. Times are given in seconds, energy in joules, power in watts.

namespace detail {

using nlohmann::json;

class ObjectReader {
public:
  ObjectReader(const json& j, std::string path) : j_{j}, path_{std::move(path)}
  {
    if (!j_.is_object()) throw ScenarioError(ScenarioError::Kind::malformed, path_ + " must be an object");
  }

  template <class T, class Fn> void opt(const char* key, Fn&& assign)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      assign(it->template get<T>());
    } catch (const json::exception&) {
      throw ScenarioError(ScenarioError::Kind::malformed, where(key) + " has the wrong type");
    }
  }

  std::optional<ObjectReader> sub(const char* key)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return ObjectReader(*it, where(key));
  }

  void reject_unknown() const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ScenarioError(ScenarioError::Kind::unknown_key, where(it.key()));
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline SimTime seconds_value(double s, const std::string& key)
{
  if (!std::isfinite(s)) throw ScenarioError(ScenarioError::Kind::invalid_value, key + " must be finite");
  return from_seconds(s);
}

template <class T> T non_negative(std::int64_t v, const std::string& key)
{
  if (v < 0) throw ScenarioError(ScenarioError::Kind::invalid_value, key + " must not be negative");
  return static_cast<T>(v);
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& root)
{
  using detail::non_negative;
  using detail::seconds_value;
  Scenario s;
  detail::ObjectReader r(root, "");
  std::optional<SpeedClass> speed_class;
  std::optional<SpeedInterval> explicit_speeds;

  r.opt<std::string>("name", [&](std::string v) { s.name = std::move(v); });
  r.opt<std::int64_t>("nodes", [&](std::int64_t v) { s.node_count = non_negative<std::size_t>(v, "nodes"); });
  r.opt<std::string>("protocol", [&](const std::string& v) {
    auto p = parse_protocol(v);
    if (!p) throw ScenarioError(ScenarioError::Kind::invalid_value, "protocol must be dsr or mea-dsr, got " + v);
    s.protocol = *p;
  });
  r.opt<double>("run_length", [&](double v) { s.run_length = seconds_value(v, "run_length"); });
  r.opt<std::vector<std::uint64_t>>("seeds", [&](std::vector<std::uint64_t> v) { s.seeds = std::move(v); });

  if (auto a = r.sub("arena")) {
    a->opt<double>("width", [&](double v) { s.arena.width = v; });
    a->opt<double>("height", [&](double v) { s.arena.height = v; });
    a->opt<double>("tx_range", [&](double v) { s.arena.tx_range = v; });
    a->reject_unknown();
  }
  if (auto m = r.sub("mobility")) {
    m->opt<double>("pause_time", [&](double v) {
      if (v < 0) throw ScenarioError(ScenarioError::Kind::invalid_value, "mobility.pause_time must not be negative");
      s.pause_time = seconds_value(v, "mobility.pause_time");
    });
    m->opt<std::string>("speed_class", [&](const std::string& v) {
      speed_class = parse_speed_class(v);
      if (!speed_class) {
        throw ScenarioError(ScenarioError::Kind::invalid_value, "mobility.speed_class must be low, moderate or high");
      }
    });
    m->opt<std::vector<double>>("speed_interval", [&](const std::vector<double>& v) {
      if (v.size() != 2) throw ScenarioError(ScenarioError::Kind::malformed, "mobility.speed_interval needs [lo, hi]");
      explicit_speeds = SpeedInterval{v[0], v[1]};
    });
    m->reject_unknown();
  }
  if (speed_class && explicit_speeds) {
    throw ScenarioError(ScenarioError::Kind::invalid_value, "give either mobility.speed_class or speed_interval");
  }
  if (speed_class) s.speeds = speed_interval(*speed_class);
  if (explicit_speeds) s.speeds = *explicit_speeds;

  if (auto t = r.sub("traffic")) {
    t->opt<std::int64_t>("sessions", [&](std::int64_t v) { s.traffic.count = non_negative<std::size_t>(v, "traffic.sessions"); });
    t->opt<double>("rate", [&](double v) { s.traffic.rate = v; });
    t->opt<std::int64_t>("payload", [&](std::int64_t v) { s.traffic.payload = non_negative<std::uint32_t>(v, "traffic.payload"); });
    t->opt<double>("start_min", [&](double v) { s.traffic.start_min = seconds_value(v, "traffic.start_min"); });
    t->opt<double>("start_max", [&](double v) { s.traffic.start_max = seconds_value(v, "traffic.start_max"); });
    t->reject_unknown();
  }
  if (auto e = r.sub("energy")) {
    e->opt<double>("initial", [&](double v) { s.initial_energy = Energy::from_joules(v); });
    e->opt<double>("tx_power", [&](double v) { s.energy.tx_power = v; });
    e->opt<double>("rx_power", [&](double v) { s.energy.rx_power = v; });
    e->opt<bool>("overhear_charging", [&](bool v) { s.energy.overhear_charging = v; });
    e->reject_unknown();
  }
  if (auto l = r.sub("link")) {
    l->opt<std::int64_t>("bandwidth", [&](std::int64_t v) { s.link.bandwidth = v; });
    l->opt<std::int64_t>("queue_capacity", [&](std::int64_t v) { s.link.queue_capacity = non_negative<std::size_t>(v, "link.queue_capacity"); });
    l->opt<std::int64_t>("mac_retries", [&](std::int64_t v) { s.link.mac_retries = non_negative<std::uint32_t>(v, "link.mac_retries"); });
    l->opt<double>("broadcast_jitter_max", [&](double v) { s.link.broadcast_jitter_max = seconds_value(v, "link.broadcast_jitter_max"); });
    l->opt<std::string>("interference", [&](const std::string& v) {
      if (v == "none") s.link.interference = InterferenceMode::none;
      else if (v == "overlap") s.link.interference = InterferenceMode::overlap;
      else throw ScenarioError(ScenarioError::Kind::invalid_value, "link.interference must be none or overlap");
    });
    l->opt<double>("loss_probability", [&](double v) { s.link.loss_probability = v; });
    l->reject_unknown();
  }
  if (auto p = r.sub("routing")) {
    p->opt<double>("send_buffer_timeout", [&](double v) { s.discovery.send_buffer_timeout = seconds_value(v, "routing.send_buffer_timeout"); });
    p->opt<std::int64_t>("send_buffer_capacity", [&](std::int64_t v) { s.discovery.send_buffer_capacity = non_negative<std::size_t>(v, "routing.send_buffer_capacity"); });
    p->opt<double>("backoff_initial", [&](double v) { s.discovery.backoff_initial = seconds_value(v, "routing.backoff_initial"); });
    p->opt<double>("backoff_max", [&](double v) { s.discovery.backoff_max = seconds_value(v, "routing.backoff_max"); });
    p->reject_unknown();
  }
  if (auto d = r.sub("dsr")) {
    d->opt<std::int64_t>("max_salvage_count", [&](std::int64_t v) { s.dsr.max_salvage_count = non_negative<std::uint32_t>(v, "dsr.max_salvage_count"); });
    d->opt<bool>("reply_from_cache", [&](bool v) { s.dsr.reply_from_cache = v; });
    d->opt<bool>("cache_reply_jitter", [&](bool v) { s.dsr.cache_reply_jitter = v; });
    d->opt<std::int64_t>("max_routes_per_destination", [&](std::int64_t v) { s.dsr.max_routes_per_destination = non_negative<std::size_t>(v, "dsr.max_routes_per_destination"); });
    d->reject_unknown();
  }
  if (auto m = r.sub("mea_dsr")) {
    m->opt<double>("wait_time", [&](double v) { s.mea.wait_time = seconds_value(v, "mea_dsr.wait_time"); });
    m->opt<bool>("alternate_rrep", [&](bool v) { s.mea.alternate_rrep = v; });
    m->reject_unknown();
  }
  if (auto z = r.sub("packet_sizes")) {
    auto u32 = [](const char* key) {
      return [key](std::int64_t v) { return non_negative<std::uint32_t>(v, std::string("packet_sizes.") + key); };
    };
    z->opt<std::int64_t>("rreq_base", [&](std::int64_t v) { s.sizes.rreq_base = u32("rreq_base")(v); });
    z->opt<std::int64_t>("rrep_base", [&](std::int64_t v) { s.sizes.rrep_base = u32("rrep_base")(v); });
    z->opt<std::int64_t>("rerr", [&](std::int64_t v) { s.sizes.rerr = u32("rerr")(v); });
    z->opt<std::int64_t>("data_base", [&](std::int64_t v) { s.sizes.data_base = u32("data_base")(v); });
    z->opt<std::int64_t>("per_address", [&](std::int64_t v) { s.sizes.per_address = u32("per_address")(v); });
    z->opt<std::int64_t>("min_bat_lev_field", [&](std::int64_t v) { s.sizes.min_bat_lev_field = u32("min_bat_lev_field")(v); });
    z->reject_unknown();
  }
  r.reject_unknown();
  s.validate();
  return s;
}

inline Scenario parse_scenario(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::malformed, e.what());
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioError::Kind::io, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// Canonical form: every field spelled out, keys sorted. Seeds are not part
// of the configuration identity.
inline nlohmann::json scenario_to_json(const Scenario& s, bool include_seeds = true)
{
  nlohmann::json j;
  j["name"] = s.name;
  j["nodes"] = s.node_count;
  j["protocol"] = to_string(s.protocol);
  j["run_length"] = to_seconds(s.run_length);
  if (include_seeds) j["seeds"] = s.seeds;
  j["arena"] = {{"width", s.arena.width}, {"height", s.arena.height}, {"tx_range", s.arena.tx_range}};
  j["mobility"] = {{"pause_time", to_seconds(s.pause_time)}, {"speed_interval", {s.speeds.lo, s.speeds.hi}}};
  j["traffic"] = {{"sessions", s.traffic.count},
                  {"rate", s.traffic.rate},
                  {"payload", s.traffic.payload},
                  {"start_min", to_seconds(s.traffic.start_min)},
                  {"start_max", to_seconds(s.traffic.start_max)}};
  j["energy"] = {{"initial", s.initial_energy.joules()},
                 {"tx_power", s.energy.tx_power},
                 {"rx_power", s.energy.rx_power},
                 {"overhear_charging", s.energy.overhear_charging}};
  j["link"] = {{"bandwidth", s.link.bandwidth},
               {"queue_capacity", s.link.queue_capacity},
               {"mac_retries", s.link.mac_retries},
               {"broadcast_jitter_max", to_seconds(s.link.broadcast_jitter_max)},
               {"interference", s.link.interference == InterferenceMode::overlap ? "overlap" : "none"},
               {"loss_probability", s.link.loss_probability}};
  j["routing"] = {{"send_buffer_timeout", to_seconds(s.discovery.send_buffer_timeout)},
                  {"send_buffer_capacity", s.discovery.send_buffer_capacity},
                  {"backoff_initial", to_seconds(s.discovery.backoff_initial)},
                  {"backoff_max", to_seconds(s.discovery.backoff_max)}};
  j["dsr"] = {{"max_salvage_count", s.dsr.max_salvage_count},
              {"reply_from_cache", s.dsr.reply_from_cache},
              {"cache_reply_jitter", s.dsr.cache_reply_jitter},
              {"max_routes_per_destination", s.dsr.max_routes_per_destination}};
  j["mea_dsr"] = {{"wait_time", to_seconds(s.mea.wait_time)}, {"alternate_rrep", s.mea.alternate_rrep}};
  j["packet_sizes"] = {{"rreq_base", s.sizes.rreq_base},   {"rrep_base", s.sizes.rrep_base},
                       {"rerr", s.sizes.rerr},             {"data_base", s.sizes.data_base},
                       {"per_address", s.sizes.per_address}, {"min_bat_lev_field", s.sizes.min_bat_lev_field}};
  return j;
}

// Stable 64-bit digest of the canonical scenario, as 16 hex digits.
inline std::string config_hash(const Scenario& s)
{
  const std::string canonical = scenario_to_json(s, false).dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(canonical)));
  return buf;
}

}  // namespace meadsr

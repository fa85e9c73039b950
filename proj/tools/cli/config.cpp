#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pic::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Typed access to one JSON object that remembers which keys were consumed,
// so leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& get(const std::string& key) {
    if (!node_.contains(key)) fail(path_, "missing required key '" + key + "'");
    used_.insert(key);
    return node_.at(key);
  }

  const json* find(const std::string& key) {
    if (!node_.contains(key)) return nullptr;
    used_.insert(key);
    return &node_.at(key);
  }

  double number(const std::string& key) { return as_number(get(key), child(key)); }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_number(*v, child(key));
  }

  double number_or(const std::string& key, double fallback) {
    return optional_number(key).value_or(fallback);
  }

  std::vector<double> numbers(const std::string& key) {
    return as_numbers(get(key), child(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) fail(child(key), "expected a non-negative integer");
    return v->get<std::size_t>();
  }

  bool flag(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(child(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!used_.count(item.key())) fail(path_, "unknown key '" + item.key() + "'");
    }
  }

  std::string child(const std::string& key) const { return path_ + "/" + key; }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
    }
    return out;
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

SystemModel parse_system(const json& node) {
  const std::string path = "/system";
  if (node.is_string()) {
    const auto text = node.get<std::string>();
    constexpr std::string_view prefix = "builtin:";
    if (text.rfind(prefix, 0) != 0) {
      fail(path, "expected \"builtin:<name>\" or a parameter object");
    }
    try {
      return parse_builtin_system(std::string_view(text).substr(prefix.size()));
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  ObjectReader r(node, path);
  const auto family = r.text("family");
  SystemModel model;
  if (family == "pendulum") {
    PendulumParams p;
    p.mass = r.number_or("mass", p.mass);
    p.length = r.number_or("length", p.length);
    p.friction = r.number_or("friction", p.friction);
    p.gravity = r.number_or("gravity", p.gravity);
    p.disturbance = r.number_or("disturbance", p.disturbance);
    if (!(p.mass > 0.0) || !(p.length > 0.0)) fail(path, "mass and length must be > 0");
    model = p;
  } else if (family == "coupled_sine") {
    CoupledSineParams p;
    p.drift = r.number_or("drift", p.drift);
    p.gain_1 = r.number_or("gain_1", p.gain_1);
    p.gain_2 = r.number_or("gain_2", p.gain_2);
    p.disturbance_1 = r.number_or("disturbance_1", p.disturbance_1);
    p.disturbance_2 = r.number_or("disturbance_2", p.disturbance_2);
    model = p;
  } else if (family == "integrator_chain") {
    IntegratorChainParams p;
    p.order = r.count("order", p.order);
    p.gain = r.number_or("gain", p.gain);
    if (p.order == 0) fail(r.child("order"), "order must be >= 1");
    model = p;
  } else {
    fail(r.child("family"), "unknown family '" + family +
                                "' (expected pendulum, coupled_sine or integrator_chain)");
  }
  r.finish();
  return model;
}

std::size_t model_order(const SystemModel& model) {
  if (const auto* chain = std::get_if<IntegratorChainParams>(&model)) {
    return chain->order;
  }
  return 2;
}

BoundsSpec parse_bounds(const json& node, std::size_t n) {
  ObjectReader r(node, "/bounds");
  BoundsSpec b;
  b.k = r.numbers("k");
  b.g_lo = r.numbers("g_lo");
  b.g_hi = r.numbers("g_hi");
  b.d_bar = r.numbers("d_bar");
  b.v0_bar = r.number("v0_bar");
  b.r0 = r.number("r0");
  r.finish();
  try {
    b.validate(n);
  } catch (const std::exception& e) {
    fail("/bounds", e.what());
  }
  return b;
}

std::array<double, 2> parse_interval(ObjectReader& r, const std::string& key) {
  const auto v = r.numbers(key);
  if (v.size() != 2) fail(r.child(key), "expected [min, max]");
  return {v[0], v[1]};
}

RegionConfig parse_region(const json& node) {
  ObjectReader r(node, "/region");
  RegionConfig out;
  const auto xs = parse_interval(r, "x");
  const auto ys = parse_interval(r, "y");
  out.grid.x_min = xs[0];
  out.grid.x_max = xs[1];
  out.grid.y_min = ys[0];
  out.grid.y_max = ys[1];
  if (const json* g = r.find("grid")) {
    if (!g->is_array() || g->size() != 2 || !(*g)[0].is_number_unsigned() ||
        !(*g)[1].is_number_unsigned()) {
      fail("/region/grid", "expected [nx, ny] with non-negative integers");
    }
    out.grid.nx = (*g)[0].get<std::size_t>();
    out.grid.ny = (*g)[1].get<std::size_t>();
  }
  if (const json* probes = r.find("probes")) {
    if (!probes->is_array()) fail("/region/probes", "expected an array of [x, y]");
    for (std::size_t i = 0; i < probes->size(); ++i) {
      const std::string path = "/region/probes/" + std::to_string(i);
      const auto pt = ObjectReader::as_numbers((*probes)[i], path);
      if (pt.size() != 2) fail(path, "expected [x, y]");
      out.probes.push_back({pt[0], pt[1]});
    }
  }
  r.finish();
  try {
    out.grid.validate();
  } catch (const std::exception& e) {
    fail("/region", e.what());
  }
  return out;
}

std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

}  // namespace

std::string system_label(const SystemModel& model) {
  struct Visitor {
    std::string operator()(BuiltinSystem b) const {
      return "builtin:" + std::string(to_string(b));
    }
    std::string operator()(const PendulumParams&) const { return "pendulum"; }
    std::string operator()(const CoupledSineParams&) const { return "coupled_sine"; }
    std::string operator()(const IntegratorChainParams&) const {
      return "integrator_chain";
    }
  };
  return std::visit(Visitor{}, model);
}

SystemSpec build_system(const SystemModel& model) {
  struct Visitor {
    SystemSpec operator()(BuiltinSystem b) const { return builtin_system(b).system; }
    SystemSpec operator()(const PendulumParams& p) const { return pendulum_system(p); }
    SystemSpec operator()(const CoupledSineParams& p) const {
      return coupled_sine_system(p);
    }
    SystemSpec operator()(const IntegratorChainParams& p) const {
      return integrator_chain_system(p);
    }
  };
  return std::visit(Visitor{}, model);
}

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    if (const auto pos = what.find(": "); pos != std::string::npos) {
      what = what.substr(pos + 2);
    }
    throw ConfigError(std::string(source) + ":" + locate(text, at) +
                      ": malformed JSON: " + what);
  }

  try {
    ObjectReader r(root, "");
    ScenarioConfig cfg;
    cfg.system = parse_system(r.get("system"));
    const std::size_t n = model_order(cfg.system);
    const bool builtin = std::holds_alternative<BuiltinSystem>(cfg.system);
    std::optional<BuiltinScenario> defaults;
    if (builtin) defaults = builtin_system(std::get<BuiltinSystem>(cfg.system));

    if (const json* ref = r.find("reference")) {
      ObjectReader rr(*ref, "/reference");
      cfg.reference.amplitude = rr.number("amplitude");
      cfg.reference.frequency = rr.number("frequency");
      rr.finish();
    } else if (defaults) {
      cfg.reference = defaults->reference_params;
    } else {
      fail("", "missing required key 'reference' (only built-in systems have a default)");
    }

    {
      ObjectReader rc(r.get("controller"), "/controller");
      const std::string mode = rc.has("funnel_mode") ? rc.text("funnel_mode") : "explicit";
      if (mode == "explicit") {
        cfg.funnel_mode = FunnelMode::fixed;
      } else if (mode == "offset") {
        cfg.funnel_mode = FunnelMode::offset;
      } else {
        fail("/controller/funnel_mode", "expected \"explicit\" or \"offset\"");
      }
      const json& stages = rc.get("stages");
      if (!stages.is_array()) fail("/controller/stages", "expected an array");
      if (stages.size() != n) {
        fail("/controller/stages", "system order is " + std::to_string(n) +
                                       " but " + std::to_string(stages.size()) +
                                       " stages are given");
      }
      for (std::size_t i = 0; i < stages.size(); ++i) {
        const std::string path = "/controller/stages/" + std::to_string(i);
        ObjectReader rs(stages[i], path);
        StageConfig s;
        s.v_bar = rs.number("v_bar");
        s.c = rs.number_or("c", kLinearShape);
        s.q = rs.number("q");
        s.mu = rs.number("mu");
        s.p = rs.optional_number("p");
        s.delta = rs.optional_number("delta");
        rs.finish();
        if (cfg.funnel_mode == FunnelMode::fixed && !s.p) {
          fail(path, "explicit funnel mode requires 'p'");
        }
        if (cfg.funnel_mode == FunnelMode::offset) {
          if (!s.delta) fail(path, "offset funnel mode requires 'delta'");
          if (s.p) fail(path, "offset funnel mode derives 'p'; remove it");
        }
        cfg.stages.push_back(s);
      }
      rc.finish();
    }

    if (const json* b = r.find("bounds")) cfg.bounds = parse_bounds(*b, n);

    {
      ObjectReader rs(r.get("sim"), "/sim");
      if (rs.has("x0")) {
        cfg.sim.x0 = rs.numbers("x0");
      } else if (defaults) {
        cfg.sim.x0 = defaults->x0;
      } else {
        fail("/sim", "missing required key 'x0'");
      }
      if (cfg.sim.x0.size() != n) {
        fail("/sim/x0", "expected " + std::to_string(n) + " entries");
      }
      cfg.sim.horizon = rs.number_or("horizon", cfg.sim.horizon);
      cfg.sim.step = rs.number_or("step", cfg.sim.step);
      cfg.sim.substeps = rs.count("substeps", cfg.sim.substeps);
      cfg.sim.permissive = rs.flag("permissive", cfg.sim.permissive);
      rs.finish();
    }

    if (const json* reg = r.find("region")) cfg.region = parse_region(*reg);
    r.finish();

    build_scenario(cfg);  // value-level checks (funnels, step, horizon, ...)
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string dump_config(const ScenarioConfig& cfg) {
  ordered_json root = ordered_json::object();
  struct SystemVisitor {
    ordered_json operator()(BuiltinSystem b) const {
      return "builtin:" + std::string(to_string(b));
    }
    ordered_json operator()(const PendulumParams& p) const {
      return {{"family", "pendulum"}, {"mass", p.mass}, {"length", p.length},
              {"friction", p.friction}, {"gravity", p.gravity},
              {"disturbance", p.disturbance}};
    }
    ordered_json operator()(const CoupledSineParams& p) const {
      return {{"family", "coupled_sine"}, {"drift", p.drift}, {"gain_1", p.gain_1},
              {"gain_2", p.gain_2}, {"disturbance_1", p.disturbance_1},
              {"disturbance_2", p.disturbance_2}};
    }
    ordered_json operator()(const IntegratorChainParams& p) const {
      return {{"family", "integrator_chain"}, {"order", p.order}, {"gain", p.gain}};
    }
  };
  root["system"] = std::visit(SystemVisitor{}, cfg.system);
  root["reference"] = {{"amplitude", cfg.reference.amplitude},
                       {"frequency", cfg.reference.frequency}};

  ordered_json stages = ordered_json::array();
  for (const auto& s : cfg.stages) {
    ordered_json st = {{"v_bar", s.v_bar}, {"c", s.c}, {"q", s.q}, {"mu", s.mu}};
    if (s.p) st["p"] = *s.p;
    if (s.delta) st["delta"] = *s.delta;
    stages.push_back(st);
  }
  root["controller"] = {
      {"funnel_mode", cfg.funnel_mode == FunnelMode::fixed ? "explicit" : "offset"},
      {"stages", stages}};

  if (cfg.bounds) {
    const auto& b = *cfg.bounds;
    root["bounds"] = {{"k", b.k},           {"g_lo", b.g_lo},     {"g_hi", b.g_hi},
                      {"d_bar", b.d_bar},   {"v0_bar", b.v0_bar}, {"r0", b.r0}};
  }
  root["sim"] = {{"x0", cfg.sim.x0},
                 {"horizon", cfg.sim.horizon},
                 {"step", cfg.sim.step},
                 {"substeps", cfg.sim.substeps},
                 {"permissive", cfg.sim.permissive}};
  if (cfg.region) {
    const auto& g = cfg.region->grid;
    ordered_json probes = ordered_json::array();
    for (const auto& pt : cfg.region->probes) probes.push_back({pt[0], pt[1]});
    root["region"] = {{"x", {g.x_min, g.x_max}},
                      {"y", {g.y_min, g.y_max}},
                      {"grid", {g.nx, g.ny}},
                      {"probes", probes}};
  }
  return root.dump(2) + "\n";
}

ScenarioConfig default_config(BuiltinSystem which) {
  ScenarioConfig cfg;
  cfg.system = which;
  const auto builtin = builtin_system(which);
  cfg.reference = builtin.reference_params;
  cfg.funnel_mode = FunnelMode::fixed;
  cfg.sim.x0 = builtin.x0;
  cfg.sim.horizon = 20.0;
  cfg.sim.step = 1e-3;
  cfg.sim.substeps = 10;
  RegionConfig region;
  region.grid = RegionGrid{-2.0, 2.0, -2.0, 2.0, 201, 201};

  switch (which) {
    case BuiltinSystem::pendulum_ex1:
      cfg.stages = {
          {4.5, kLinearShape, 0.05, 0.9, 1.0, 0.5},
          {8.0, kLinearShape, 0.05, 1.0, 1.4, 0.1},
      };
      cfg.bounds = BoundsSpec{{0.0, 9.8 * std::sqrt(2.0)},
                              {1.0, 100.0},
                              {1.0, 100.0},
                              {0.0, 0.5},
                              1.0,
                              0.5};
      region.probes = {{-0.5, 1.0}};
      break;
    case BuiltinSystem::nonlinear_ex2:
      cfg.stages = {
          {1.0, kLinearShape, 0.08, 0.9, 1.0, 0.5},
          {16.0, kLinearShape, 0.01, 0.5, 0.4, 0.1},
      };
      cfg.bounds = BoundsSpec{{0.5, 1.0}, {5.0, 7.0}, {5.0, 7.0}, {0.2, 0.5}, 0.5, 0.5};
      region.probes = {{0.5, -0.8}, {0.2, -0.8}};
      break;
  }
  cfg.region = region;
  return cfg;
}

ResolvedParameters resolve_controller(const ScenarioConfig& cfg) {
  const double y_d0 = sine_reference(cfg.reference).y_d(0.0);
  try {
    if (cfg.funnel_mode == FunnelMode::offset) {
      std::vector<OffsetStage> stages;
      for (const auto& s : cfg.stages) {
        stages.push_back({s.v_bar, s.c, s.delta.value(), s.q, s.mu});
      }
      return resolve_offset_funnels(stages, cfg.sim.x0, y_d0);
    }
    ResolvedParameters out;
    for (const auto& s : cfg.stages) {
      out.config.stages.push_back({s.v_bar, s.c, FunnelParams{s.p.value(), s.q, s.mu}});
    }
    out.config.validate();
    const auto initial = cascade(cfg.sim.x0, 0.0, out.config, y_d0);
    out.z0 = initial.z;
    return out;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("/controller: ") + e.what());
  } catch (const std::bad_optional_access&) {
    throw ConfigError("/controller: stage is missing its funnel width parameter");
  }
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  Scenario s;
  s.system = build_system(cfg.system);
  s.reference = sine_reference(cfg.reference);
  s.controller = resolve_controller(cfg).config;
  s.bounds = cfg.bounds;
  s.x0 = cfg.sim.x0;
  s.horizon = cfg.sim.horizon;
  s.step = cfg.sim.step;
  s.substeps = cfg.sim.substeps;
  s.permissive = cfg.sim.permissive;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("/sim: ") + e.what());
  }
  return s;
}

RegionTemplate build_region_template(const ScenarioConfig& cfg) {
  if (!cfg.bounds) throw ConfigError("/bounds: required for the region sweep");
  RegionTemplate tmpl;
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const auto& s = cfg.stages[i];
    if (!s.delta) {
      throw ConfigError("/controller/stages/" + std::to_string(i) +
                        ": region template is missing 'delta'");
    }
    tmpl.stages.push_back({s.v_bar, s.c, *s.delta, s.q, s.mu});
  }
  tmpl.bounds = *cfg.bounds;
  tmpl.reference_at_zero = sine_reference(cfg.reference).y_d(0.0);
  try {
    tmpl.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("/region: ") + e.what());
  }
  return tmpl;
}

}  // namespace pic::cli

#include "cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "cli/config.hpp"
#include "pic/csv.hpp"
#include "pic/feasibility.hpp"
#include "pic/simulator.hpp"

namespace pic::cli {

namespace {

constexpr int kReportPrecision = 12;
constexpr double kSpotCheckHalfWidth = 2.0;
constexpr std::size_t kSpotCheckSamples = 101;

void apply_overrides(ScenarioConfig& cfg, const CommandOptions& opts) {
  if (opts.step) cfg.sim.step = *opts.step;
  if (opts.horizon) cfg.sim.horizon = *opts.horizon;
  if (opts.permissive) cfg.sim.permissive = true;
  if (opts.grid) {
    if (!cfg.region) throw ConfigError("--grid given but the config has no region section");
    cfg.region->grid.nx = opts.grid->first;
    cfg.region->grid.ny = opts.grid->second;
  }
}

void print_report(std::ostream& out, const FeasibilityReport& report) {
  out << std::setw(6) << "stage" << std::setw(20) << "varphi" << std::setw(20)
      << "rhs" << std::setw(20) << "margin" << std::setw(20) << "r"
      << std::setw(20) << "p-|z(0)|" << "  status\n";
  for (std::size_t i = 0; i < report.stages.size(); ++i) {
    const auto& s = report.stages[i];
    out << std::setw(6) << i + 1 << std::setw(20) << s.varphi << std::setw(20)
        << s.rhs << std::setw(20) << s.margin << std::setw(20) << s.rate_bound
        << std::setw(20) << s.trivial_margin << "  ";
    if (s.feasible()) {
      out << "ok";
    } else {
      if (!(s.margin > 0.0)) out << "margin-condition-failed ";
      if (!(s.trivial_margin > 0.0)) out << "trivial-condition-failed";
    }
    out << '\n';
  }
}

void print_spot_check(std::ostream& out, const ScenarioConfig& cfg) {
  const auto system = build_system(cfg.system);
  const auto check = spot_check_growth(system, cfg.bounds->k, kSpotCheckHalfWidth,
                                       kSpotCheckSamples);
  out << "growth spot-check on [-" << kSpotCheckHalfWidth << ", "
      << kSpotCheckHalfWidth << "]^i (Euclidean norm):\n";
  for (std::size_t i = 0; i < check.worst_ratio.size(); ++i) {
    out << "  stage " << i + 1 << ": max |f|/||xi|| = " << check.worst_ratio[i]
        << " vs k = " << cfg.bounds->k[i];
    if (check.holds[i]) {
      out << " (holds)";
    } else {
      out << " (EXCEEDED at xi = [";
      for (std::size_t j = 0; j < check.witness[i].size(); ++j) {
        out << (j ? ", " : "") << check.witness[i][j];
      }
      out << "])";
    }
    out << "; g in [" << check.g_min[i] << ", " << check.g_max[i] << "] vs ["
        << cfg.bounds->g_lo[i] << ", " << cfg.bounds->g_hi[i] << "]\n";
  }
}

void print_family(std::ostream& out, const char* name, const BoundFamily& f) {
  out << "  " << std::left << std::setw(12) << name << std::right;
  for (std::size_t i = 0; i < f.worst_margin.size(); ++i) {
    out << "  stage " << i + 1 << ": worst margin " << f.worst_margin[i]
        << ", violations " << f.violations[i] << ';';
  }
  out << '\n';
}

bool write_file(const std::filesystem::path& path, std::ostream& err,
                const auto& writer) {
  std::ofstream file(path);
  if (!file) {
    err << "error: cannot write " << path.string() << '\n';
    return false;
  }
  writer(file);
  return static_cast<bool>(file);
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> parse_grid(std::string_view text) {
  const auto sep = text.find('x');
  if (sep == std::string_view::npos) return std::nullopt;
  std::size_t nx = 0;
  std::size_t ny = 0;
  const auto lhs = text.substr(0, sep);
  const auto rhs = text.substr(sep + 1);
  auto [p1, e1] = std::from_chars(lhs.data(), lhs.data() + lhs.size(), nx);
  auto [p2, e2] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), ny);
  if (e1 != std::errc{} || e2 != std::errc{} || p1 != lhs.data() + lhs.size() ||
      p2 != rhs.data() + rhs.size() || lhs.empty() || rhs.empty()) {
    return std::nullopt;
  }
  return std::pair{nx, ny};
}

int cmd_check(const std::filesystem::path& config, std::ostream& out,
              std::ostream& err) {
  ScenarioConfig cfg;
  ResolvedParameters resolved;
  try {
    cfg = load_config(config);
    if (!cfg.bounds) throw ConfigError("/bounds: required for check");
    resolved = resolve_controller(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto report = check_feasibility(resolved.config, *cfg.bounds, resolved.z0);
  out << std::setprecision(kReportPrecision);
  out << "system: " << system_label(cfg.system) << " (order " << cfg.order()
      << "), funnel mode: "
      << (cfg.funnel_mode == FunnelMode::fixed ? "explicit" : "offset") << '\n';
  out << "initial widths p:";
  for (const auto& s : resolved.config.stages) out << ' ' << s.funnel.p;
  out << "\ninitial errors z(0):";
  for (double z : resolved.z0) out << ' ' << z;
  out << '\n';
  print_report(out, report);
  print_spot_check(out, cfg);
  out << "verdict: " << (report.feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';
  return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const std::filesystem::path& config, const CommandOptions& opts,
                 std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  Scenario scenario;
  std::vector<double> z0;
  try {
    cfg = load_config(config);
    apply_overrides(cfg, opts);
    scenario = build_scenario(cfg);
    z0 = resolve_controller(cfg).z0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  out << std::setprecision(kReportPrecision);

  if (scenario.bounds) {
    const auto report = check_feasibility(scenario.controller, *scenario.bounds, z0);
    if (!report.feasible) {
      if (!scenario.permissive) {
        err << "error: scenario is not certified feasible; rerun with "
               "--permissive to simulate anyway\n";
        print_report(err, report);
        return kExitInfeasible;
      }
      out << "warning: scenario is not certified feasible (permissive run)\n";
    }
  }

  Trajectory trajectory;
  try {
    trajectory = simulate(scenario);
  } catch (const std::exception& e) {
    err << "simulation failed: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << opts.out_dir.string() << ": " << ec.message() << '\n';
    return kExitRuntime;
  }
  bool ok = write_file(opts.out_dir / "trajectory.csv", err,
                       [&](std::ostream& os) { write_trajectory_csv(os, trajectory); });
  ok = ok && write_file(opts.out_dir / "events.csv", err,
                        [&](std::ostream& os) { write_events_csv(os, trajectory); });

  out << "samples: " << trajectory.samples.size() << ", events: "
      << trajectory.events.size() << '\n';
  double max_input = 0.0;
  double max_theta1 = 0.0;
  for (const auto& s : trajectory.samples) {
    max_input = std::max(max_input, std::abs(s.u.back()));
    max_theta1 = std::max(max_theta1, std::abs(s.theta.front()));
  }
  out << "max |u|: " << max_input << " (bound " << scenario.controller.input_bound()
      << "), max |z_1|/psi_1: " << max_theta1 << '\n';

  int code = kExitOk;
  if (scenario.bounds) {
    const auto report = monitor(trajectory, scenario.controller, *scenario.bounds);
    ok = ok && write_file(opts.out_dir / "monitor.csv", err, [&](std::ostream& os) {
      write_monitor_csv(os, report, trajectory);
    });
    out << "monitor:\n";
    print_family(out, "performance", report.performance);
    print_family(out, "input", report.input);
    print_family(out, "state", report.state);
    print_family(out, "rate", report.rate);
    out << "total violations: " << report.total_violations() << '\n';
    if (report.total_violations() > 0) code = kExitInfeasible;
  } else {
    out << "no bounds section: monitors skipped\n";
  }
  if (!ok) return kExitRuntime;
  out << "wrote " << (opts.out_dir / "trajectory.csv").string() << '\n';
  return code;
}

int cmd_region(const std::filesystem::path& config, const CommandOptions& opts,
               std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  RegionTemplate tmpl;
  try {
    cfg = load_config(config);
    apply_overrides(cfg, opts);
    if (!cfg.region) throw ConfigError("/region: required for the region sweep");
    cfg.region->grid.validate();
    tmpl = build_region_template(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto map = feasible_region(cfg.region->grid, tmpl);
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << opts.out_dir.string() << ": " << ec.message() << '\n';
    return kExitRuntime;
  }
  if (!write_file(opts.out_dir / "region.csv", err,
                  [&](std::ostream& os) { write_region_csv(os, map); })) {
    return kExitRuntime;
  }

  out << std::setprecision(kReportPrecision);
  out << "grid: " << map.grid.nx << "x" << map.grid.ny << " over [" << map.grid.x_min
      << ", " << map.grid.x_max << "] x [" << map.grid.y_min << ", " << map.grid.y_max
      << "]\n";
  out << "feasible cells: " << map.feasible_count() << " / " << map.cells.size()
      << " (fraction " << map.feasible_fraction() << ")\n";
  for (const auto& probe : cfg.region->probes) {
    const auto cell = evaluate_initial_state(tmpl, probe[0], probe[1]);
    out << "probe (" << probe[0] << ", " << probe[1]
        << "): " << (cell.feasible ? "member" : "NOT a member")
        << " (margin C1 " << cell.margin_c1 << ", C2 " << cell.margin_c2 << ")\n";
  }
  out << "wrote " << (opts.out_dir / "region.csv").string() << '\n';
  return kExitOk;
}

int cmd_dump_defaults(std::string_view name, std::ostream& out, std::ostream& err) {
  try {
    out << dump_config(default_config(parse_builtin_system(name)));
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace pic::cli

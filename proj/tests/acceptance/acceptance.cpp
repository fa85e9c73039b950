// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "pic/controller.hpp"
#include "pic/feasibility.hpp"
#include "pic/funnel.hpp"
#include "pic/simulator.hpp"

using namespace pic;
using namespace pic::cli;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(PIC_SOURCE_DIR) / "configs";

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(b), 1.0);
}

// Hand evaluation of the two-stage recursion for the bundled pendulum numbers,
// written out term by term in long double.
struct HandExample1 {
  long double varphi1, margin1, r1, varphi2, margin2;
};

HandExample1 hand_example1() {
  const long double p1 = 1.0L, p2 = 1.4L, q1 = 0.05L, q2 = 0.05L;
  const long double mu1 = 0.9L, mu2 = 1.0L;
  const long double v0 = 1.0L, v1 = 4.5L, v2 = 8.0L, r0 = 0.5L;
  const long double k1 = 0.0L, k2 = 9.8L * std::sqrt(2.0L);
  const long double glo1 = 1.0L, ghi1 = 1.0L, glo2 = 100.0L, ghi2 = 100.0L;
  const long double d1 = 0.0L, d2 = 0.5L;
  HandExample1 h{};
  h.varphi1 = k1 * std::abs(p1 + v0) + d1 + ghi1 * p2 + ghi1 * v1 + r0;
  h.margin1 = (ghi1 + glo1) * v1 + mu1 * (q1 - p1) - h.varphi1;
  // With c = pi/2 the stage gain is constant: -v_bar.
  h.r1 = (h.varphi1 / q1 + mu1 * (p1 - q1) / p1) * v1;
  const long double a = p1 + v0, b = p2 + v1;
  h.varphi2 = k2 * std::sqrt(a * a + b * b) + d2 + ghi2 * v2 + h.r1;
  h.margin2 = (ghi2 + glo2) * v2 + mu2 * (q2 - p2) - h.varphi2;
  return h;
}

Outcome criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = load_config(kConfigs / "ex1_pendulum.json");
  const auto resolved = resolve_controller(cfg);
  const auto report = check_feasibility(resolved.config, *cfg.bounds, resolved.z0);
  const double elapsed = seconds_since(start);

  const auto hand = hand_example1();
  o.require(close_rel(static_cast<double>(hand.varphi1), 6.4, 1e-12), "hand varphi_1 = 6.4");
  o.require(close_rel(static_cast<double>(hand.margin1), 1.745, 1e-12), "hand margin_1 = 1.745");
  const auto& s1 = report.stages[0];
  const auto& s2 = report.stages[1];
  o.require(close_rel(s1.varphi, 6.4, 1e-9), "varphi_1");
  o.require(close_rel(s1.margin, 1.745, 1e-9), "margin_1");
  o.require(close_rel(s1.rate_bound, static_cast<double>(hand.r1), 1e-9), "r_1 vs hand");
  o.require(close_rel(s2.varphi, static_cast<double>(hand.varphi2), 1e-9), "varphi_2 vs hand");
  o.require(close_rel(s2.margin, static_cast<double>(hand.margin2), 1e-9), "margin_2 vs hand");
  o.require(s2.margin > 0.0, "margin_2 > 0");
  o.require(report.feasible, "verdict feasible");
  o.require(elapsed < 1.0, "runtime < 1 s");
  o.detail << "varphi_1=" << s1.varphi << " margin_1=" << s1.margin
           << " margin_2=" << s2.margin << " runtime=" << elapsed << "s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto cfg = load_config(kConfigs / "ex1_pendulum.json");
  const auto scenario = build_scenario(cfg);
  o.require(scenario.horizon == 20.0 && scenario.step == 1e-3, "horizon 20 s, step 1e-3");
  const auto start = std::chrono::steady_clock::now();
  const auto traj = simulate(scenario);
  const auto report = monitor(traj, scenario.controller, *scenario.bounds);
  const double elapsed = seconds_since(start);

  const auto& f1 = scenario.controller.stages[0].funnel;
  double worst_ratio = 0.0, max_u = 0.0, late_z = 0.0;
  bool inside = true;
  for (const auto& s : traj.samples) {
    const double z1 = std::abs(s.z[0]);
    inside = inside && z1 < funnel_value(f1, s.t);
    worst_ratio = std::max(worst_ratio, z1 / s.psi[0]);
    max_u = std::max(max_u, std::abs(s.u.back()));
    if (s.t >= 10.0) late_z = std::max(late_z, z1);
  }
  o.require(traj.samples.size() == 20001, "20001 samples");
  o.require(inside, "|z_1| < psi_1");
  o.require(max_u < 8.0, "|u| < 8");
  o.require(late_z < 0.0502, "|z_1| < 0.0502 for t >= 10");
  o.require(report.total_violations() == 0, "zero monitor violations");
  o.require(elapsed < 10.0, "runtime < 10 s");
  o.detail << "max|z_1|/psi_1=" << worst_ratio << " max|u|=" << max_u
           << " max|z_1|(t>=10)=" << late_z << " violations=" << report.total_violations()
           << " runtime=" << elapsed << "s";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto cfg = load_config(kConfigs / "ex2_nonlinear.json");
  const auto scenario = build_scenario(cfg);
  o.require(scenario.horizon == 20.0, "horizon 20 s");
  const auto start = std::chrono::steady_clock::now();
  const auto traj = simulate(scenario);
  const double elapsed = seconds_since(start);

  double worst_ratio = 0.0, max_u = 0.0;
  bool inside = true;
  for (const auto& s : traj.samples) {
    const double bound = (1.0 - 0.08) * std::exp(-0.9 * s.t) + 0.08;
    const double z1 = std::abs(s.z[0]);
    inside = inside && z1 < bound;
    worst_ratio = std::max(worst_ratio, z1 / bound);
    max_u = std::max(max_u, std::abs(s.u.back()));
  }
  o.require(inside, "|z_1| < 0.92 e^{-0.9t} + 0.08");
  o.require(max_u < 16.0, "|u| < 16");
  o.require(elapsed < 10.0, "runtime < 10 s");
  o.detail << "max|z_1|/bound=" << worst_ratio << " max|u|=" << max_u
           << " runtime=" << elapsed << "s";
  return o;
}

bool sweep_matches_points(const RegionMap& map, const RegionTemplate& tmpl) {
  for (std::size_t iy = 0; iy < map.grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.grid.nx; ++ix) {
      const auto& cell = map.at(ix, iy);
      const auto point = evaluate_initial_state(tmpl, map.grid.x(ix), map.grid.y(iy));
      if (cell.feasible != point.feasible || cell.margin_c1 != point.margin_c1 ||
          cell.margin_c2 != point.margin_c2) {
        return false;
      }
    }
  }
  return true;
}

Outcome criterion4() {
  Outcome o;
  const auto cfg1 = load_config(kConfigs / "ex1_pendulum.json");
  const auto tmpl1 = build_region_template(cfg1);
  RegionGrid grid;  // 201 x 201 on [-2, 2]^2
  o.require(cfg1.region && cfg1.region->grid.nx == 201 && cfg1.region->grid.ny == 201,
            "bundled grid is 201x201");
  const auto start = std::chrono::steady_clock::now();
  const auto map1 = feasible_region(grid, tmpl1);
  const double elapsed = seconds_since(start);

  const auto probe1 = evaluate_initial_state(tmpl1, -0.5, 1.0);
  const auto& cell1 = map1.at(75, 150);
  o.require(map1.feasible_count() > 0, "region nonempty");
  o.require(probe1.feasible, "(-0.5, 1) feasible");
  o.require(std::abs(grid.x(75) + 0.5) < 1e-12 && std::abs(grid.y(150) - 1.0) < 1e-12,
            "grid node at (-0.5, 1)");
  o.require(cell1.feasible, "sweep cell at (-0.5, 1) feasible");
  o.require(sweep_matches_points(map1, tmpl1), "ex1 point/sweep agreement");
  o.require(elapsed < 60.0, "runtime < 60 s");

  const auto cfg2 = load_config(kConfigs / "ex2_nonlinear.json");
  const auto tmpl2 = build_region_template(cfg2);
  const auto map2 = feasible_region(grid, tmpl2);
  o.require(sweep_matches_points(map2, tmpl2), "ex2 point/sweep agreement");
  const auto a = evaluate_initial_state(tmpl2, 0.5, -0.8);
  const auto b = evaluate_initial_state(tmpl2, 0.2, -0.8);
  o.require(map2.at(125, 60).feasible == a.feasible, "ex2 sweep cell (0.5,-0.8)");
  o.require(map2.at(110, 60).feasible == b.feasible, "ex2 sweep cell (0.2,-0.8)");

  auto membership = [](const RegionCell& c) {
    std::ostringstream s;
    s << (c.feasible ? "member" : "NOT member") << " (C1 " << c.margin_c1 << ", C2 "
      << c.margin_c2 << ")";
    return s.str();
  };
  o.detail << "ex1 fraction=" << map1.feasible_fraction() << " (-0.5,1) "
           << membership(probe1) << " runtime=" << elapsed << "s; ex2 fraction="
           << map2.feasible_fraction() << " (0.5,-0.8) " << membership(a)
           << " (0.2,-0.8) " << membership(b);
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(20261019);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  constexpr std::size_t kCases = 20000;
  std::size_t odd = 0, monotone = 0, bounded = 0, gain = 0, fd = 0, linear = 0;
  for (std::size_t n = 0; n < kCases; ++n) {
    const StageControllerParams stage{uniform(0.1, 50.0), uniform(0.05, 5.0), {}};
    const double theta = uniform(-0.999, 0.999);
    const double u = stage_control(theta, stage);
    if (std::abs(u + stage_control(-theta, stage)) > 1e-12 * stage.v_bar) ++odd;

    const double other = uniform(-0.999, 0.999);
    if (other != theta) {
      const double lo = std::min(theta, other), hi = std::max(theta, other);
      if (!(stage_control(lo, stage) > stage_control(hi, stage))) ++monotone;
    }
    if (!(std::abs(u) < stage.v_bar)) ++bounded;

    const double phi = stage_gain(theta, stage);
    const auto range = gain_range(stage);
    const double slack = 1e-12 * std::abs(range.lo);
    if (!(phi < 0.0) || phi < range.lo - slack || phi > range.hi + slack) ++gain;

    const double h = 1e-6;
    const double central = (stage_control(theta + h, stage) - stage_control(theta - h, stage)) / (2 * h);
    if (std::abs(central - phi) > 1e-6 * std::max(1.0, std::abs(phi))) ++fd;

    const StageControllerParams straight{stage.v_bar, kLinearShape, {}};
    if (std::abs(stage_control(theta, straight) + stage.v_bar * theta) > 1e-12 * stage.v_bar) {
      ++linear;
    }
  }
  o.require(odd == 0, "odd symmetry");
  o.require(monotone == 0, "strict decrease");
  o.require(bounded == 0, "|u| < v_bar");
  o.require(gain == 0, "gain negative and inside range");
  o.require(fd == 0, "finite-difference gain");
  o.require(linear == 0, "linear collapse at c = pi/2");
  o.detail << kCases << " cases; failures odd=" << odd << " monotone=" << monotone
           << " bound=" << bounded << " gain=" << gain << " fd=" << fd
           << " linear=" << linear;
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  constexpr std::size_t kCases = 20000;
  std::size_t range = 0, rate = 0, fd = 0;
  for (std::size_t n = 0; n < kCases; ++n) {
    const double q = uniform(0.001, 1.0);
    const FunnelParams f{q + uniform(0.0, 5.0), q, uniform(0.01, 5.0)};
    const double t = uniform(0.0, 30.0);
    const double psi = funnel_value(f, t);
    if (psi < f.q || psi > f.p) ++range;
    const double d = funnel_rate(f, t);
    const auto bounds = funnel_rate_bounds(f);
    if (d < bounds.lo || d > bounds.hi) ++rate;
    const double h = 1e-6;
    const double central = t >= h ? (funnel_value(f, t + h) - funnel_value(f, t - h)) / (2 * h)
                                  : (funnel_value(f, t + h) - psi) / h;
    if (std::abs(central - d) > 1e-6 * std::max(1.0, std::abs(d))) ++fd;
  }
  o.require(range == 0, "psi in [q, p]");
  o.require(rate == 0, "rate in [mu(q-p), 0]");
  o.require(fd == 0, "finite-difference rate");
  o.detail << kCases << " cases; failures range=" << range << " rate=" << rate
           << " fd=" << fd;
  return o;
}

Outcome criterion7() {
  Outcome o;
  auto scenario = build_scenario(load_config(kConfigs / "ex1_pendulum.json"));
  scenario.horizon = 2.0;
  auto final_state = [&](std::size_t substeps) {
    scenario.substeps = substeps;
    return simulate(scenario).samples.back().xi;
  };
  const auto reference = final_state(100);  // h = 1e-5
  auto error = [&](std::size_t substeps) {
    const auto x = final_state(substeps);
    return std::max(std::abs(x[0] - reference[0]), std::abs(x[1] - reference[1]));
  };
  const double coarse = error(4);  // h = 2.5e-4
  const double fine = error(8);    // h = 1.25e-4
  const double ratio = coarse / fine;
  o.require(coarse > 0.0 && ratio >= 12.0, "error ratio >= 12");
  o.detail << "err(h=2.5e-4)=" << coarse << " err(h=1.25e-4)=" << fine
           << " ratio=" << ratio;
  return o;
}

Outcome criterion8() {
  Outcome o;
  Scenario s;
  s.system = integrator_chain_system({2, 1.0});
  s.reference = sine_reference({0.0, 1.0});
  s.controller = {{{1.0, kLinearShape, FunnelParams{1.0, 0.1, 1.0}},
                   {1.0, kLinearShape, FunnelParams{1.0, 0.1, 1.0}}}};
  s.x0 = {0.0, 0.0};
  s.horizon = 20.0;
  s.step = 1e-3;
  const auto traj = simulate(s);
  bool zero = true;
  for (const auto& sample : traj.samples) {
    for (std::size_t i = 0; i < 2; ++i) {
      zero = zero && sample.xi[i] == 0.0 && sample.u[i] == 0.0 && sample.z[i] == 0.0;
    }
  }
  o.require(traj.samples.size() == 20001, "full horizon recorded");
  o.require(zero, "state and input exactly 0");
  o.require(traj.events.empty(), "no events");
  o.detail << traj.samples.size() << " samples, all exactly zero=" << (zero ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 example-1 feasibility", criterion1},
      {"2 example-1 simulation", criterion2},
      {"3 example-2 simulation", criterion3},
      {"4 region sweep", criterion4},
      {"5 controller properties", criterion5},
      {"6 funnel properties", criterion6},
      {"7 step-halving order", criterion7},
      {"8 identity closed loop", criterion8},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

#include "pic/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pic {

namespace {

void require_entries(const std::vector<double>& values, std::size_t n,
                     const char* name) {
  if (values.size() != n) {
    throw std::invalid_argument(std::string("bounds: ") + name + " has " +
                                std::to_string(values.size()) +
                                " entries, expected " + std::to_string(n));
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string("bounds: ") + name +
                                  " entries must be finite and >= 0");
    }
  }
}

void require_stage(std::size_t stage, std::size_t n) {
  if (stage < 1 || stage > n) {
    throw std::out_of_range("stage index " + std::to_string(stage) +
                            " outside 1.." + std::to_string(n));
  }
}

std::vector<double> initial_bounds(const CascadeConfig& config) {
  std::vector<double> p;
  p.reserve(config.order());
  for (const auto& s : config.stages) p.push_back(s.funnel.p);
  return p;
}

std::vector<double> input_bounds_with_v0(const CascadeConfig& config,
                                         double v0_bar) {
  std::vector<double> v{v0_bar};
  for (const auto& s : config.stages) v.push_back(s.v_bar);
  return v;
}

}  // namespace

void BoundsSpec::validate(std::size_t n) const {
  require_entries(k, n, "k");
  require_entries(g_lo, n, "g_lo");
  require_entries(g_hi, n, "g_hi");
  require_entries(d_bar, n, "d_bar");
  for (std::size_t i = 0; i < n; ++i) {
    if (g_lo[i] > g_hi[i]) {
      throw std::invalid_argument("bounds: g_lo exceeds g_hi at stage " +
                                  std::to_string(i + 1));
    }
  }
  if (!std::isfinite(v0_bar) || v0_bar < 0.0 || !std::isfinite(r0) ||
      r0 < 0.0) {
    throw std::invalid_argument("bounds: v0_bar and r0 must be finite and >= 0");
  }
}

std::vector<double> FeasibilityReport::rate_bounds() const {
  std::vector<double> r;
  r.reserve(stages.size());
  for (const auto& s : stages) r.push_back(s.rate_bound);
  return r;
}

std::vector<double> delta_vector(std::size_t stage, std::span<const double> p,
                                 std::span<const double> v_bar_with_v0) {
  require_stage(stage, p.size());
  if (v_bar_with_v0.size() < stage) {
    throw std::out_of_range("delta_vector: input bound list too short");
  }
  std::vector<double> delta(stage);
  for (std::size_t j = 0; j < stage; ++j) delta[j] = p[j] + v_bar_with_v0[j];
  return delta;
}

double varphi(std::size_t stage, const BoundsSpec& bounds,
              const CascadeConfig& config, double r_prev) {
  const std::size_t n = config.order();
  require_stage(stage, n);
  const std::size_t i = stage - 1;
  const auto p = initial_bounds(config);
  const auto v = input_bounds_with_v0(config, bounds.v0_bar);
  const auto delta = delta_vector(stage, p, v);

  double norm2 = 0.0;
  for (double x : delta) norm2 += x * x;

  double value = bounds.k[i] * std::sqrt(norm2) + bounds.d_bar[i] +
                 bounds.g_hi[i] * config.stages[i].v_bar + r_prev;
  if (stage < n) value += bounds.g_hi[i] * p[i + 1];
  return value;
}

double rate_bound(double varphi_value, const FunnelParams& funnel,
                  double gain_lo) {
  if (!(funnel.q > 0.0) || !(funnel.p > 0.0)) {
    throw std::invalid_argument("rate_bound: funnel p and q must be > 0");
  }
  return (varphi_value / funnel.q +
          funnel.mu * (funnel.p - funnel.q) / funnel.p) *
         std::abs(gain_lo);
}

FeasibilityReport check_feasibility(const CascadeConfig& config,
                                    const BoundsSpec& bounds,
                                    std::span<const double> z0) {
  config.validate();
  const std::size_t n = config.order();
  bounds.validate(n);
  if (z0.size() != n) {
    throw std::invalid_argument("check_feasibility: z0 has " +
                                std::to_string(z0.size()) +
                                " entries, expected " + std::to_string(n));
  }

  FeasibilityReport report;
  report.stages.resize(n);
  report.feasible = true;
  double r_prev = bounds.r0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& stage = config.stages[i];
    auto& out = report.stages[i];
    out.varphi = varphi(i + 1, bounds, config, r_prev);
    out.rhs = (bounds.g_hi[i] + bounds.g_lo[i]) * stage.v_bar +
              stage.funnel.mu * (stage.funnel.q - stage.funnel.p);
    out.margin = out.rhs - out.varphi;
    out.rate_bound = rate_bound(out.varphi, stage.funnel, gain_range(stage).lo);
    out.trivial_margin = stage.funnel.p - std::abs(z0[i]);
    report.feasible = report.feasible && out.feasible();
    r_prev = out.rate_bound;
  }
  return report;
}

void OffsetStage::validate() const {
  if (!std::isfinite(delta) || !(delta > 0.0)) {
    throw std::invalid_argument("offset stage: delta must be finite and > 0");
  }
  if (delta < q) {
    throw std::invalid_argument(
        "offset stage: delta below q would allow p < q for small errors");
  }
  StageControllerParams{v_bar, c, FunnelParams{q, q, mu}}.validate();
}

ResolvedParameters resolve_offset_funnels(std::span<const OffsetStage> stages,
                                          std::span<const double> x0,
                                          double reference_at_zero) {
  if (stages.empty()) {
    throw std::invalid_argument("resolve_offset_funnels: no stages");
  }
  if (x0.size() != stages.size()) {
    throw std::invalid_argument(
        "resolve_offset_funnels: initial state size does not match stages");
  }
  ResolvedParameters out;
  out.config.stages.reserve(stages.size());
  out.z0.reserve(stages.size());
  double previous = reference_at_zero;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    s.validate();
    const double z = x0[i] - previous;
    StageControllerParams stage{s.v_bar, s.c,
                                FunnelParams{std::abs(z) + s.delta, s.q, s.mu}};
    double theta = z / stage.funnel.p;
    clamp_theta(theta);  // only reachable when |z| swamps delta in rounding
    previous = stage_control(theta, stage);
    out.config.stages.push_back(stage);
    out.z0.push_back(z);
  }
  return out;
}

void RegionGrid::validate() const {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("region grid needs at least 2 points per axis");
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_min) || !std::isfinite(y_max) || !(x_min < x_max) ||
      !(y_min < y_max)) {
    throw std::invalid_argument("region grid bounds must satisfy min < max");
  }
}

double RegionGrid::x(std::size_t ix) const {
  return x_min + (x_max - x_min) * static_cast<double>(ix) /
                     static_cast<double>(nx - 1);
}

double RegionGrid::y(std::size_t iy) const {
  return y_min + (y_max - y_min) * static_cast<double>(iy) /
                     static_cast<double>(ny - 1);
}

void RegionTemplate::validate() const {
  if (stages.size() != 2) {
    throw std::invalid_argument(
        "region template: the initial-state sweep needs exactly 2 stages");
  }
  for (const auto& s : stages) s.validate();
  bounds.validate(stages.size());
  if (!std::isfinite(reference_at_zero)) {
    throw std::invalid_argument("region template: y_d(0) must be finite");
  }
}

std::size_t RegionMap::feasible_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(),
                    [](const RegionCell& c) { return c.feasible; }));
}

double RegionMap::feasible_fraction() const {
  if (cells.empty()) return 0.0;
  return static_cast<double>(feasible_count()) /
         static_cast<double>(cells.size());
}

RegionCell evaluate_initial_state(const RegionTemplate& tmpl, double x,
                                  double y) {
  const double x0[2] = {x, y};
  const auto resolved =
      resolve_offset_funnels(tmpl.stages, x0, tmpl.reference_at_zero);
  const auto report = check_feasibility(resolved.config, tmpl.bounds, resolved.z0);
  RegionCell cell;
  cell.x = x;
  cell.y = y;
  cell.margin_c1 = report.stages[0].margin;
  cell.margin_c2 = report.stages[1].margin;
  cell.feasible = cell.margin_c1 > 0.0 && cell.margin_c2 > 0.0;
  return cell;
}

RegionMap feasible_region(const RegionGrid& grid, const RegionTemplate& tmpl) {
  grid.validate();
  tmpl.validate();
  RegionMap map;
  map.grid = grid;
  map.cells.reserve(grid.nx * grid.ny);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      map.cells.push_back(evaluate_initial_state(tmpl, grid.x(ix), grid.y(iy)));
    }
  }
  return map;
}

}  // namespace pic

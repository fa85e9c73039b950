#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pic/controller.hpp"
#include "pic/funnel.hpp"

namespace pic {

/// Known bounds on the unknown system, one entry per stage where indexed.
///
///   |f_i(xi)| <= k_i ||xi_1..xi_i||,   g_lo_i <= g_i <= g_hi_i,
///   |d_i(t)| <= d_bar_i,   |y_d| <= v0_bar,   |y_d'| <= r0.
struct BoundsSpec {
  std::vector<double> k;
  std::vector<double> g_lo;
  std::vector<double> g_hi;
  std::vector<double> d_bar;
  double v0_bar = 0.0;
  double r0 = 0.0;

  std::size_t order() const { return k.size(); }
  /// Throws std::invalid_argument on wrong sizes, negative or non-finite
  /// entries, or g_lo > g_hi.
  void validate(std::size_t n) const;

  friend bool operator==(const BoundsSpec&, const BoundsSpec&) = default;
};

/// Per-stage outcome of the certification arithmetic.
struct StageFeasibility {
  double varphi = 0.0;          ///< worst-case drive the stage must dominate
  double rhs = 0.0;             ///< (g_hi + g_lo) v_bar + mu (q - p)
  double margin = 0.0;          ///< rhs - varphi, must be > 0
  double rate_bound = 0.0;      ///< r_i, bound on |u_i'|
  double trivial_margin = 0.0;  ///< p - |z_i(0)|, must be > 0

  bool feasible() const { return margin > 0.0 && trivial_margin > 0.0; }
};

struct FeasibilityReport {
  std::vector<StageFeasibility> stages;
  bool feasible = false;

  /// r_1..r_n in stage order.
  std::vector<double> rate_bounds() const;
};

/// delta_i = [p_1 + v_0, ..., p_i + v_{i-1}] for the 1-based `stage`.
/// `v_bar_with_v0` is [v0_bar, v_bar_1, ..., v_bar_n].
std::vector<double> delta_vector(std::size_t stage, std::span<const double> p,
                                 std::span<const double> v_bar_with_v0);

/// varphi_i = k_i ||delta_i|| + d_bar_i + g_hi_i p_{i+1} + g_hi_i v_bar_i + r_{i-1}
/// for the 1-based `stage`; the p_{i+1} term is absent on the last stage.
double varphi(std::size_t stage, const BoundsSpec& bounds,
              const CascadeConfig& config, double r_prev);

/// r_i = (varphi_i / q_i + mu_i (p_i - q_i) / p_i) |gain_lo|.
double rate_bound(double varphi_value, const FunnelParams& funnel,
                  double gain_lo);

/// Runs the r / varphi recursion over all stages and evaluates both the
/// strict margin inequality and the initial-error condition |z_i(0)| < p_i.
/// Margins are evaluated exactly, without a tolerance band.
FeasibilityReport check_feasibility(const CascadeConfig& config,
                                    const BoundsSpec& bounds,
                                    std::span<const double> z0);

// --- offset-parameterised funnels -----------------------------------------

/// A stage whose initial funnel width is p = |z(0)| + delta instead of a
/// fixed value.
struct OffsetStage {
  double v_bar = 1.0;
  double c = kLinearShape;
  double delta = 0.1;
  double q = 0.05;
  double mu = 1.0;

  void validate() const;

  friend bool operator==(const OffsetStage&, const OffsetStage&) = default;
};

struct ResolvedParameters {
  CascadeConfig config;
  std::vector<double> z0;
};

/// Walks the cascade at t = 0 from initial state x0: p_1 = |x_1 - y_d(0)| +
/// delta_1, u_1 from the stage law with psi_1(0) = p_1, p_2 = |x_2 - u_1| +
/// delta_2, and so on.
ResolvedParameters resolve_offset_funnels(std::span<const OffsetStage> stages,
                                          std::span<const double> x0,
                                          double reference_at_zero);

// --- initial-state region sweep ----------------------------------------------

struct RegionGrid {
  double x_min = -2.0;
  double x_max = 2.0;
  double y_min = -2.0;
  double y_max = 2.0;
  std::size_t nx = 201;
  std::size_t ny = 201;

  /// Rejects empty or degenerate grids (fewer than 2 points on an axis or
  /// min >= max).
  void validate() const;
  double x(std::size_t ix) const;
  double y(std::size_t iy) const;

  friend bool operator==(const RegionGrid&, const RegionGrid&) = default;
};

/// Everything but the initial state (x', y') of a second-order problem.
struct RegionTemplate {
  std::vector<OffsetStage> stages;
  BoundsSpec bounds;
  double reference_at_zero = 0.0;

  void validate() const;
};

struct RegionCell {
  double x = 0.0;
  double y = 0.0;
  bool feasible = false;
  double margin_c1 = 0.0;
  double margin_c2 = 0.0;
};

struct RegionMap {
  RegionGrid grid;
  std::vector<RegionCell> cells;  ///< index iy * nx + ix

  const RegionCell& at(std::size_t ix, std::size_t iy) const {
    return cells[iy * grid.nx + ix];
  }
  std::size_t feasible_count() const;
  double feasible_fraction() const;
};

/// Evaluates both stage inequalities for one initial state (x', y').
RegionCell evaluate_initial_state(const RegionTemplate& tmpl, double x,
                                  double y);

RegionMap feasible_region(const RegionGrid& grid, const RegionTemplate& tmpl);

}  // namespace pic

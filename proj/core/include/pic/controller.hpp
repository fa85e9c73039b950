#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "pic/funnel.hpp"
#include "pic/plant.hpp"

namespace pic {

/// Shape constant at which the stage law collapses to u = -v_bar * theta.
inline constexpr double kLinearShape = std::numbers::pi / 2.0;

/// Auxiliary variables are clamped to [-1 + kThetaMargin, 1 - kThetaMargin]
/// before the stage law is evaluated.
inline constexpr double kThetaMargin = 1e-9;

/// Design parameters of one backstepping stage.
struct StageControllerParams {
  double v_bar = 1.0;         ///< input bound for this stage's (virtual) input
  double c = kLinearShape;    ///< shape constant, c > 0
  FunnelParams funnel;        ///< performance funnel on this stage's error

  void validate() const;

  friend bool operator==(const StageControllerParams&,
                         const StageControllerParams&) = default;
};

/// Ordered stage list for an n-th order cascade. The last stage's v_bar is
/// the bound on the physical input.
struct CascadeConfig {
  std::vector<StageControllerParams> stages;

  std::size_t order() const { return stages.size(); }
  double input_bound() const { return stages.back().v_bar; }
  void validate() const;

  friend bool operator==(const CascadeConfig&, const CascadeConfig&) = default;
};

struct CascadeDecision {
  std::vector<double> z;      ///< error variables z_1..z_n
  std::vector<double> theta;  ///< z_i / psi_i, before clamping
  std::vector<double> u;      ///< virtual inputs u_1..u_{n-1}, physical input u_n
  std::vector<bool> saturated;

  double input() const { return u.back(); }
  bool any_saturated() const;
};

struct GainRange {
  double lo;
  double hi;
};

/// u = -(2 v_bar / pi) atan( (pi / 2c) tan(pi theta / 2) ).
///
/// Odd, strictly decreasing in theta and bounded by v_bar in magnitude.
/// Requires |theta| < 1; non-finite or out-of-domain theta throws
/// std::invalid_argument.
double stage_control(double theta, const StageControllerParams& stage);

/// du/dtheta of stage_control. Strictly negative on (-1, 1).
double stage_gain(double theta, const StageControllerParams& stage);

/// Closed envelope [lo, hi] of stage_gain over (-1, 1); lo <= hi < 0.
/// The two branches meet at c = pi/2, which is taken by the c >= pi/2 branch.
GainRange gain_range(const StageControllerParams& stage);

/// Clamp into the open interval the stage law accepts. Returns true when the
/// value had to be moved.
bool clamp_theta(double& theta);

/// Evaluates the full cascade at one instant given the reference value y_d(t).
///
/// z_1 = xi_1 - y_d, z_i = xi_i - u_{i-1}; every u_i is recomputed from the
/// current state, so the law is memoryless.
CascadeDecision cascade(std::span<const double> state, double t,
                        const CascadeConfig& config, double reference_value);

CascadeDecision cascade(std::span<const double> state, double t,
                        const CascadeConfig& config,
                        const ReferenceSpec& reference);

}  // namespace pic

#include "pic/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pic {

namespace {

constexpr double kPi = std::numbers::pi;

void require_theta(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("stage law: theta must be finite");
  }
  if (!(std::abs(theta) < 1.0)) {
    throw std::invalid_argument("stage law: |theta| must be < 1, got " +
                                std::to_string(theta));
  }
}

}  // namespace

void StageControllerParams::validate() const {
  if (!(v_bar > 0.0) || !std::isfinite(v_bar)) {
    throw std::invalid_argument("stage: v_bar must be finite and > 0");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("stage: c must be finite and > 0");
  }
  funnel.validate();
}

void CascadeConfig::validate() const {
  if (stages.empty()) {
    throw std::invalid_argument("cascade: at least one stage is required");
  }
  for (const auto& stage : stages) stage.validate();
}

bool CascadeDecision::any_saturated() const {
  return std::find(saturated.begin(), saturated.end(), true) != saturated.end();
}

double stage_control(double theta, const StageControllerParams& stage) {
  require_theta(theta);
  const double shaped = kPi / (2.0 * stage.c) * std::tan(kPi * theta / 2.0);
  return -(2.0 * stage.v_bar / kPi) * std::atan(shaped);
}

double stage_gain(double theta, const StageControllerParams& stage) {
  require_theta(theta);
  const double cos_half = std::cos(kPi * theta / 2.0);
  const double denom =
      (4.0 * stage.c * stage.c - kPi * kPi) * cos_half * cos_half + kPi * kPi;
  return -2.0 * kPi * stage.v_bar * stage.c / denom;
}

GainRange gain_range(const StageControllerParams& stage) {
  const double steep = -kPi * stage.v_bar / (2.0 * stage.c);
  const double flat = -2.0 * stage.v_bar * stage.c / kPi;
  if (stage.c < kLinearShape) return {steep, flat};
  return {flat, steep};
}

bool clamp_theta(double& theta) {
  constexpr double limit = 1.0 - kThetaMargin;
  if (theta > limit) {
    theta = limit;
    return true;
  }
  if (theta < -limit) {
    theta = -limit;
    return true;
  }
  return false;
}

CascadeDecision cascade(std::span<const double> state, double t,
                        const CascadeConfig& config, double reference_value) {
  const std::size_t n = config.order();
  if (state.size() != n) {
    throw std::invalid_argument("cascade: state has " +
                                std::to_string(state.size()) +
                                " entries, controller order is " +
                                std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(state[i])) {
      throw std::invalid_argument("cascade: state entry " +
                                  std::to_string(i + 1) + " is not finite");
    }
  }
  if (!std::isfinite(reference_value)) {
    throw std::invalid_argument("cascade: reference value is not finite");
  }

  CascadeDecision out;
  out.z.resize(n);
  out.theta.resize(n);
  out.u.resize(n);
  out.saturated.assign(n, false);

  double previous = reference_value;  // u_0 = y_d
  for (std::size_t i = 0; i < n; ++i) {
    const auto& stage = config.stages[i];
    out.z[i] = state[i] - previous;
    out.theta[i] = out.z[i] / funnel_value(stage.funnel, t);
    double clamped = out.theta[i];
    out.saturated[i] = clamp_theta(clamped);
    out.u[i] = stage_control(clamped, stage);
    previous = out.u[i];
  }
  return out;
}

CascadeDecision cascade(std::span<const double> state, double t,
                        const CascadeConfig& config,
                        const ReferenceSpec& reference) {
  return cascade(state, t, config, reference.y_d(t));
}

}  // namespace pic

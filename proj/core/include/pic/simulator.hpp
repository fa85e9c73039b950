#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pic/controller.hpp"
#include "pic/feasibility.hpp"
#include "pic/plant.hpp"

namespace pic {

/// Closed-loop run description.
///
/// The trajectory is recorded every `step` seconds; each recording interval
/// is integrated with `substeps` classic RK4 steps of size step / substeps.
struct Scenario {
  SystemSpec system;
  ReferenceSpec reference;
  CascadeConfig controller;
  std::optional<BoundsSpec> bounds;
  std::vector<double> x0;
  double horizon = 20.0;
  double step = 1e-3;
  std::size_t substeps = 1;
  /// Allow starting outside a funnel (theta clamped, logged as an event).
  bool permissive = false;

  void validate() const;
};

enum class EventKind { saturation, trivial_condition };

std::string_view to_string(EventKind kind);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::saturation;
  std::size_t stage = 0;  ///< 1-based
  double value = 0.0;     ///< theta that triggered the event
};

struct Sample {
  double t = 0.0;
  std::vector<double> xi;
  std::vector<double> z;
  std::vector<double> theta;
  std::vector<double> u;
  std::vector<double> psi;
  double y_d = 0.0;
};

struct Trajectory {
  std::size_t order = 0;
  std::vector<Sample> samples;
  std::vector<Event> events;

  std::vector<double> times() const;
  /// Column of u_i (1-based stage) over all samples.
  std::vector<double> input_series(std::size_t stage) const;
  std::vector<double> theta_series(std::size_t stage) const;
};

/// Thrown when |z_i(0)| >= psi_i(0) and the scenario is not permissive.
class TrivialConditionViolation : public std::runtime_error {
 public:
  TrivialConditionViolation(std::size_t stage, double theta);
  std::size_t stage() const { return stage_; }
  double theta() const { return theta_; }

 private:
  std::size_t stage_;
  double theta_;
};

/// Integrates xi' = F(xi, cascade(xi, t), t). The controller is evaluated at
/// every RK4 stage. Throws DynamicsBlowup when the state stops being finite.
Trajectory simulate(const Scenario& scenario);

/// Worst margin and violation count per stage for one family of bounds.
struct BoundFamily {
  std::vector<double> worst_margin;
  std::vector<std::size_t> worst_sample;
  std::vector<std::size_t> violations;

  std::size_t total_violations() const;
};

/// Runtime check of the bounds the certificate promises along a trajectory:
///   performance  psi_i - |z_i|
///   input        v_bar_i - |u_i|
///   state        psi_i + v_bar_{i-1} - |xi_i|     (v_bar_0 = bound on |y_d|)
///   rate         r_i - |u_i'|                      (u_i' by finite difference)
/// A sample violates a family when its margin is negative.
struct MonitorReport {
  BoundFamily performance;
  BoundFamily input;
  BoundFamily state;
  BoundFamily rate;
  std::vector<double> rate_bounds;

  std::size_t total_violations() const;
};

MonitorReport monitor(const Trajectory& trajectory, const CascadeConfig& config,
                      const BoundsSpec& bounds);

/// Derivative of `values` sampled at `times`: central differences inside,
/// one-sided at the two ends. A single sample has derivative 0.
std::vector<double> finite_difference(std::span<const double> times,
                                      std::span<const double> values);

}  // namespace pic

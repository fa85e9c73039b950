#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pic {

/// Scalar map of the leading states xi_1..xi_i. The span handed to the
/// oracle of stage i holds exactly i entries.
using StateFunction = std::function<double(std::span<const double>)>;
using TimeFunction = std::function<double(double)>;

/// Pure-feedback system
///   xi_i' = f_i(xi_1..xi_i) + g_i(xi_1..xi_i) xi_{i+1} + d_i(t),  i < n
///   xi_n' = f_n(xi_1..xi_n) + g_n(xi_1..xi_n) u       + d_n(t)
struct SystemSpec {
  std::string name;
  std::vector<StateFunction> f;
  std::vector<StateFunction> g;
  std::vector<TimeFunction> d;

  std::size_t order() const { return f.size(); }
  void validate() const;
};

/// Desired output and its time derivative.
struct ReferenceSpec {
  TimeFunction y_d;
  TimeFunction y_d_rate;
};

/// Raised when the right-hand side produces a non-finite value.
class DynamicsBlowup : public std::runtime_error {
 public:
  DynamicsBlowup(std::size_t stage, double time);

  std::size_t stage() const { return stage_; }  ///< 1-based
  double time() const { return time_; }

 private:
  std::size_t stage_;
  double time_;
};

/// Writes xi' into `out` (size n). Throws DynamicsBlowup on a non-finite entry.
void eval_dynamics(const SystemSpec& system, std::span<const double> state,
                   double input, double t, std::span<double> out);

std::vector<double> eval_dynamics(const SystemSpec& system,
                                  std::span<const double> state, double input,
                                  double t);

// --- parametric families -------------------------------------------------

/// xi_1' = xi_2,
/// xi_2' = -(g/l) sin xi_1 - (k/m) xi_2 + sin xi_2 + u / (m l^2) + A sin t.
struct PendulumParams {
  double mass = 0.01;
  double length = 1.0;
  double friction = 0.01;
  double gravity = 9.8;
  double disturbance = 0.5;

  friend bool operator==(const PendulumParams&, const PendulumParams&) = default;
};

/// xi_1' = a sin xi_1 + b_1 xi_2 + D_1 sin t,
/// xi_2' = sin xi_1 + xi_2 + b_2 u + D_2 sin t.
struct CoupledSineParams {
  double drift = 0.5;
  double gain_1 = 5.0;
  double gain_2 = 7.0;
  double disturbance_1 = 0.2;
  double disturbance_2 = 0.5;

  friend bool operator==(const CoupledSineParams&,
                         const CoupledSineParams&) = default;
};

/// xi_i' = b xi_{i+1}, xi_n' = b u; no drift, no disturbance.
struct IntegratorChainParams {
  std::size_t order = 2;
  double gain = 1.0;

  friend bool operator==(const IntegratorChainParams&,
                         const IntegratorChainParams&) = default;
};

/// y_d(t) = A sin(w t).
struct SineReferenceParams {
  double amplitude = 1.0;
  double frequency = 1.0;

  friend bool operator==(const SineReferenceParams&,
                         const SineReferenceParams&) = default;
};

SystemSpec pendulum_system(const PendulumParams& params);
SystemSpec coupled_sine_system(const CoupledSineParams& params);
SystemSpec integrator_chain_system(const IntegratorChainParams& params);
ReferenceSpec sine_reference(const SineReferenceParams& params);

// --- built-in examples ---------------------------------------------------

enum class BuiltinSystem { pendulum_ex1, nonlinear_ex2 };

struct BuiltinScenario {
  SystemSpec system;
  ReferenceSpec reference;
  SineReferenceParams reference_params;
  std::vector<double> x0;
};

std::string_view to_string(BuiltinSystem which);

/// Throws std::invalid_argument for an unknown name.
BuiltinSystem parse_builtin_system(std::string_view name);

BuiltinScenario builtin_system(BuiltinSystem which);

// --- assumption spot checks ----------------------------------------------

/// Sampled check of |f_i| <= k_i ||xi_1..xi_i||_2 and of the range of g_i
/// over the box [-half_width, half_width]^i.
struct GrowthCheck {
  std::vector<double> worst_ratio;  ///< max |f_i| / ||xi||, per stage
  std::vector<bool> holds;          ///< worst_ratio <= k_i
  std::vector<std::vector<double>> witness;  ///< state attaining worst_ratio
  std::vector<double> g_min;
  std::vector<double> g_max;
};

GrowthCheck spot_check_growth(const SystemSpec& system,
                              std::span<const double> k, double half_width,
                              std::size_t samples_per_axis);

}  // namespace pic

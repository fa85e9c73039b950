#include "pic/plant.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace pic {

void SystemSpec::validate() const {
  const std::size_t n = f.size();
  if (n == 0) throw std::invalid_argument("system: order must be >= 1");
  if (g.size() != n || d.size() != n) {
    throw std::invalid_argument(
        "system: f, g and d must all have one entry per stage");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!f[i] || !g[i] || !d[i]) {
      throw std::invalid_argument("system: stage " + std::to_string(i + 1) +
                                  " has an empty oracle");
    }
  }
}

DynamicsBlowup::DynamicsBlowup(std::size_t stage, double time)
    : std::runtime_error("dynamics blow-up: xi_" + std::to_string(stage) +
                         "' is not finite at t = " + std::to_string(time)),
      stage_(stage),
      time_(time) {}

void eval_dynamics(const SystemSpec& system, std::span<const double> state,
                   double input, double t, std::span<double> out) {
  const std::size_t n = system.order();
  if (state.size() != n || out.size() != n) {
    throw std::invalid_argument("eval_dynamics: state has " +
                                std::to_string(state.size()) +
                                " entries, system order is " +
                                std::to_string(n));
  }
  if (!std::isfinite(input)) throw DynamicsBlowup(n, t);
  for (std::size_t i = 0; i < n; ++i) {
    const auto leading = state.first(i + 1);
    const double drive = (i + 1 < n) ? state[i + 1] : input;
    out[i] = system.f[i](leading) + system.g[i](leading) * drive +
             system.d[i](t);
    if (!std::isfinite(out[i])) throw DynamicsBlowup(i + 1, t);
  }
}

std::vector<double> eval_dynamics(const SystemSpec& system,
                                  std::span<const double> state, double input,
                                  double t) {
  std::vector<double> out(system.order());
  eval_dynamics(system, state, input, t, out);
  return out;
}

SystemSpec pendulum_system(const PendulumParams& p) {
  if (!(p.mass > 0.0) || !(p.length > 0.0)) {
    throw std::invalid_argument("pendulum: mass and length must be > 0");
  }
  const double input_gain = 1.0 / (p.mass * p.length * p.length);
  SystemSpec sys;
  sys.name = "pendulum";
  sys.f = {
      [](std::span<const double>) { return 0.0; },
      [p](std::span<const double> x) {
        return -(p.gravity / p.length) * std::sin(x[0]) -
               (p.friction / p.mass) * x[1] + std::sin(x[1]);
      },
  };
  sys.g = {
      [](std::span<const double>) { return 1.0; },
      [input_gain](std::span<const double>) { return input_gain; },
  };
  sys.d = {
      [](double) { return 0.0; },
      [a = p.disturbance](double t) { return a * std::sin(t); },
  };
  return sys;
}

SystemSpec coupled_sine_system(const CoupledSineParams& p) {
  SystemSpec sys;
  sys.name = "coupled_sine";
  sys.f = {
      [a = p.drift](std::span<const double> x) { return a * std::sin(x[0]); },
      [](std::span<const double> x) { return std::sin(x[0]) + x[1]; },
  };
  sys.g = {
      [b = p.gain_1](std::span<const double>) { return b; },
      [b = p.gain_2](std::span<const double>) { return b; },
  };
  sys.d = {
      [a = p.disturbance_1](double t) { return a * std::sin(t); },
      [a = p.disturbance_2](double t) { return a * std::sin(t); },
  };
  return sys;
}

SystemSpec integrator_chain_system(const IntegratorChainParams& p) {
  if (p.order == 0) throw std::invalid_argument("integrator chain: order 0");
  SystemSpec sys;
  sys.name = "integrator_chain";
  for (std::size_t i = 0; i < p.order; ++i) {
    sys.f.emplace_back([](std::span<const double>) { return 0.0; });
    sys.g.emplace_back([b = p.gain](std::span<const double>) { return b; });
    sys.d.emplace_back([](double) { return 0.0; });
  }
  return sys;
}

ReferenceSpec sine_reference(const SineReferenceParams& p) {
  return {
      [p](double t) { return p.amplitude * std::sin(p.frequency * t); },
      [p](double t) {
        return p.amplitude * p.frequency * std::cos(p.frequency * t);
      },
  };
}

std::string_view to_string(BuiltinSystem which) {
  switch (which) {
    case BuiltinSystem::pendulum_ex1:
      return "pendulum_ex1";
    case BuiltinSystem::nonlinear_ex2:
      return "nonlinear_ex2";
  }
  return "unknown";
}

BuiltinSystem parse_builtin_system(std::string_view name) {
  if (name == "pendulum_ex1") return BuiltinSystem::pendulum_ex1;
  if (name == "nonlinear_ex2") return BuiltinSystem::nonlinear_ex2;
  throw std::invalid_argument("unknown built-in system '" + std::string(name) +
                              "' (expected pendulum_ex1 or nonlinear_ex2)");
}

BuiltinScenario builtin_system(BuiltinSystem which) {
  BuiltinScenario out;
  switch (which) {
    case BuiltinSystem::pendulum_ex1:
      out.system = pendulum_system(PendulumParams{});
      out.system.name = "pendulum_ex1";
      out.reference_params = {1.0, 0.5};
      out.x0 = {-0.5, 1.0};
      break;
    case BuiltinSystem::nonlinear_ex2:
      out.system = coupled_sine_system(CoupledSineParams{});
      out.system.name = "nonlinear_ex2";
      out.reference_params = {0.5, 1.0};
      out.x0 = {0.5, -0.8};
      break;
  }
  out.reference = sine_reference(out.reference_params);
  return out;
}

namespace {

// Visits sample points of [-w, w]^dim: a full tensor grid when it is small
// enough, otherwise a fixed-seed uniform sample of the same size budget.
template <class Visit>
void for_each_sample(std::size_t dim, double w, std::size_t per_axis,
                     Visit&& visit) {
  constexpr std::size_t kBudget = 250'000;
  std::vector<double> x(dim);
  double total = std::pow(static_cast<double>(per_axis), static_cast<double>(dim));
  if (per_axis >= 2 && total <= static_cast<double>(kBudget)) {
    std::vector<std::size_t> idx(dim, 0);
    const double h = 2.0 * w / static_cast<double>(per_axis - 1);
    while (true) {
      for (std::size_t j = 0; j < dim; ++j) {
        x[j] = -w + h * static_cast<double>(idx[j]);
      }
      visit(std::span<const double>(x));
      std::size_t j = 0;
      while (j < dim && ++idx[j] == per_axis) idx[j++] = 0;
      if (j == dim) break;
    }
    return;
  }
  std::mt19937_64 rng(0x5eedu + dim);
  std::uniform_real_distribution<double> unif(-w, w);
  for (std::size_t s = 0; s < kBudget; ++s) {
    for (auto& v : x) v = unif(rng);
    visit(std::span<const double>(x));
  }
}

}  // namespace

GrowthCheck spot_check_growth(const SystemSpec& system,
                              std::span<const double> k, double half_width,
                              std::size_t samples_per_axis) {
  system.validate();
  const std::size_t n = system.order();
  if (k.size() != n) {
    throw std::invalid_argument("spot_check_growth: need one k per stage");
  }
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("spot_check_growth: half width must be > 0");
  }
  GrowthCheck out;
  out.worst_ratio.assign(n, 0.0);
  out.holds.assign(n, true);
  out.witness.assign(n, {});
  out.g_min.assign(n, std::numeric_limits<double>::infinity());
  out.g_max.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    out.witness[i].assign(i + 1, 0.0);
    for_each_sample(i + 1, half_width, samples_per_axis,
                    [&](std::span<const double> x) {
                      double norm2 = 0.0;
                      for (double v : x) norm2 += v * v;
                      const double gv = system.g[i](x);
                      out.g_min[i] = std::min(out.g_min[i], gv);
                      out.g_max[i] = std::max(out.g_max[i], gv);
                      if (norm2 == 0.0) return;
                      const double ratio = std::abs(system.f[i](x)) / std::sqrt(norm2);
                      if (ratio > out.worst_ratio[i]) {
                        out.worst_ratio[i] = ratio;
                        out.witness[i].assign(x.begin(), x.end());
                      }
                    });
    out.holds[i] = out.worst_ratio[i] <= k[i];
  }
  return out;
}

}  // namespace pic

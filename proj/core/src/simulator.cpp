#include "pic/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pic {

void Scenario::validate() const {
  system.validate();
  controller.validate();
  const std::size_t n = system.order();
  if (controller.order() != n) {
    throw std::invalid_argument("scenario: controller has " +
                                std::to_string(controller.order()) +
                                " stages, system order is " + std::to_string(n));
  }
  if (x0.size() != n) {
    throw std::invalid_argument("scenario: x0 must have one entry per state");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw std::invalid_argument("scenario: x0 not finite");
  }
  if (!reference.y_d || !reference.y_d_rate) {
    throw std::invalid_argument("scenario: reference oracles are empty");
  }
  if (!std::isfinite(step) || !(step > 0.0)) {
    throw std::invalid_argument("scenario: step must be > 0");
  }
  if (!std::isfinite(horizon) || !(horizon >= step)) {
    throw std::invalid_argument("scenario: horizon must be >= step");
  }
  if (substeps == 0) {
    throw std::invalid_argument("scenario: substeps must be >= 1");
  }
  if (bounds) bounds->validate(n);
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::saturation:
      return "saturation";
    case EventKind::trivial_condition:
      return "trivial_condition";
  }
  return "unknown";
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.t);
  return t;
}

std::vector<double> Trajectory::input_series(std::size_t stage) const {
  std::vector<double> u;
  u.reserve(samples.size());
  for (const auto& s : samples) u.push_back(s.u.at(stage - 1));
  return u;
}

std::vector<double> Trajectory::theta_series(std::size_t stage) const {
  std::vector<double> th;
  th.reserve(samples.size());
  for (const auto& s : samples) th.push_back(s.theta.at(stage - 1));
  return th;
}

TrivialConditionViolation::TrivialConditionViolation(std::size_t stage,
                                                     double theta)
    : std::runtime_error("initial error outside its funnel at stage " +
                         std::to_string(stage) + " (|theta(0)| = " +
                         std::to_string(std::abs(theta)) + " >= 1)"),
      stage_(stage),
      theta_(theta) {}

namespace {

class ClosedLoop {
 public:
  explicit ClosedLoop(const Scenario& s)
      : scenario_(s), worst_theta_(s.system.order(), 0.0) {}

  // xi' at (x, t); folds any clamping into the per-interval saturation record.
  void derivative(std::span<const double> x, double t, std::span<double> out) {
    const auto decision = cascade(x, t, scenario_.controller, scenario_.reference);
    note_saturation(decision);
    eval_dynamics(scenario_.system, x, decision.input(), t, out);
  }

  void note_saturation(const CascadeDecision& decision) {
    for (std::size_t i = 0; i < decision.saturated.size(); ++i) {
      if (decision.saturated[i]) {
        const double th = decision.theta[i];
        if (std::abs(th) > std::abs(worst_theta_[i])) worst_theta_[i] = th;
      }
    }
  }

  // Emits one saturation event per stage that clamped during the interval.
  void flush_saturation(double t, std::vector<Event>& events) {
    for (std::size_t i = 0; i < worst_theta_.size(); ++i) {
      if (worst_theta_[i] != 0.0) {
        events.push_back({t, EventKind::saturation, i + 1, worst_theta_[i]});
        worst_theta_[i] = 0.0;
      }
    }
  }

 private:
  const Scenario& scenario_;
  std::vector<double> worst_theta_;
};

Sample record(const Scenario& s, std::span<const double> x, double t,
              const CascadeDecision& decision) {
  Sample out;
  out.t = t;
  out.xi.assign(x.begin(), x.end());
  out.z = decision.z;
  out.theta = decision.theta;
  out.u = decision.u;
  out.psi.reserve(x.size());
  for (const auto& stage : s.controller.stages) {
    out.psi.push_back(funnel_value(stage.funnel, t));
  }
  out.y_d = s.reference.y_d(t);
  return out;
}

}  // namespace

Trajectory simulate(const Scenario& scenario) {
  scenario.validate();
  const std::size_t n = scenario.system.order();
  const auto intervals =
      static_cast<std::size_t>(std::llround(scenario.horizon / scenario.step));
  const double h = scenario.step / static_cast<double>(scenario.substeps);

  Trajectory traj;
  traj.order = n;
  traj.samples.reserve(intervals + 1);

  std::vector<double> x = scenario.x0;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  ClosedLoop loop(scenario);

  {
    const auto initial = cascade(x, 0.0, scenario.controller, scenario.reference);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(initial.theta[i]) < 1.0) continue;
      if (!scenario.permissive) {
        throw TrivialConditionViolation(i + 1, initial.theta[i]);
      }
      traj.events.push_back(
          {0.0, EventKind::trivial_condition, i + 1, initial.theta[i]});
    }
  }

  for (std::size_t k = 0;; ++k) {
    const double t_k = static_cast<double>(k) * scenario.step;
    const auto decision = cascade(x, t_k, scenario.controller, scenario.reference);
    loop.note_saturation(decision);
    traj.samples.push_back(record(scenario, x, t_k, decision));
    if (k == intervals) {
      loop.flush_saturation(t_k, traj.events);
      break;
    }

    for (std::size_t j = 0; j < scenario.substeps; ++j) {
      const double t = t_k + static_cast<double>(j) * h;
      loop.derivative(x, t, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      loop.derivative(tmp, t + 0.5 * h, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      loop.derivative(tmp, t + 0.5 * h, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      loop.derivative(tmp, t + h, k4);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(x[i])) throw DynamicsBlowup(i + 1, t + h);
      }
    }
    loop.flush_saturation(t_k, traj.events);
  }
  return traj;
}

std::size_t BoundFamily::total_violations() const {
  std::size_t total = 0;
  for (auto v : violations) total += v;
  return total;
}

std::size_t MonitorReport::total_violations() const {
  return performance.total_violations() + input.total_violations() +
         state.total_violations() + rate.total_violations();
}

std::vector<double> finite_difference(std::span<const double> times,
                                      std::span<const double> values) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("finite_difference: size mismatch");
  }
  const std::size_t m = values.size();
  std::vector<double> out(m, 0.0);
  if (m < 2) return out;
  out.front() = (values[1] - values[0]) / (times[1] - times[0]);
  out.back() = (values[m - 1] - values[m - 2]) / (times[m - 1] - times[m - 2]);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    out[k] = (values[k + 1] - values[k - 1]) / (times[k + 1] - times[k - 1]);
  }
  return out;
}

namespace {

BoundFamily make_family(std::size_t n) {
  BoundFamily f;
  f.worst_margin.assign(n, std::numeric_limits<double>::infinity());
  f.worst_sample.assign(n, 0);
  f.violations.assign(n, 0);
  return f;
}

void observe(BoundFamily& family, std::size_t stage, std::size_t sample,
             double margin) {
  if (margin < family.worst_margin[stage]) {
    family.worst_margin[stage] = margin;
    family.worst_sample[stage] = sample;
  }
  // NaN margins count as violations too.
  if (!(margin >= 0.0)) ++family.violations[stage];
}

}  // namespace

MonitorReport monitor(const Trajectory& trajectory, const CascadeConfig& config,
                      const BoundsSpec& bounds) {
  const std::size_t n = config.order();
  if (trajectory.order != n) {
    throw std::invalid_argument("monitor: trajectory order " +
                                std::to_string(trajectory.order) +
                                " does not match controller order " +
                                std::to_string(n));
  }
  if (trajectory.samples.empty()) {
    throw std::invalid_argument("monitor: empty trajectory");
  }
  for (const auto& s : trajectory.samples) {
    if (s.xi.size() != n || s.z.size() != n || s.u.size() != n ||
        s.psi.size() != n || s.theta.size() != n) {
      throw std::invalid_argument("monitor: sample with mismatched dimensions");
    }
  }

  MonitorReport report;
  report.performance = make_family(n);
  report.input = make_family(n);
  report.state = make_family(n);
  report.rate = make_family(n);
  report.rate_bounds =
      check_feasibility(config, bounds, trajectory.samples.front().z)
          .rate_bounds();

  const auto times = trajectory.times();
  for (std::size_t i = 0; i < n; ++i) {
    const double v_bar = config.stages[i].v_bar;
    const double v_prev = i == 0 ? bounds.v0_bar : config.stages[i - 1].v_bar;
    const auto series = trajectory.input_series(i + 1);
    const auto rate = finite_difference(times, series);
    for (std::size_t k = 0; k < trajectory.samples.size(); ++k) {
      const auto& s = trajectory.samples[k];
      observe(report.performance, i, k, s.psi[i] - std::abs(s.z[i]));
      observe(report.input, i, k, v_bar - std::abs(s.u[i]));
      observe(report.state, i, k, s.psi[i] + v_prev - std::abs(s.xi[i]));
      observe(report.rate, i, k, report.rate_bounds[i] - std::abs(rate[k]));
    }
  }
  return report;
}

}  // namespace pic

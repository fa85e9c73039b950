#pragma once

namespace pic {

/// Exponential performance funnel psi(t) = (p - q) e^{-mu t} + q.
///
/// `p` bounds the error at t = 0, `q` is the steady-state bound and `mu`
/// the decay rate in 1/s. A constant funnel (p == q) is allowed.
struct FunnelParams {
  double p = 1.0;
  double q = 1.0;
  double mu = 1.0;

  /// Throws std::invalid_argument unless p >= q > 0 and mu > 0 (all finite).
  void validate() const;

  friend bool operator==(const FunnelParams&, const FunnelParams&) = default;
};

struct FunnelRateBounds {
  double lo;
  double hi;
};

/// psi(t); always lies in [q, p]. Throws on t < 0.
double funnel_value(const FunnelParams& funnel, double t);

/// d psi / dt; always lies in [mu (q - p), 0]. Throws on t < 0.
double funnel_rate(const FunnelParams& funnel, double t);

/// The time-independent envelope (mu (q - p), 0) of funnel_rate.
FunnelRateBounds funnel_rate_bounds(const FunnelParams& funnel);

}  // namespace pic

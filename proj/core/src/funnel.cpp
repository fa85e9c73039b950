#include "pic/funnel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pic {

namespace {

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("funnel: time must be finite and >= 0, got " +
                                std::to_string(t));
  }
}

}  // namespace

void FunnelParams::validate() const {
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(mu)) {
    throw std::invalid_argument("funnel: parameters must be finite");
  }
  if (!(q > 0.0)) throw std::invalid_argument("funnel: q must be > 0");
  if (!(p >= q)) throw std::invalid_argument("funnel: p must be >= q");
  if (!(mu > 0.0)) throw std::invalid_argument("funnel: mu must be > 0");
}

double funnel_value(const FunnelParams& funnel, double t) {
  require_time(t);
  return (funnel.p - funnel.q) * std::exp(-funnel.mu * t) + funnel.q;
}

double funnel_rate(const FunnelParams& funnel, double t) {
  require_time(t);
  return -funnel.mu * (funnel.p - funnel.q) * std::exp(-funnel.mu * t);
}

FunnelRateBounds funnel_rate_bounds(const FunnelParams& funnel) {
  // mu (q - p) is -0.0 when p == q; normalise so callers see a plain zero.
  return {funnel.mu * (funnel.q - funnel.p) + 0.0, 0.0};
}

}  // namespace pic

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pic/controller.hpp"
#include "pic/plant.hpp"
#include "test_support.hpp"

using namespace pic;

namespace {

constexpr double kPi = std::numbers::pi;

StageControllerParams stage(double v_bar, double c) {
  return {v_bar, c, FunnelParams{1.0, 0.05, 0.9}};
}

CascadeConfig example1_cascade() {
  return {{{4.5, kLinearShape, FunnelParams{1.0, 0.05, 0.9}},
           {8.0, kLinearShape, FunnelParams{1.4, 0.05, 1.0}}}};
}

}  // namespace

TEST_CASE("stage_control examples") {
  CHECK(stage_control(0.0, stage(3.0, 0.7)) == 0.0);
  CHECK(stage_control(0.37, stage(2.0, kLinearShape)) ==
        doctest::Approx(-0.74).epsilon(1e-14));
  // Limit towards the funnel edge saturates at -v_bar.
  CHECK(stage_control(1.0 - 1e-12, stage(4.5, kLinearShape)) ==
        doctest::Approx(-4.5).epsilon(1e-10));
  CHECK(stage_control(-1.0 + 1e-12, stage(4.5, 0.3)) ==
        doctest::Approx(4.5).epsilon(1e-9));
}

TEST_CASE("stage law rejects non-finite and out-of-domain theta") {
  CHECK_THROWS_AS(stage_control(NAN, stage(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(stage_control(INFINITY, stage(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(stage_control(1.0, stage(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(stage_gain(-1.5, stage(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(stage_gain(NAN, stage(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("stage_gain examples") {
  for (double th : {-0.9, -0.2, 0.0, 0.5, 0.95}) {
    CHECK(stage_gain(th, stage(4.5, kLinearShape)) == doctest::Approx(-4.5).epsilon(1e-14));
  }
  CHECK(stage_gain(0.0, stage(1.0, 1.0)) == doctest::Approx(-kPi / 2.0).epsilon(1e-14));

  const auto s = stage(2.5, 0.8);
  constexpr double h = 1e-6;
  const double fd = (stage_control(0.3 + h, s) - stage_control(0.3 - h, s)) / (2.0 * h);
  CHECK(std::abs(fd - stage_gain(0.3, s)) < 1e-6);
}

TEST_CASE("gain_range examples") {
  auto r = gain_range(stage(4.5, kLinearShape));
  CHECK(r.lo == doctest::Approx(-4.5).epsilon(1e-15));
  CHECK(r.hi == doctest::Approx(-4.5).epsilon(1e-15));

  r = gain_range(stage(1.0, 1.0));
  CHECK(r.lo == doctest::Approx(-kPi / 2.0).epsilon(1e-15));
  CHECK(r.hi == doctest::Approx(-2.0 / kPi).epsilon(1e-15));

  r = gain_range(stage(8.0, kPi));
  CHECK(r.lo == doctest::Approx(-16.0).epsilon(1e-15));
  CHECK(r.hi == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("stage law properties on random inputs") {
  pic::testing::Rng rng(77);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto s = stage(rng.uniform(0.1, 10.0), rng.uniform(0.25, 4.0));
    const double a = rng.uniform(-0.999999, 0.999999);
    const double b = rng.uniform(-0.999999, 0.999999);
    const double ua = stage_control(a, s);

    REQUIRE(std::abs(stage_control(-a, s) + ua) <= 1e-12);
    REQUIRE(std::abs(ua) < s.v_bar);
    if (a < b) REQUIRE(ua > stage_control(b, s));
    if (b < a) REQUIRE(ua < stage_control(b, s));

    const double phi = stage_gain(a, s);
    const auto range = gain_range(s);
    REQUIRE(phi < 0.0);
    REQUIRE(range.lo <= range.hi);
    REQUIRE(range.hi < 0.0);
    const double slack = 1e-12 * std::abs(range.lo);
    REQUIRE(phi >= range.lo - slack);
    REQUIRE(phi <= range.hi + slack);

    const double th = rng.uniform(-0.99, 0.99);
    constexpr double h = 1e-6;
    const double fd = (stage_control(th + h, s) - stage_control(th - h, s)) / (2.0 * h);
    REQUIRE(std::abs(fd - stage_gain(th, s)) < 1e-6);

    const auto lin = stage(s.v_bar, kLinearShape);
    const double tl = rng.uniform(-0.999, 0.999);
    REQUIRE(std::abs(stage_control(tl, lin) + lin.v_bar * tl) < 1e-12);
  }
}

TEST_CASE("clamp_theta keeps values inside the open interval") {
  double th = 1.2;
  CHECK(clamp_theta(th));
  CHECK(th == 1.0 - kThetaMargin);
  th = -1.0;
  CHECK(clamp_theta(th));
  CHECK(th == -(1.0 - kThetaMargin));
  th = 0.3;
  CHECK_FALSE(clamp_theta(th));
  CHECK(th == 0.3);
}

TEST_CASE("cascade at the Example 1 initial condition") {
  const auto ref = sine_reference({1.0, 0.5});
  const std::vector<double> x0{-0.5, 1.0};
  const auto d = cascade(x0, 0.0, example1_cascade(), ref);
  CHECK(d.z[0] == doctest::Approx(-0.5));
  CHECK(d.theta[0] == doctest::Approx(-0.5));
  CHECK(d.u[0] == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(d.z[1] == doctest::Approx(-1.25).epsilon(1e-14));
  CHECK(d.theta[1] == doctest::Approx(-1.25 / 1.4).epsilon(1e-14));
  CHECK(d.input() == doctest::Approx(8.0 * 1.25 / 1.4).epsilon(1e-14));
  CHECK_FALSE(d.any_saturated());
}

TEST_CASE("cascade on the reference is identically zero") {
  const auto cfg = example1_cascade();
  // xi_1 = y_d(t), xi_2 = u_1 = 0
  const double t = 1.3;
  const std::vector<double> x{std::sin(0.5 * t), 0.0};
  const auto d = cascade(x, t, cfg, sine_reference({1.0, 0.5}));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(d.z[i] == 0.0);
    CHECK(d.theta[i] == 0.0);
    CHECK(d.u[i] == 0.0);
  }
}

TEST_CASE("cascade at the Example 2 initial condition") {
  const CascadeConfig cfg{{{1.0, kLinearShape, FunnelParams{1.0, 0.08, 0.9}},
                           {16.0, kLinearShape, FunnelParams{0.4, 0.01, 0.5}}}};
  const std::vector<double> x0{0.5, -0.8};
  const auto d = cascade(x0, 0.0, cfg, sine_reference({0.5, 1.0}));
  CHECK(d.z[0] == doctest::Approx(0.5));
  CHECK(d.theta[0] == doctest::Approx(0.5));
  CHECK(d.u[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(d.z[1] == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("cascade clamps and flags saturation outside the funnel") {
  const std::vector<double> x{3.0, 0.0};
  const auto d = cascade(x, 0.0, example1_cascade(), 0.0);
  CHECK(d.saturated[0]);
  CHECK(d.theta[0] == doctest::Approx(3.0));  // raw value is reported
  CHECK(d.u[0] == doctest::Approx(-4.5).epsilon(1e-8));
  CHECK(std::abs(d.u[0]) < 4.5);
}

TEST_CASE("cascade rejects bad state") {
  const auto cfg = example1_cascade();
  const std::vector<double> bad{NAN, 0.0};
  CHECK_THROWS_AS(cascade(bad, 0.0, cfg, 0.0), std::invalid_argument);
  const std::vector<double> short_state{0.0};
  CHECK_THROWS_AS(cascade(short_state, 0.0, cfg, 0.0), std::invalid_argument);
}

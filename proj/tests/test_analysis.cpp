#include <cmath>
#include <vector>

#include "doctest.h"
#include "qkrdet/analysis.hpp"
#include "qkrdet/error.hpp"

using namespace qkr;
using namespace qkr::analysis;

namespace {

std::vector<double> exponential(double a, double rate, double floor, std::size_t n) {
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = a * std::exp(-rate * double(t)) + floor;
  return y;
}

std::vector<double> damped_sine(double a, double b, double phi, double g, std::size_t n) {
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = 0.5 + a * std::sin(b * double(t) + phi) * std::exp(-g * double(t));
  return y;
}

}  // namespace

TEST_CASE("exponential fit on a clean decay") {
  const auto y = exponential(0.5, 0.0217, 0.0, 800);
  const DecayFit fit = fit_exp_decay(y);
  CHECK(fit.rate == doctest::Approx(0.0217).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.t_lo == 1);
  CHECK(fit.t_hi > fit.t_lo);
}

TEST_CASE("exponential fit stops at the fluctuation floor") {
  const auto y = exponential(0.5, 0.05, 1e-3, 600);
  const DecayFit fit = fit_exp_decay(y);
  CHECK(fit.rate == doctest::Approx(0.05).epsilon(0.1));
  // t_hi is the first sample under three times the floor.
  CHECK(y[static_cast<std::size_t>(fit.t_hi)] < 3.01e-3);
  CHECK(y[static_cast<std::size_t>(fit.t_hi) - 1] >= 3e-3);
}

TEST_CASE("exponential fit rejects series that never decay") {
  const std::vector<double> flat(100, 0.3);
  try {
    (void)fit_exp_decay(flat);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonDecaying);
  }
  CHECK_THROWS_AS(fit_exp_decay(std::vector<double>(5, 1.0)), Error);
}

TEST_CASE("exponential fit is scale equivariant") {
  auto y = exponential(0.4, 0.03, 0.0, 500);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] *= 1.0 + 0.2 * std::cos(0.7 * double(t));
  const DecayFit base = fit_exp_decay(y);
  for (auto& v : y) v *= 7.5;
  const DecayFit scaled = fit_exp_decay(y);
  CHECK(std::abs(scaled.rate - base.rate) < 1e-10);
  CHECK(scaled.amplitude == doctest::Approx(7.5 * base.amplitude).epsilon(1e-10));
}

TEST_CASE("damped sine fit recovers its parameters") {
  const auto y = damped_sine(0.5, 0.404, 0.405, 0.0436, 400);
  const DecayFit fit = fit_damped_sine(y, 0.4);
  CHECK(fit.converged);
  CHECK(fit.rate == doctest::Approx(0.0436).epsilon(1e-4));
  CHECK(fit.frequency == doctest::Approx(0.404).epsilon(1e-4));
  CHECK(fit.phase == doctest::Approx(0.405).epsilon(1e-4));
  CHECK(fit.amplitude == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(fit.rms_residual < 1e-8);
}

TEST_CASE("damped oscillation fit needs enough samples") {
  CHECK_THROWS_AS(fit_damped_oscillation(std::vector<double>(10, 0.1), 0.4), Error);
}

TEST_CASE("residual level") {
  const std::vector<double> y{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(residual_level(y, 1, 3) == doctest::Approx(3.0));
  CHECK(residual_level(y, 4, 4) == doctest::Approx(5.0));
  CHECK_THROWS_AS(residual_level(y, 3, 2), Error);
  CHECK_THROWS_AS(residual_level(y, 0, 9), Error);
}

TEST_CASE("presaturation fit") {
  const auto y = exponential(1.0, 0.8, 0.01, 40);
  const DecayFit fit = fit_presaturation_decay(y, 0.01);
  CHECK(fit.t_lo == 1);
  CHECK(fit.rate > 0.6);
  CHECK(fit.rate < 0.8);
}

TEST_CASE("scaling helpers") {
  const std::vector<double> x{0.1, 0.2, 0.3};
  const std::vector<double> y{0.057, 0.114, 0.171};
  CHECK(slope_through_origin(x, y) == doctest::Approx(0.57));
  const std::vector<double> eps{1.5, 2.0, 3.0};
  std::vector<double> gamma;
  for (double e : eps) gamma.push_back(0.04 / (e * e));
  CHECK(inverse_square_coefficient(eps, gamma) == doctest::Approx(0.04));
}

TEST_CASE("sweep parameter names") {
  for (auto p : {SweepParameter::Epsilon, SweepParameter::EpsilonC, SweepParameter::K,
                 SweepParameter::Delta, SweepParameter::NLevels}) {
    CHECK(parse_sweep_parameter(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_sweep_parameter("nonsense"), Error);
  CHECK(flag_string(kSweepOk) == "ok");
  CHECK(flag_string(kGamma1Overdamped | kGamma2Failed).find('|') != std::string::npos);
  const SimParams base = SimParams::from_levels_scaled(4.5, 0.3, 0.1, 256, 100);
  CHECK(sweep_params(base, SweepParameter::Epsilon, 0.4).epsilon() == doctest::Approx(0.4));
  const SimParams bigger = sweep_params(base, SweepParameter::NLevels, 1024);
  CHECK(bigger.n_levels() == 1024);
  CHECK(bigger.epsilon() == doctest::Approx(0.3));
}

TEST_CASE("sweep is deterministic and ordered") {
  SweepRequest req;
  req.base = SimParams::from_levels_scaled(8.0, 0.2, 0.1, 512, 1500);
  req.alpha = req.beta = 1.0 / std::sqrt(2.0);
  req.theta0 = std::numbers::pi;
  req.values = {0.3, 0.15, 0.25, 0.2};
  const auto one = sweep(req, 1);
  const auto four = sweep(req, 4);
  REQUIRE(one.size() == 4);
  REQUIRE(four.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one[i].value == req.values[i]);
    CHECK(four[i].value == req.values[i]);
    CHECK(one[i].gamma1 == four[i].gamma1);
    CHECK(one[i].gamma2 == four[i].gamma2);
    CHECK(one[i].flags == four[i].flags);
  }
  for (const auto& row : one) {
    if (row.flags != kSweepOk) continue;
    CHECK(row.gamma1 == doctest::Approx(row.gamma2).epsilon(0.5));
  }
}

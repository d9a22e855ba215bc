#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qkrdet/coupled.hpp"
#include "qkrdet/detector.hpp"
#include "qkrdet/error.hpp"
#include "test_support.hpp"

using namespace qkr;
namespace det = qkr::detector;

constexpr double kPi = std::numbers::pi;

TEST_CASE("gaussian packet moments") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 512, 0);
  const DetectorState s = det::init_gaussian(kPi, 0.0, p);
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(det::mean_angle(s) - kPi) < 1e-6);
  CHECK(std::abs(det::mean_momentum(s, p)) < 1e-6);
  const double product = det::angle_spread(s) * det::momentum_spread(s, p);
  CHECK(product == doctest::Approx(p.hbar() / 2.0).epsilon(0.1));
  CHECK(det::angle_spread(s) == doctest::Approx(det::packet_width(p)).epsilon(0.01));
}

TEST_CASE("packet centre off the torus is rejected") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 64, 0);
  CHECK_THROWS_AS(det::init_gaussian(7.0, 0.0, p), Error);
  CHECK_THROWS_AS(det::init_gaussian(1.0, 4.0, p), Error);
}

TEST_CASE("kick with zero strength is the identity") {
  const SimParams p = SimParams::from_levels(0.0, 0.0, 0.0, 64, 0);
  const DetectorState s = det::init_gaussian(1.0, 0.5, p);
  const DetectorState k = det::kick(s, 0.0, p);
  CHECK(testing::max_diff(s.amplitudes, k.amplitudes) == 0.0);
}

TEST_CASE("kick on a basis state in eight levels") {
  const SimParams p = SimParams::from_levels(1.0, 0.0, 0.0, 8, 0);
  DetectorState s;
  s.amplitudes.assign(8, cplx{0.0, 0.0});
  s.amplitudes[0] = 1.0;
  const DetectorState k = det::kick(s, 1.0, p);
  const cplx expect = std::exp(cplx{0.0, -std::cos(0.0) / p.hbar()});
  CHECK(std::abs(k.amplitudes[0] - expect) < 1e-15);
  for (std::size_t j = 1; j < 8; ++j) CHECK(k.amplitudes[j] == cplx{0.0, 0.0});
}

TEST_CASE("kick needs the angle representation") {
  const SimParams p = SimParams::from_levels(1.0, 0.0, 0.0, 16, 0);
  const DetectorState m = det::to_momentum(det::init_gaussian(1.0, 0.0, p));
  try {
    (void)det::kick(m, 1.0, p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongRepresentation);
  }
}

TEST_CASE("free propagation of momentum eigenstates and the uniform state") {
  const std::size_t n = 32;
  const SimParams p = SimParams::from_levels(0.0, 0.0, 0.0, n, 0);
  const std::int64_t k = 5;
  DetectorState s;
  s.amplitudes.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.amplitudes[j] = std::polar(1.0 / std::sqrt(double(n)), double(k) * angle_at(j, n));
  }
  const DetectorState out = det::free_propagate(s, p);
  const cplx phase = std::exp(cplx{0.0, -p.hbar() * double(k * k) / 2.0});
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(out.amplitudes[j] - phase * s.amplitudes[j]) < 1e-13);

  DetectorState flat;
  flat.amplitudes.assign(n, cplx{1.0 / std::sqrt(double(n)), 0.0});
  const DetectorState flat_out = det::free_propagate(flat, p);
  CHECK(testing::max_diff(flat.amplitudes, flat_out.amplitudes) < 1e-14);
}

TEST_CASE("free propagation agrees with the dense oracle") {
  const SimParams p = SimParams::from_levels(0.0, 0.0, 0.0, 16, 1);
  std::mt19937_64 rng(5);
  const CoupledState s = testing::random_coupled(16, rng);
  const CoupledState dense = dense_oracle_step(s, p);
  DetectorState up{s.up, Representation::Angle};
  const DetectorState spectral = det::free_propagate(up, p);
  CHECK(testing::max_diff(spectral.amplitudes, dense.up) < 1e-13);
}

TEST_CASE("representation round trip") {
  const SimParams p = SimParams::from_levels(0.0, 0.0, 0.0, 64, 0);
  const DetectorState s = det::init_gaussian(2.0, -1.0, p);
  const DetectorState m = det::to_momentum(s);
  CHECK(m.representation == Representation::Momentum);
  CHECK(m.norm() == doctest::Approx(1.0).epsilon(1e-13));
  const DetectorState back = det::to_angle(m);
  CHECK(testing::max_diff(back.amplitudes, s.amplitudes) < 1e-14);
}

TEST_CASE("wrapping onto the torus") {
  CHECK(det::wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(det::wrap_angle(kTwoPi) == 0.0);
  CHECK(det::wrap_momentum(kPi) == doctest::Approx(-kPi));
  CHECK(det::wrap_momentum(-kPi - 0.25) == doctest::Approx(kPi - 0.25));
}

TEST_CASE("classical standard map") {
  const det::ClassicalPoint fixed{kPi, 0.0, 1.0, 0.0};
  const det::ClassicalPoint next = det::classical_step(fixed, 4.5);
  CHECK(std::abs(next.theta - kPi) < 1e-12);
  CHECK(std::abs(next.p) < 1e-12);

  const det::ClassicalPoint free = det::classical_step({1.0, 0.5, 1.0, 0.0}, 0.0);
  CHECK(free.theta == doctest::Approx(1.5));
  CHECK(free.p == doctest::Approx(0.5));

  // At theta = pi the map has trace 2 - K.
  CHECK(det::standard_map_jacobian(kPi, 4.5).trace() == doctest::Approx(2.0 - 4.5));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    CHECK(det::standard_map_jacobian(u(rng), 3.0 + u(rng)).determinant() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lyapunov exponent") {
  const double strong = det::lyapunov(8.0, 100, 10000, 1);
  CHECK(strong == doctest::Approx(std::log(4.0)).epsilon(0.1));
  CHECK(det::lyapunov(0.5, 100, 10000, 1) < 0.05);
  CHECK(det::lyapunov(4.5, 20, 2000, 9) == det::lyapunov(4.5, 20, 2000, 9));
  const double base = det::lyapunov(4.5, 100, 5000, 4);
  const double doubled = det::lyapunov(4.5, 100, 10000, 4);
  CHECK(std::abs(doubled - base) / base < 0.05);
  CHECK_THROWS_AS(det::lyapunov(4.5, 5, 10000, 1), Error);
  CHECK_THROWS_AS(det::lyapunov(4.5, 100, 100, 1), Error);
}

TEST_CASE("norm survives many kicked periods") {
  const SimParams p = SimParams::from_levels(4.5, 0.8, 0.1, 8192, 2000);
  const coupled::Trajectory traj = coupled::evolve(p, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), kPi, 0.0);
  const auto& last = traj.records.back();
  CHECK(std::abs(last.rho00 + last.rho11 - 1.0) < 1e-10);
}

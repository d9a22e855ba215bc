#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qkrdet/coupled.hpp"
#include "qkrdet/detector.hpp"
#include "qkrdet/error.hpp"
#include "test_support.hpp"

using namespace qkr;
using namespace qkr::coupled;

namespace {

constexpr double kPi = std::numbers::pi;
const double kHalf = 1.0 / std::sqrt(2.0);

// Frozen: W_D(0) for 512 levels on a 512 x 512 grid, box side 0.253 centred
// at (pi, 0), from an independent numpy evaluation.
constexpr double kWdInitial = 0.5707530833870046;

}  // namespace

TEST_CASE("split operator step matches the dense unitary") {
  const SimParams p = SimParams::from_levels(1.0, 0.3, 0.1, 8, 1);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const CoupledState s = testing::random_coupled(8, rng);
    const CoupledState fast = coupled_step(s, p);
    const CoupledState dense = dense_oracle_step(s, p);
    CHECK(testing::max_diff(fast.up, dense.up) < 1e-10);
    CHECK(testing::max_diff(fast.down, dense.down) < 1e-10);
  }
}

TEST_CASE("without coupling or rotation the qubit is frozen") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 256, 50);
  const Trajectory traj = evolve(p, {0.6, 0.0}, {0.0, 0.8}, kPi, 0.0);
  for (const auto& r : traj.records) {
    CHECK(std::abs(r.rho00 - 0.36) < 1e-12);
    CHECK(std::abs(r.rho11 - 0.64) < 1e-12);
    CHECK(std::abs(r.rho01 - cplx{0.0, -0.48}) < 1e-12);
  }
}

TEST_CASE("without rotation a spin-up qubit never populates spin down") {
  const SimParams p = SimParams::from_levels(4.5, 0.8, 0.0, 256, 50);
  const Trajectory traj = evolve(p, 1.0, 0.0, kPi, 0.0);
  for (const auto& r : traj.records) CHECK(r.rho11 == 0.0);
}

TEST_CASE("reduced density of product states") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 64, 0);
  const DetectorState d = detector::init_gaussian(kPi, 0.0, p);
  const QubitDensity rho = reduced_density(CoupledState::product(kHalf, kHalf, d));
  CHECK(rho.rho00.real() == doctest::Approx(0.5));
  CHECK(rho.rho01.real() == doctest::Approx(0.5));
  CHECK(rho.purity() == doctest::Approx(1.0));
  const QubitDensity down = reduced_density(CoupledState::product(0.0, 1.0, d));
  CHECK(down.rho11.real() == doctest::Approx(1.0));
}

TEST_CASE("random states carry coherence of order one over root N") {
  // |rho01| of a random unit vector in 2N dimensions has mean
  // sqrt(pi / 8) / sqrt(2N) for large N.
  std::mt19937_64 rng(23);
  for (std::size_t n : {128u, 1024u, 4096u}) {
    double sum = 0.0;
    const int samples = 400;
    for (int i = 0; i < samples; ++i) {
      sum += std::abs(reduced_density(testing::random_coupled(n, rng)).rho01);
    }
    const double scaled = sum / samples * std::sqrt(2.0 * double(n));
    CHECK(scaled == doctest::Approx(std::sqrt(kPi / 8.0)).epsilon(0.1));
  }
}

TEST_CASE("zero coupling keeps the qubit pure") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.1, 256, 200);
  const Trajectory traj = evolve(p, kHalf, kHalf, kPi, 0.0);
  for (const auto& r : traj.records) {
    CHECK(std::abs(r.purity - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(r.rho01) - 0.5) < 1e-10);
  }
}

TEST_CASE("trajectory invariants") {
  const SimParams p = SimParams::from_levels(4.5, 0.8, 0.1, 512, 100);
  const Trajectory traj = evolve(p, kHalf, kHalf, kPi, 0.0);
  REQUIRE(traj.records.size() == 101);
  for (std::size_t t = 0; t < traj.records.size(); ++t) {
    const auto& r = traj.records[t];
    CHECK(r.t == std::int64_t(t));
    CHECK(std::abs(r.rho00 + r.rho11 - 1.0) < 1e-11);
    CHECK(r.purity <= 1.0 + 1e-12);
    CHECK(r.purity >= 0.5 - 1e-12);
    CHECK(std::norm(r.rho01) <= r.rho00 * r.rho11 + 1e-12);
    CHECK(r.p2 >= 0.0);
  }
  CHECK(traj.abs_rho01().size() == 101);
  CHECK(traj.rho11().size() == 101);
  CHECK(traj.p2().size() == 101);
  CHECK_THROWS_AS(evolve(p, 1.0, 1.0, kPi, 0.0), Error);
}

TEST_CASE("fidelity amplitude") {
  const SimParams coupled = SimParams::from_levels(4.5, 0.8, 0.0, 512, 0);
  const auto f = fidelity_series(coupled, kPi, 0.0, 30);
  REQUIRE(f.size() == 31);
  CHECK(std::abs(f[0] - cplx{1.0, 0.0}) < 1e-12);
  for (const auto& v : f) CHECK(std::abs(v) <= 1.0 + 1e-12);
  CHECK(std::abs(f[30]) < 0.5);
  CHECK(std::abs(fidelity_amplitude(coupled, kPi, 0.0, 30) - f[30]) < 1e-14);

  const SimParams bare = SimParams::from_levels(4.5, 0.0, 0.0, 512, 0);
  for (const auto& v : fidelity_series(bare, kPi, 0.0, 30)) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("husimi of the initial packet") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 256, 0);
  const DetectorState d = detector::init_gaussian(kPi, 0.0, p);
  const HusimiGrid h = husimi(d, 128, 128, p);
  REQUIRE(h.values.size() == 128 * 128);
  std::size_t best = 0;
  for (std::size_t k = 1; k < h.values.size(); ++k) {
    if (h.values[k] > h.values[best]) best = k;
  }
  CHECK(h.theta_at(best % 128) == doctest::Approx(kPi));
  CHECK(std::abs(h.p_at(best / 128)) < 1e-12);
  CHECK(h.total() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(box_integral(h, kPi, 0.0, kTwoPi + 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(box_integral(h, kPi, 0.0, 0.0), Error);
  CHECK_THROWS_AS(husimi(d, 8, 128, p), Error);
}

TEST_CASE("husimi is non-negative on random states") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 64, 0);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    DetectorState s{testing::random_vector(64, rng), Representation::Angle};
    const double norm = s.norm();
    for (auto& c : s.amplitudes) c /= norm;
    const HusimiGrid h = husimi(s, 16, 16, p);
    double lowest = 0.0;
    for (double v : h.values) lowest = std::min(lowest, v);
    CHECK(lowest >= 0.0);
  }
}

TEST_CASE("husimi agrees with a direct overlap") {
  const SimParams p = SimParams::from_levels(4.5, 0.0, 0.0, 32, 0);
  std::mt19937_64 rng(41);
  DetectorState s{testing::random_vector(32, rng), Representation::Angle};
  const double norm = s.norm();
  for (auto& c : s.amplitudes) c /= norm;
  const HusimiGrid h = husimi(s, 16, 24, p);
  for (std::size_t j = 0; j < h.n_p; j += 5) {
    for (std::size_t i = 0; i < h.n_theta; i += 3) {
      const DetectorState coh = detector::init_gaussian(h.theta_at(i), h.p_at(j), p);
      const double direct = std::norm(inner(coh.amplitudes, s.amplitudes));
      CHECK(h.at(i, j) == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("conditional states separate in phase space") {
  const SimParams p = SimParams::from_levels(4.5, 0.8, 0.1, 512, 20);
  const auto up = conditional_state(p, kHalf, kHalf, kPi, 0.0, 20, Spin::Up, ConditionalMode::Component);
  const auto down = conditional_state(p, kHalf, kHalf, kPi, 0.0, 20, Spin::Down, ConditionalMode::Component);
  const double spread_up = husimi(up, 128, 128, p).participation();
  const double spread_down = husimi(down, 128, 128, p).participation();
  CHECK(spread_up >= 4.0 * spread_down);
  CHECK_THROWS_AS(conditional_state(p, kHalf, kHalf, kPi, 0.0, -1, Spin::Up, ConditionalMode::Separate),
                  Error);
}

TEST_CASE("initial box weight matches the frozen value") {
  const SimParams p = SimParams::from_levels(4.5, 0.8, 0.1, 512, 0);
  BoxSpec box;
  box.theta_c = kPi;
  box.side = 0.253;
  box.n_theta = box.n_p = 512;
  const BoxSeries w = box_integral_series(p, kHalf, kHalf, kPi, 0.0, box, ConditionalMode::Component);
  REQUIRE(w.up.size() == 1);
  CHECK(w.up[0] == doctest::Approx(kWdInitial).epsilon(1e-9));
  CHECK(w.down[0] == doctest::Approx(kWdInitial).epsilon(1e-9));
}

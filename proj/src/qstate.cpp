#include "qkrdet/qstate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkrdet/error.hpp"

namespace qkr {

namespace {

constexpr double kLevelTolerance = 1e-12;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

bool is_power_of_two(std::int64_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

SimParams::SimParams(double K, double epsilon_c, double delta, double hbar,
                     std::int64_t n_levels, std::int64_t t_max)
    : K_(K), epsilon_c_(epsilon_c), delta_(delta), hbar_(hbar), n_levels_(n_levels), t_max_(t_max) {
  if (!std::isfinite(K) || !std::isfinite(epsilon_c) || !std::isfinite(delta)) {
    invalid("K, epsilon_c and delta must be finite");
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) invalid("hbar must be positive");
  if (n_levels < 2 || !is_power_of_two(n_levels)) {
    invalid("n_levels must be a power of two >= 2");
  }
  if (t_max < 0) invalid("t_max must be non-negative");
  const double mismatch = std::abs(static_cast<double>(n_levels) * hbar - kTwoPi) / kTwoPi;
  if (mismatch > kLevelTolerance) {
    std::ostringstream os;
    os << "n_levels * hbar must equal 2*pi (relative mismatch " << mismatch << ")";
    invalid(os.str());
  }
}

SimParams SimParams::from_levels(double K, double epsilon_c, double delta,
                                 std::int64_t n_levels, std::int64_t t_max) {
  if (n_levels <= 0) invalid("n_levels must be positive");
  return SimParams(K, epsilon_c, delta, kTwoPi / static_cast<double>(n_levels), n_levels, t_max);
}

SimParams SimParams::from_levels_scaled(double K, double epsilon, double delta,
                                        std::int64_t n_levels, std::int64_t t_max) {
  if (n_levels <= 0) invalid("n_levels must be positive");
  const double hbar = kTwoPi / static_cast<double>(n_levels);
  return SimParams(K, epsilon * hbar, delta, hbar, n_levels, t_max);
}

SimParams SimParams::with_K(double K) const {
  return SimParams(K, epsilon_c_, delta_, hbar_, n_levels_, t_max_);
}
SimParams SimParams::with_epsilon_c(double epsilon_c) const {
  return SimParams(K_, epsilon_c, delta_, hbar_, n_levels_, t_max_);
}
SimParams SimParams::with_delta(double delta) const {
  return SimParams(K_, epsilon_c_, delta, hbar_, n_levels_, t_max_);
}
SimParams SimParams::with_t_max(std::int64_t t_max) const {
  return SimParams(K_, epsilon_c_, delta_, hbar_, n_levels_, t_max);
}

double angle_at(std::size_t j, std::size_t n) noexcept {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(n);
}

std::int64_t momentum_index(std::size_t bin, std::size_t n) noexcept {
  const auto b = static_cast<std::int64_t>(bin);
  const auto half = static_cast<std::int64_t>(n / 2);
  return b < half ? b : b - static_cast<std::int64_t>(n);
}

double l2_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

cplx inner(std::span<const cplx> bra, std::span<const cplx> ket) {
  if (bra.size() != ket.size()) throw Error(ErrorCode::InvalidArgument, "inner: size mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

double DetectorState::norm() const { return l2_norm(amplitudes); }

double CoupledState::norm() const {
  const double a = l2_norm(up);
  const double b = l2_norm(down);
  return std::sqrt(a * a + b * b);
}

CoupledState CoupledState::product(cplx alpha, cplx beta, const DetectorState& detector) {
  if (detector.representation != Representation::Angle) {
    throw Error(ErrorCode::WrongRepresentation, "product state needs the angle representation");
  }
  CoupledState s;
  s.up.resize(detector.size());
  s.down.resize(detector.size());
  for (std::size_t j = 0; j < detector.size(); ++j) {
    s.up[j] = alpha * detector.amplitudes[j];
    s.down[j] = beta * detector.amplitudes[j];
  }
  return s;
}

double BlochVector::length() const noexcept { return std::sqrt(x * x + y * y + z * z); }

double QubitDensity::purity() const noexcept {
  return std::norm(rho00) + std::norm(rho11) + std::norm(rho01) + std::norm(rho10);
}

double QubitDensity::min_eigenvalue() const noexcept {
  const double a = rho00.real();
  const double d = rho11.real();
  const cplx off = 0.5 * (rho01 + std::conj(rho10));
  const double mean = 0.5 * (a + d);
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(off));
  return mean - half_gap;
}

QubitDensity density_from_bloch(const BlochVector& b) noexcept {
  QubitDensity rho;
  rho.rho00 = {0.5 * (1.0 + b.z), 0.0};
  rho.rho11 = {0.5 * (1.0 - b.z), 0.0};
  rho.rho01 = {0.5 * b.x, -0.5 * b.y};
  rho.rho10 = std::conj(rho.rho01);
  return rho;
}

BlochVector bloch_from_density(const QubitDensity& rho) noexcept {
  return {2.0 * rho.rho01.real(), -2.0 * rho.rho01.imag(), rho.rho00.real() - rho.rho11.real()};
}

CoupledState dense_oracle_step(const CoupledState& state, const SimParams& params) {
  const std::size_t n = params.size();
  if (n > kDenseOracleMaxLevels) {
    throw Error(ErrorCode::DimensionTooLarge, "dense oracle is limited to 64 detector levels");
  }
  if (state.up.size() != n || state.down.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "state size does not match n_levels");
  }
  using Mat = Eigen::MatrixXcd;
  const double hbar = params.hbar();
  const cplx I{0.0, 1.0};

  // Unitary DFT: bin m <- angle j.
  Mat dft(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = -kTwoPi * static_cast<double>((m * j) % n) / static_cast<double>(n);
      dft(m, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), phase);
    }
  }
  Mat free_phase = Mat::Zero(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const double k = static_cast<double>(momentum_index(m, n));
    free_phase(m, m) = std::exp(-I * hbar * k * k / 2.0);
  }
  const Mat propagator = dft.adjoint() * free_phase * dft;

  Mat kick = Mat::Zero(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = std::cos(angle_at(j, n));
    kick(j, j) = std::exp(-I * (params.K() + params.epsilon_c()) * c / hbar);
    kick(n + j, n + j) = std::exp(-I * (params.K() - params.epsilon_c()) * c / hbar);
  }
  Mat free = Mat::Zero(2 * n, 2 * n);
  free.topLeftCorner(n, n) = propagator;
  free.bottomRightCorner(n, n) = propagator;

  // exp(-i delta sigma_x) (x) 1
  const Mat eye = Mat::Identity(n, n);
  Mat rotation(2 * n, 2 * n);
  rotation.topLeftCorner(n, n) = std::cos(params.delta()) * eye;
  rotation.bottomRightCorner(n, n) = std::cos(params.delta()) * eye;
  rotation.topRightCorner(n, n) = -I * std::sin(params.delta()) * eye;
  rotation.bottomLeftCorner(n, n) = -I * std::sin(params.delta()) * eye;

  const Mat unitary = kick * free * rotation;

  Eigen::VectorXcd psi(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    psi(j) = state.up[j];
    psi(n + j) = state.down[j];
  }
  const Eigen::VectorXcd out = unitary * psi;
  CoupledState next;
  next.up.resize(n);
  next.down.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    next.up[j] = out(j);
    next.down[j] = out(n + j);
  }
  return next;
}

}  // namespace qkr

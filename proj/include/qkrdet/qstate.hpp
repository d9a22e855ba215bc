#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace qkr {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Model parameters. `hbar` is tied to the detector dimension by
/// n_levels * hbar == 2*pi, which is what makes the momentum grid close on
/// the torus -pi <= p < pi.
class SimParams {
 public:
  SimParams() = default;

  /// Validating constructor; throws qkr::Error(InvalidArgument).
  SimParams(double K, double epsilon_c, double delta, double hbar,
            std::int64_t n_levels, std::int64_t t_max);

  /// hbar derived exactly as 2*pi / n_levels.
  static SimParams from_levels(double K, double epsilon_c, double delta,
                               std::int64_t n_levels, std::int64_t t_max);

  /// Same, but the coupling is given in units of hbar (epsilon = epsilon_c / hbar).
  static SimParams from_levels_scaled(double K, double epsilon, double delta,
                                      std::int64_t n_levels, std::int64_t t_max);

  double K() const noexcept { return K_; }
  double epsilon_c() const noexcept { return epsilon_c_; }
  double delta() const noexcept { return delta_; }
  double hbar() const noexcept { return hbar_; }
  std::int64_t n_levels() const noexcept { return n_levels_; }
  std::int64_t t_max() const noexcept { return t_max_; }
  double epsilon() const noexcept { return epsilon_c_ / hbar_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_levels_); }

  SimParams with_K(double K) const;
  SimParams with_epsilon_c(double epsilon_c) const;
  SimParams with_delta(double delta) const;
  SimParams with_t_max(std::int64_t t_max) const;

 private:
  double K_ = 0.0;
  double epsilon_c_ = 0.0;
  double delta_ = 0.0;
  double hbar_ = kTwoPi / 128.0;
  std::int64_t n_levels_ = 128;
  std::int64_t t_max_ = 0;
};

bool is_power_of_two(std::int64_t n) noexcept;

/// theta_j = 2*pi*j / N.
double angle_at(std::size_t j, std::size_t n) noexcept;

/// Integer momentum index of transform bin `bin`, in [-N/2, N/2).
std::int64_t momentum_index(std::size_t bin, std::size_t n) noexcept;

enum class Representation { Angle, Momentum };

struct DetectorState {
  CVector amplitudes;
  Representation representation = Representation::Angle;

  std::size_t size() const noexcept { return amplitudes.size(); }
  double norm() const;
};

/// Qubit (x) detector spinor. `up` holds c_{0,n} (sigma_z = +1), `down`
/// holds c_{1,n}; both in the angle representation.
struct CoupledState {
  CVector up;
  CVector down;

  std::size_t size() const noexcept { return up.size(); }
  double norm() const;

  static CoupledState product(cplx alpha, cplx beta, const DetectorState& detector);
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double length() const noexcept;
};

struct QubitDensity {
  cplx rho00{1.0, 0.0};
  cplx rho01{0.0, 0.0};
  cplx rho10{0.0, 0.0};
  cplx rho11{0.0, 0.0};

  double trace() const noexcept { return rho00.real() + rho11.real(); }
  double purity() const noexcept;
  /// Smaller eigenvalue of the Hermitian part.
  double min_eigenvalue() const noexcept;
};

/// rho_11 = (1 - z)/2, rho_01 = (x - i y)/2.
QubitDensity density_from_bloch(const BlochVector& b) noexcept;
BlochVector bloch_from_density(const QubitDensity& rho) noexcept;

double l2_norm(std::span<const cplx> v);
cplx inner(std::span<const cplx> bra, std::span<const cplx> ket);

/// Largest detector dimension the dense one-kick unitary accepts.
inline constexpr std::size_t kDenseOracleMaxLevels = 64;

/// Applies the explicitly assembled 2N x 2N one-kick unitary by a dense
/// matrix-vector product. Built from the dense DFT matrix, so it shares no
/// code path with the spectral propagator. Test use only.
CoupledState dense_oracle_step(const CoupledState& state, const SimParams& params);

}  // namespace qkr

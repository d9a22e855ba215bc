#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qkrdet/qstate.hpp"

namespace qkr::coupled {

/// One-kick Floquet operator of qubit (x) detector with its phase tables
/// precomputed. Order within a kick: qubit rotation exp(-i delta sigma_x),
/// free rotator propagation, then the spin-conditioned kick with
/// K_eff = K + epsilon_c on the up component and K - epsilon_c on the down one.
class FloquetOperator {
 public:
  explicit FloquetOperator(const SimParams& params);

  const SimParams& params() const noexcept { return params_; }

  void apply(CoupledState& state) const;

  /// One detector period (free propagation then kick) with a given effective
  /// kick; `sign` = +1 uses K + epsilon_c, -1 uses K - epsilon_c, 0 uses K.
  void apply_detector(std::span<cplx> amplitudes, int sign) const;

  /// <p^2> traced over the qubit.
  double momentum_second_moment(const CoupledState& state) const;

 private:
  void free_step(std::span<cplx> amplitudes) const;

  SimParams params_;
  std::vector<cplx> free_phase_;
  std::vector<cplx> kick_up_;
  std::vector<cplx> kick_down_;
  std::vector<cplx> kick_bare_;
};

CoupledState coupled_step(const CoupledState& state, const SimParams& params);

/// rho_ij = sum_n c_{i,n} conj(c_{j,n}).
QubitDensity reduced_density(const CoupledState& state);

struct TrajectoryRecord {
  std::int64_t t = 0;
  cplx rho01{0.0, 0.0};
  double rho00 = 0.0;
  double rho11 = 0.0;
  double p2 = 0.0;
  double purity = 1.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;

  std::vector<double> abs_rho01() const;
  std::vector<double> rho11() const;
  std::vector<double> p2() const;
};

/// Runs t_max kicks from (alpha|0> + beta|1>) (x) packet(theta0, p0);
/// records t = 0 .. t_max.
Trajectory evolve(const SimParams& params, cplx alpha, cplx beta, double theta0, double p0);

/// f(t) = <psi| (U_+^dagger)^t (U_-)^t |psi> for t = 0 .. t_max, where U_+-
/// are detector periods with K +- epsilon_c.
std::vector<cplx> fidelity_series(const SimParams& params, double theta0, double p0,
                                  std::int64_t t_max);
cplx fidelity_amplitude(const SimParams& params, double theta0, double p0, std::int64_t t);

/// Husimi distribution on a node grid: theta_i = i * 2pi / M_theta,
/// p_j = -pi + j * 2pi / M_p. Values are stored row-major with one row per
/// momentum node (p increasing with the row index).
struct HusimiGrid {
  std::size_t n_theta = 0;
  std::size_t n_p = 0;
  double hbar = 0.0;
  std::vector<double> values;

  double d_theta() const noexcept { return kTwoPi / static_cast<double>(n_theta); }
  double d_p() const noexcept { return kTwoPi / static_cast<double>(n_p); }
  double theta_at(std::size_t i) const noexcept { return static_cast<double>(i) * d_theta(); }
  double p_at(std::size_t j) const noexcept;
  double at(std::size_t i_theta, std::size_t j_p) const { return values[j_p * n_theta + i_theta]; }

  /// sum(values) * d_theta * d_p / (2 pi hbar)
  double total() const noexcept;
  /// Sum over grid nodes squared of the normalized distribution, inverted:
  /// the number of phase-space cells the distribution effectively occupies.
  double participation() const;
};

inline constexpr std::size_t kMinHusimiResolution = 16;
inline constexpr std::size_t kDefaultHusimiResolution = 128;

/// H(theta0, p0) = |<coh(theta0, p0)|psi>|^2 with the same packet as
/// detector::init_gaussian.
HusimiGrid husimi(const DetectorState& component, std::size_t n_theta, std::size_t n_p,
                  const SimParams& params);

/// Fraction of the distribution in a square box (nodes within side/2 of the
/// centre along both axes, distances measured on the torus).
double box_integral(const HusimiGrid& grid, double theta_c, double p_c, double side);

enum class Spin { Up, Down };

/// How the detector state "coupled to spin up/down" is obtained.
enum class ConditionalMode {
  /// Normalized spin component of the full coupled evolution.
  Component,
  /// Separate single-rotator run with K_eff = K +- epsilon_c (qubit frozen in
  /// a sigma_z eigenstate, no rotation).
  Separate,
};

/// Detector state conditioned on `spin` after t kicks.
DetectorState conditional_state(const SimParams& params, cplx alpha, cplx beta, double theta0,
                                double p0, std::int64_t t, Spin spin, ConditionalMode mode);

/// Conditional detector states for every t = 0 .. t_max; index [t][spin].
std::vector<std::array<DetectorState, 2>> conditional_series(const SimParams& params, cplx alpha,
                                                             cplx beta, double theta0, double p0,
                                                             ConditionalMode mode);

struct BoxSeries {
  std::vector<double> up;
  std::vector<double> down;
};

struct BoxSpec {
  double theta_c = 0.0;
  double p_c = 0.0;
  double side = 0.0;
  std::size_t n_theta = kDefaultHusimiResolution;
  std::size_t n_p = kDefaultHusimiResolution;
};

/// W_D(t) for both conditional detector states, t = 0 .. t_max.
BoxSeries box_integral_series(const SimParams& params, cplx alpha, cplx beta, double theta0,
                              double p0, const BoxSpec& box, ConditionalMode mode);

}  // namespace qkr::coupled

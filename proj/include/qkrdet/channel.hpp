#pragma once

#include <cstdint>
#include <vector>

#include "qkrdet/qstate.hpp"

namespace qkr::channel {

/// Rotation about x by 2*delta: free qubit evolution between kicks.
BlochVector free_rotation(const BlochVector& b, double delta) noexcept;

/// Small-coupling phase damping: x and y shrink by (1 - epsilon^2), z kept.
BlochVector phase_damp(const BlochVector& b, double epsilon) noexcept;

/// Above this coupling the second-order expansion behind phase_damp is not
/// trustworthy; callers may warn.
inline constexpr double kPhaseDampValidity = 0.5;

/// Number of trapezoid nodes used by phase_kick_factor.
inline constexpr int kPhaseKickNodes = 256;

/// (1/2pi) int_0^{2pi} exp(-2 i epsilon cos(theta)) d theta by the periodic
/// trapezoid rule (this is J0(2 epsilon)).
cplx phase_kick_factor(double epsilon);

/// Exact average over a uniformly distributed kick angle of
/// R(theta) rho R(theta)^dagger, R = diag(exp(-i eps cos), exp(+i eps cos)).
QubitDensity phase_kick_exact(const QubitDensity& rho, double epsilon);

struct MapRecord {
  std::int64_t t = 0;
  BlochVector bloch;
  cplx rho01{0.0, 0.0};
  double rho11 = 0.0;
};

/// Iterates free_rotation then phase_damp; records t = 0 .. t_max.
std::vector<MapRecord> map_trajectory(const BlochVector& b0, double epsilon, double delta,
                                      std::int64_t t_max);

/// Closed-form solution of
///   x' = -G x,  y' = -G y - 2 delta z,  z' = 2 delta y,   G = epsilon^2,
/// on all three damping branches (under-, critically and over-damped).
BlochVector continuous_solution(const BlochVector& b0, double epsilon, double delta, double t);

/// Decay exponents of the (y, z) block. For G < 4 delta both equal G/2 and
/// `frequency` is sqrt(4 delta^2 - G^2/4); otherwise the two real rates
/// G/2 -+ sqrt(G^2/4 - 4 delta^2) and frequency 0.
struct ContinuousRates {
  double x_rate = 0.0;
  double slow = 0.0;
  double fast = 0.0;
  double frequency = 0.0;
};

ContinuousRates continuous_rates(double epsilon, double delta) noexcept;

}  // namespace qkr::channel

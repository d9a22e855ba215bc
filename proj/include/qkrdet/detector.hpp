#pragma once

#include <cstdint>
#include <span>

#include "qkrdet/qstate.hpp"

namespace qkr::detector {

/// sigma of the symmetric minimum-uncertainty packet, sqrt(hbar/2).
double packet_width(const SimParams& params) noexcept;

/// Unnormalized wrapped-Gaussian amplitude at angle `theta` for a packet
/// centred at (theta0, p0); images m = -1, 0, 1.
cplx packet_amplitude(double theta, double theta0, double p0, double sigma, double hbar) noexcept;

/// Normalized coherent state on the angle grid.
DetectorState init_gaussian(double theta0, double p0, const SimParams& params);

/// Multiplies by exp(-i K_eff cos(theta_j) / hbar).
DetectorState kick(DetectorState state, double K_eff, const SimParams& params);

/// exp(-i p^2 / (2 hbar)) applied in the momentum representation; the result
/// is returned in the angle representation.
DetectorState free_propagate(DetectorState state, const SimParams& params);

DetectorState to_momentum(DetectorState state);
DetectorState to_angle(DetectorState state);

/// <theta> as the circular mean direction, in [0, 2*pi).
double mean_angle(const DetectorState& state);
/// <p> and <p^2> computed in the momentum representation, p = hbar * k.
double mean_momentum(const DetectorState& state, const SimParams& params);
double momentum_second_moment(const DetectorState& state, const SimParams& params);
/// Spread (standard deviations) along theta (about the mean, unwrapped near
/// it) and p.
double angle_spread(const DetectorState& state);
double momentum_spread(const DetectorState& state, const SimParams& params);

double wrap_angle(double theta) noexcept;     // -> [0, 2*pi)
double wrap_momentum(double p) noexcept;      // -> [-pi, pi)

/// Tangent vector components are (d_theta, d_p).
struct ClassicalPoint {
  double theta = 0.0;
  double p = 0.0;
  double d_theta = 1.0;
  double d_p = 0.0;
};

/// Jacobian of the standard map at angle theta acting on (d_theta, d_p).
struct Jacobian {
  double tt, tp;
  double pt, pp;

  double trace() const noexcept { return tt + pp; }
  double determinant() const noexcept { return tt * pp - tp * pt; }
};

Jacobian standard_map_jacobian(double theta, double K_eff) noexcept;

/// p' = p + K sin(theta), theta' = theta + p'.
ClassicalPoint classical_step(const ClassicalPoint& pt, double K_eff) noexcept;

/// Mean tangent-space growth rate over `n_orbits` orbits started uniformly on
/// the torus. Initial conditions come from a counter-based generator, so the
/// result depends only on the arguments.
double lyapunov(double K_eff, std::int64_t n_orbits, std::int64_t n_steps, std::uint64_t seed);

/// Per-orbit rates behind lyapunov().
std::vector<double> lyapunov_orbits(double K_eff, std::int64_t n_orbits, std::int64_t n_steps,
                                    std::uint64_t seed);

/// Uniform double in [0, 1) from (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept;

}  // namespace qkr::detector

#include "qkrdet/channel.hpp"

#include <algorithm>
#include <cmath>

namespace qkr::channel {

BlochVector free_rotation(const BlochVector& b, double delta) noexcept {
  const double c = std::cos(2.0 * delta);
  const double s = std::sin(2.0 * delta);
  return {b.x, c * b.y - s * b.z, s * b.y + c * b.z};
}

BlochVector phase_damp(const BlochVector& b, double epsilon) noexcept {
  const double f = 1.0 - epsilon * epsilon;
  return {f * b.x, f * b.y, b.z};
}

cplx phase_kick_factor(double epsilon) {
  cplx sum{0.0, 0.0};
  for (int k = 0; k < kPhaseKickNodes; ++k) {
    const double theta = kTwoPi * k / kPhaseKickNodes;
    sum += std::polar(1.0, -2.0 * epsilon * std::cos(theta));
  }
  return sum / static_cast<double>(kPhaseKickNodes);
}

QubitDensity phase_kick_exact(const QubitDensity& rho, double epsilon) {
  // R rho R^dagger leaves the diagonal alone and multiplies rho01 by
  // exp(-2 i eps cos(theta)).
  const cplx f = phase_kick_factor(epsilon);
  QubitDensity out = rho;
  out.rho01 = f * rho.rho01;
  out.rho10 = std::conj(f) * rho.rho10;
  return out;
}

std::vector<MapRecord> map_trajectory(const BlochVector& b0, double epsilon, double delta,
                                      std::int64_t t_max) {
  std::vector<MapRecord> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(t_max, 0)) + 1);
  BlochVector b = b0;
  for (std::int64_t t = 0; t <= t_max; ++t) {
    if (t > 0) b = phase_damp(free_rotation(b, delta), epsilon);
    const QubitDensity rho = density_from_bloch(b);
    out.push_back({t, b, rho.rho01, rho.rho11.real()});
  }
  return out;
}

ContinuousRates continuous_rates(double epsilon, double delta) noexcept {
  const double gamma = epsilon * epsilon;
  ContinuousRates r;
  r.x_rate = gamma;
  const double disc = gamma * gamma / 4.0 - 4.0 * delta * delta;
  if (disc < 0.0) {
    r.slow = r.fast = gamma / 2.0;
    r.frequency = std::sqrt(-disc);
  } else {
    const double root = std::sqrt(disc);
    r.slow = gamma / 2.0 - root;
    r.fast = gamma / 2.0 + root;
  }
  return r;
}

BlochVector continuous_solution(const BlochVector& b0, double epsilon, double delta, double t) {
  const double gamma = epsilon * epsilon;
  const double w = 2.0 * delta;
  const double y0 = b0.y;
  const double z0 = b0.z;
  // Initial slopes from the ODE.
  const double dy0 = -gamma * y0 - w * z0;
  const double dz0 = w * y0;
  const double h = gamma / 2.0;
  const double disc = w * w - h * h;  // omega^2 (can be negative)
  const double decay = std::exp(-h * t);

  // Each of y, z solves u'' + G u' + w^2 u = 0, so with s = u'(0) + h u(0):
  //   u(t) = e^{-h t} [u0 C(t) + s S(t)],
  // where C = cos(omega t), S = sin(omega t)/omega in the oscillatory case,
  // with cosh/sinh for disc < 0, and C = 1, S = t at the critical point.
  // S(t) is evaluated through a series near omega -> 0 so the branches join
  // continuously.
  double C, S;
  const double q = std::abs(disc);
  const double arg2 = q * t * t;
  if (arg2 < 1e-6) {
    const double sgn = disc > 0.0 ? -1.0 : 1.0;  // cos: -x^2/2, cosh: +x^2/2
    C = 1.0 + sgn * arg2 / 2.0 + arg2 * arg2 / 24.0;
    S = t * (1.0 + sgn * arg2 / 6.0 + arg2 * arg2 / 120.0);
  } else if (disc > 0.0) {
    const double omega = std::sqrt(disc);
    C = std::cos(omega * t);
    S = std::sin(omega * t) / omega;
  } else {
    const double kappa = std::sqrt(-disc);
    // e^{-h t} cosh/sinh computed as differences of exponentials to avoid overflow.
    const double ep = std::exp((kappa - h) * t);
    const double em = std::exp((-kappa - h) * t);
    const double cy = 0.5 * (ep + em);
    const double sy = 0.5 * (ep - em) / kappa;
    BlochVector out;
    out.x = b0.x * std::exp(-gamma * t);
    out.y = y0 * cy + (dy0 + h * y0) * sy;
    out.z = z0 * cy + (dz0 + h * z0) * sy;
    return out;
  }
  BlochVector out;
  out.x = b0.x * std::exp(-gamma * t);
  out.y = decay * (y0 * C + (dy0 + h * y0) * S);
  out.z = decay * (z0 * C + (dz0 + h * z0) * S);
  return out;
}

}  // namespace qkr::channel

#include "qkrdet/detector.hpp"

#include <cmath>
#include <numbers>

#include "qkrdet/error.hpp"
#include "spectral.hpp"

namespace qkr::detector {

namespace {

constexpr double kPi = std::numbers::pi;

void require_angle(const DetectorState& s) {
  if (s.representation != Representation::Angle) {
    throw Error(ErrorCode::WrongRepresentation, "state must be in the angle representation");
  }
}

void check_size(const DetectorState& s, const SimParams& params) {
  if (s.size() != params.size()) {
    throw Error(ErrorCode::InvalidArgument, "state size does not match n_levels");
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double packet_width(const SimParams& params) noexcept { return std::sqrt(params.hbar() / 2.0); }

cplx packet_amplitude(double theta, double theta0, double p0, double sigma, double hbar) noexcept {
  cplx sum{0.0, 0.0};
  for (int m = -1; m <= 1; ++m) {
    const double d = theta - theta0 + kTwoPi * m;
    sum += std::polar(std::exp(-d * d / (4.0 * sigma * sigma)), p0 * d / hbar);
  }
  return sum;
}

DetectorState init_gaussian(double theta0, double p0, const SimParams& params) {
  if (!(theta0 >= 0.0 && theta0 < kTwoPi) || !(p0 >= -kPi && p0 < kPi)) {
    throw Error(ErrorCode::InvalidArgument, "packet centre must lie on the torus");
  }
  const std::size_t n = params.size();
  const double sigma = packet_width(params);
  DetectorState s;
  s.amplitudes.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.amplitudes[j] = packet_amplitude(angle_at(j, n), theta0, p0, sigma, params.hbar());
  }
  const double norm = s.norm();
  for (auto& c : s.amplitudes) c /= norm;
  return s;
}

DetectorState kick(DetectorState state, double K_eff, const SimParams& params) {
  require_angle(state);
  check_size(state, params);
  const std::size_t n = state.size();
  for (std::size_t j = 0; j < n; ++j) {
    state.amplitudes[j] *= std::polar(1.0, -K_eff * std::cos(angle_at(j, n)) / params.hbar());
  }
  return state;
}

DetectorState to_momentum(DetectorState state) {
  if (state.representation == Representation::Momentum) return state;
  spectral::Transform(state.size()).forward(state.amplitudes);
  const double scale = 1.0 / std::sqrt(static_cast<double>(state.size()));
  for (auto& c : state.amplitudes) c *= scale;
  state.representation = Representation::Momentum;
  return state;
}

DetectorState to_angle(DetectorState state) {
  if (state.representation == Representation::Angle) return state;
  spectral::Transform(state.size()).inverse(state.amplitudes);
  const double scale = std::sqrt(static_cast<double>(state.size()));
  for (auto& c : state.amplitudes) c *= scale;
  state.representation = Representation::Angle;
  return state;
}

DetectorState free_propagate(DetectorState state, const SimParams& params) {
  check_size(state, params);
  state = to_momentum(std::move(state));
  const std::size_t n = state.size();
  for (std::size_t m = 0; m < n; ++m) {
    const double k = static_cast<double>(momentum_index(m, n));
    state.amplitudes[m] *= std::polar(1.0, -params.hbar() * k * k / 2.0);
  }
  return to_angle(std::move(state));
}

double mean_angle(const DetectorState& state) {
  const DetectorState a = to_angle(state);
  const std::size_t n = a.size();
  cplx z{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) z += std::norm(a.amplitudes[j]) * std::polar(1.0, angle_at(j, n));
  return wrap_angle(std::arg(z));
}

double angle_spread(const DetectorState& state) {
  const DetectorState a = to_angle(state);
  const double centre = mean_angle(a);
  const std::size_t n = a.size();
  double m1 = 0.0, m2 = 0.0, w = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = angle_at(j, n) - centre;
    d -= kTwoPi * std::floor((d + kPi) / kTwoPi);
    const double prob = std::norm(a.amplitudes[j]);
    m1 += prob * d;
    m2 += prob * d * d;
    w += prob;
  }
  m1 /= w;
  return std::sqrt(std::max(0.0, m2 / w - m1 * m1));
}

double mean_momentum(const DetectorState& state, const SimParams& params) {
  const DetectorState m = to_momentum(state);
  const std::size_t n = m.size();
  double s = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    s += std::norm(m.amplitudes[b]) * params.hbar() * static_cast<double>(momentum_index(b, n));
  }
  return s;
}

double momentum_second_moment(const DetectorState& state, const SimParams& params) {
  const DetectorState m = to_momentum(state);
  const std::size_t n = m.size();
  double s = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const double p = params.hbar() * static_cast<double>(momentum_index(b, n));
    s += std::norm(m.amplitudes[b]) * p * p;
  }
  return s;
}

double momentum_spread(const DetectorState& state, const SimParams& params) {
  const double mean = mean_momentum(state, params);
  return std::sqrt(std::max(0.0, momentum_second_moment(state, params) - mean * mean));
}

double wrap_angle(double theta) noexcept {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t >= kTwoPi ? 0.0 : t;
}

double wrap_momentum(double p) noexcept {
  double q = std::fmod(p + kPi, kTwoPi);
  if (q < 0.0) q += kTwoPi;
  q -= kPi;
  return q >= kPi ? -kPi : q;
}

Jacobian standard_map_jacobian(double theta, double K_eff) noexcept {
  const double kc = K_eff * std::cos(theta);
  // d_p' = d_p + kc d_theta ; d_theta' = d_theta + d_p'
  return {1.0 + kc, 1.0, kc, 1.0};
}

ClassicalPoint classical_step(const ClassicalPoint& pt, double K_eff) noexcept {
  const Jacobian J = standard_map_jacobian(pt.theta, K_eff);
  ClassicalPoint next;
  next.p = wrap_momentum(pt.p + K_eff * std::sin(pt.theta));
  next.theta = wrap_angle(pt.theta + next.p);
  next.d_theta = J.tt * pt.d_theta + J.tp * pt.d_p;
  next.d_p = J.pt * pt.d_theta + J.pp * pt.d_p;
  return next;
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ (counter * 0xd1b54a32d192ed03ULL));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<double> lyapunov_orbits(double K_eff, std::int64_t n_orbits, std::int64_t n_steps,
                                    std::uint64_t seed) {
  if (n_orbits < 10 || n_steps < 1000) {
    throw Error(ErrorCode::InvalidArgument, "lyapunov needs n_orbits >= 10 and n_steps >= 1000");
  }
  std::vector<double> rates(static_cast<std::size_t>(n_orbits));
  for (std::int64_t o = 0; o < n_orbits; ++o) {
    const auto c = static_cast<std::uint64_t>(o);
    ClassicalPoint pt;
    pt.theta = kTwoPi * counter_uniform(seed, 2 * c);
    pt.p = -kPi + kTwoPi * counter_uniform(seed, 2 * c + 1);
    const double r0 = std::hypot(1.0, 1.0);
    pt.d_theta = 1.0 / r0;
    pt.d_p = 1.0 / r0;
    double log_growth = 0.0;
    for (std::int64_t s = 0; s < n_steps; ++s) {
      pt = classical_step(pt, K_eff);
      const double len = std::hypot(pt.d_theta, pt.d_p);
      log_growth += std::log(len);
      pt.d_theta /= len;
      pt.d_p /= len;
    }
    rates[static_cast<std::size_t>(o)] = log_growth / static_cast<double>(n_steps);
  }
  return rates;
}

double lyapunov(double K_eff, std::int64_t n_orbits, std::int64_t n_steps, std::uint64_t seed) {
  const auto rates = lyapunov_orbits(K_eff, n_orbits, n_steps, seed);
  double s = 0.0;
  for (double r : rates) s += r;
  return s / static_cast<double>(rates.size());
}

}  // namespace qkr::detector

#include "qkrdet/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qkrdet/detector.hpp"
#include "qkrdet/error.hpp"
#include "spectral.hpp"

namespace qkr::coupled {

namespace {

constexpr double kPi = std::numbers::pi;

// Beyond this many packet widths the Gaussian envelope is below 1e-18 of its
// peak.
constexpr double kPacketSupport = 13.0;

void check_state(const CoupledState& s, const SimParams& params) {
  if (s.up.size() != params.size() || s.down.size() != params.size()) {
    throw Error(ErrorCode::InvalidArgument, "coupled state size does not match n_levels");
  }
}

double torus_distance(double a, double b) noexcept {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d < -kPi) d += kTwoPi;
  return std::abs(d);
}

}  // namespace

FloquetOperator::FloquetOperator(const SimParams& params)
    : params_(params),
      free_phase_(params.size()),
      kick_up_(params.size()),
      kick_down_(params.size()),
      kick_bare_(params.size()) {
  const std::size_t n = params.size();
  const double hbar = params.hbar();
  for (std::size_t m = 0; m < n; ++m) {
    const double k = static_cast<double>(momentum_index(m, n));
    free_phase_[m] = std::polar(1.0, -hbar * k * k / 2.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double c = std::cos(angle_at(j, n));
    kick_up_[j] = std::polar(1.0, -(params.K() + params.epsilon_c()) * c / hbar);
    kick_down_[j] = std::polar(1.0, -(params.K() - params.epsilon_c()) * c / hbar);
    kick_bare_[j] = std::polar(1.0, -params.K() * c / hbar);
  }
}

void FloquetOperator::free_step(std::span<cplx> amplitudes) const {
  const spectral::Transform fft(amplitudes.size());
  fft.forward(amplitudes);
  for (std::size_t m = 0; m < amplitudes.size(); ++m) amplitudes[m] *= free_phase_[m];
  fft.inverse(amplitudes);
}

void FloquetOperator::apply(CoupledState& state) const {
  check_state(state, params_);
  const double c = std::cos(params_.delta());
  const cplx s{0.0, -std::sin(params_.delta())};
  for (std::size_t j = 0; j < state.size(); ++j) {
    const cplx u = state.up[j];
    const cplx d = state.down[j];
    state.up[j] = c * u + s * d;
    state.down[j] = s * u + c * d;
  }
  apply_detector(state.up, +1);
  apply_detector(state.down, -1);
}

void FloquetOperator::apply_detector(std::span<cplx> amplitudes, int sign) const {
  if (amplitudes.size() != params_.size()) {
    throw Error(ErrorCode::InvalidArgument, "detector state size does not match n_levels");
  }
  free_step(amplitudes);
  const auto& table = sign > 0 ? kick_up_ : (sign < 0 ? kick_down_ : kick_bare_);
  for (std::size_t j = 0; j < amplitudes.size(); ++j) amplitudes[j] *= table[j];
}

double FloquetOperator::momentum_second_moment(const CoupledState& state) const {
  check_state(state, params_);
  const std::size_t n = params_.size();
  const spectral::Transform fft(n);
  const double hbar = params_.hbar();
  double total = 0.0;
  CVector buf;
  for (const CVector* comp : {&state.up, &state.down}) {
    buf = *comp;
    fft.forward(buf);
    for (std::size_t m = 0; m < n; ++m) {
      const double p = hbar * static_cast<double>(momentum_index(m, n));
      total += std::norm(buf[m]) * p * p;
    }
  }
  // Unscaled forward transform: Parseval picks up a factor N.
  return total / static_cast<double>(n);
}

CoupledState coupled_step(const CoupledState& state, const SimParams& params) {
  CoupledState next = state;
  FloquetOperator(params).apply(next);
  return next;
}

QubitDensity reduced_density(const CoupledState& state) {
  if (state.up.size() != state.down.size()) {
    throw Error(ErrorCode::InvalidArgument, "spin components differ in size");
  }
  double r00 = 0.0, r11 = 0.0;
  cplx r01{0.0, 0.0};
  for (std::size_t j = 0; j < state.size(); ++j) {
    r00 += std::norm(state.up[j]);
    r11 += std::norm(state.down[j]);
    r01 += state.up[j] * std::conj(state.down[j]);
  }
  QubitDensity rho;
  rho.rho00 = {r00, 0.0};
  rho.rho11 = {r11, 0.0};
  rho.rho01 = r01;
  rho.rho10 = std::conj(r01);
  return rho;
}

std::vector<double> Trajectory::abs_rho01() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(std::abs(r.rho01));
  return out;
}

std::vector<double> Trajectory::rho11() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.rho11);
  return out;
}

std::vector<double> Trajectory::p2() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.p2);
  return out;
}

Trajectory evolve(const SimParams& params, cplx alpha, cplx beta, double theta0, double p0) {
  const double qnorm = std::norm(alpha) + std::norm(beta);
  if (std::abs(qnorm - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "qubit amplitudes must be normalized");
  }
  const FloquetOperator floquet(params);
  CoupledState state = CoupledState::product(alpha, beta, detector::init_gaussian(theta0, p0, params));

  Trajectory traj;
  traj.records.reserve(static_cast<std::size_t>(params.t_max()) + 1);
  auto record = [&](std::int64_t t) {
    const QubitDensity rho = reduced_density(state);
    TrajectoryRecord r;
    r.t = t;
    r.rho01 = rho.rho01;
    r.rho00 = rho.rho00.real();
    r.rho11 = rho.rho11.real();
    r.p2 = floquet.momentum_second_moment(state);
    r.purity = rho.purity();
    traj.records.push_back(r);
  };
  record(0);
  for (std::int64_t t = 1; t <= params.t_max(); ++t) {
    floquet.apply(state);
    record(t);
  }
  return traj;
}

std::vector<cplx> fidelity_series(const SimParams& params, double theta0, double p0,
                                  std::int64_t t_max) {
  if (t_max < 0) throw Error(ErrorCode::InvalidArgument, "t must be non-negative");
  const FloquetOperator floquet(params);
  const DetectorState psi = detector::init_gaussian(theta0, p0, params);
  CVector plus = psi.amplitudes;
  CVector minus = psi.amplitudes;
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(t_max) + 1);
  out.push_back(inner(plus, minus));
  for (std::int64_t t = 1; t <= t_max; ++t) {
    floquet.apply_detector(plus, +1);
    floquet.apply_detector(minus, -1);
    out.push_back(inner(plus, minus));
  }
  return out;
}

cplx fidelity_amplitude(const SimParams& params, double theta0, double p0, std::int64_t t) {
  return fidelity_series(params, theta0, p0, t).back();
}

double HusimiGrid::p_at(std::size_t j) const noexcept {
  return -kPi + static_cast<double>(j) * d_p();
}

double HusimiGrid::total() const noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s * d_theta() * d_p() / (kTwoPi * hbar);
}

double HusimiGrid::participation() const {
  double s = 0.0, s2 = 0.0;
  for (double v : values) {
    s += v;
    s2 += v * v;
  }
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "empty Husimi distribution");
  return s * s / s2;
}

HusimiGrid husimi(const DetectorState& component, std::size_t n_theta, std::size_t n_p,
                  const SimParams& params) {
  if (n_theta < kMinHusimiResolution || n_p < kMinHusimiResolution) {
    throw Error(ErrorCode::InvalidArgument, "Husimi grid resolution must be at least 16");
  }
  if (component.size() != params.size()) {
    throw Error(ErrorCode::InvalidArgument, "state size does not match n_levels");
  }
  const DetectorState psi = detector::to_angle(component);
  const std::size_t n = psi.size();
  const double hbar = params.hbar();
  const double sigma = detector::packet_width(params);
  const double dtheta_grid = kTwoPi / static_cast<double>(n);
  const auto half_width = std::min<std::size_t>(
      n / 2, static_cast<std::size_t>(std::ceil(kPacketSupport * sigma / dtheta_grid)));

  HusimiGrid grid;
  grid.n_theta = n_theta;
  grid.n_p = n_p;
  grid.hbar = hbar;
  grid.values.assign(n_theta * n_p, 0.0);

  std::vector<std::size_t> index;
  std::vector<double> offset;
  std::vector<double> envelope;
  std::vector<cplx> weighted;
  std::vector<cplx> row(n_p);
  const spectral::Transform dft(n_p);
  const auto np = static_cast<long long>(n_p);
  for (std::size_t i = 0; i < n_theta; ++i) {
    const double theta0 = grid.theta_at(i);
    const auto centre = static_cast<std::int64_t>(std::llround(theta0 / dtheta_grid));
    index.clear();
    offset.clear();
    envelope.clear();
    weighted.clear();
    // Support of the coherent state around theta0, wrapped on the ring.
    const std::size_t count = std::min(n, 2 * half_width + 1);
    double norm2 = 0.0;
    for (std::size_t q = 0; q < count; ++q) {
      const std::int64_t raw = centre - static_cast<std::int64_t>(half_width) + static_cast<std::int64_t>(q);
      const auto j = static_cast<std::size_t>(((raw % static_cast<std::int64_t>(n)) + static_cast<std::int64_t>(n)) %
                                              static_cast<std::int64_t>(n));
      const double theta = angle_at(j, n);
      index.push_back(j);
      double d = theta - theta0;
      d -= kTwoPi * std::round(d / kTwoPi);
      offset.push_back(d);
      const double g = std::abs(detector::packet_amplitude(theta, theta0, 0.0, sigma, hbar));
      envelope.push_back(g);
      norm2 += g * g;
    }
    const double inv_norm = 1.0 / std::sqrt(norm2);
    for (std::size_t q = 0; q < index.size(); ++q) {
      weighted.push_back(envelope[q] * inv_norm * psi.amplitudes[index[q]]);
    }
    // Offsets are integer multiples m of hbar plus a row-wide shift, so the
    // overlaps with p_j = -pi + 2 pi j / n_p form a length n_p DFT over m.
    double shift = static_cast<double>(centre) * dtheta_grid - theta0;
    shift -= kTwoPi * std::round(shift / kTwoPi);
    std::fill(row.begin(), row.end(), cplx{0.0, 0.0});
    for (std::size_t q = 0; q < index.size(); ++q) {
      const auto m = std::llround((offset[q] - shift) / dtheta_grid);
      const auto slot = static_cast<std::size_t>(((m % np) + np) % np);
      row[slot] += (m % 2 == 0) ? weighted[q] : -weighted[q];
    }
    dft.forward(row);
    for (std::size_t jp = 0; jp < n_p; ++jp) grid.values[jp * n_theta + i] = std::norm(row[jp]);
  }
  return grid;
}

double box_integral(const HusimiGrid& grid, double theta_c, double p_c, double side) {
  if (!(side > 0.0)) throw Error(ErrorCode::InvalidArgument, "box side must be positive");
  const double half = 0.5 * side;
  double inside = 0.0, all = 0.0;
  for (std::size_t jp = 0; jp < grid.n_p; ++jp) {
    const bool p_in = torus_distance(grid.p_at(jp), p_c) <= half;
    for (std::size_t i = 0; i < grid.n_theta; ++i) {
      const double v = grid.values[jp * grid.n_theta + i];
      all += v;
      if (p_in && torus_distance(grid.theta_at(i), theta_c) <= half) inside += v;
    }
  }
  if (!(all > 0.0)) throw Error(ErrorCode::InvalidArgument, "empty Husimi distribution");
  return inside / all;
}

namespace {

DetectorState normalized(const CVector& amps) {
  DetectorState s;
  s.amplitudes = amps;
  const double norm = s.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "conditional component has zero weight");
  for (auto& c : s.amplitudes) c /= norm;
  return s;
}

}  // namespace

std::vector<std::array<DetectorState, 2>> conditional_series(const SimParams& params, cplx alpha,
                                                             cplx beta, double theta0, double p0,
                                                             ConditionalMode mode) {
  const FloquetOperator floquet(params);
  const DetectorState psi = detector::init_gaussian(theta0, p0, params);
  std::vector<std::array<DetectorState, 2>> out;
  out.reserve(static_cast<std::size_t>(params.t_max()) + 1);
  if (mode == ConditionalMode::Component) {
    const double qnorm = std::norm(alpha) + std::norm(beta);
    if (std::abs(qnorm - 1.0) > 1e-10) {
      throw Error(ErrorCode::InvalidArgument, "qubit amplitudes must be normalized");
    }
    CoupledState state = CoupledState::product(alpha, beta, psi);
    out.push_back({normalized(state.up), normalized(state.down)});
    for (std::int64_t t = 1; t <= params.t_max(); ++t) {
      floquet.apply(state);
      out.push_back({normalized(state.up), normalized(state.down)});
    }
  } else {
    CVector up = psi.amplitudes;
    CVector down = psi.amplitudes;
    out.push_back({normalized(up), normalized(down)});
    for (std::int64_t t = 1; t <= params.t_max(); ++t) {
      floquet.apply_detector(up, +1);
      floquet.apply_detector(down, -1);
      out.push_back({normalized(up), normalized(down)});
    }
  }
  return out;
}

DetectorState conditional_state(const SimParams& params, cplx alpha, cplx beta, double theta0,
                                double p0, std::int64_t t, Spin spin, ConditionalMode mode) {
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "t must be non-negative");
  const auto series = conditional_series(params.with_t_max(t), alpha, beta, theta0, p0, mode);
  return series.back()[spin == Spin::Up ? 0 : 1];
}

BoxSeries box_integral_series(const SimParams& params, cplx alpha, cplx beta, double theta0,
                              double p0, const BoxSpec& box, ConditionalMode mode) {
  const auto series = conditional_series(params, alpha, beta, theta0, p0, mode);
  BoxSeries out;
  for (const auto& pair : series) {
    const HusimiGrid up = husimi(pair[0], box.n_theta, box.n_p, params);
    const HusimiGrid down = husimi(pair[1], box.n_theta, box.n_p, params);
    out.up.push_back(box_integral(up, box.theta_c, box.p_c, box.side));
    out.down.push_back(box_integral(down, box.theta_c, box.p_c, box.side));
  }
  return out;
}

}  // namespace qkr::coupled

#include "qkrdet/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "qkrdet/coupled.hpp"
#include "qkrdet/error.hpp"

namespace qkr::analysis {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares_line(std::span<const double> t, std::span<const double> y) {
  const auto n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double mt = st / n, my = sy / n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  LineFit f;
  f.slope = sty / stt;
  f.intercept = my - f.slope * mt;
  return f;
}

bool is_local_max(std::span<const double> s, std::size_t t) {
  return t > 0 && t + 1 < s.size() && s[t] > s[t - 1] && s[t] >= s[t + 1];
}

DecayFit log_linear_fit(std::span<const double> series, const std::vector<std::size_t>& points) {
  std::vector<double> ts, ys;
  for (std::size_t t : points) {
    if (!(series[t] > 0.0)) continue;
    ts.push_back(static_cast<double>(t));
    ys.push_back(std::log(series[t]));
  }
  if (ts.size() < 2) throw Error(ErrorCode::NonDecaying, "not enough positive points to fit");
  const LineFit line = least_squares_line(ts, ys);
  DecayFit fit;
  fit.rate = -line.slope;
  fit.amplitude = std::exp(line.intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double model = fit.amplitude * std::exp(-fit.rate * ts[i]);
    const double r = std::exp(ys[i]) - model;
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(ts.size()));
  return fit;
}

constexpr double kPi = std::numbers::pi;

// Local maxima in [1, hi) when there are at least five, otherwise every point
// that exceeds all later points in that range.
std::vector<std::size_t> envelope_points(std::span<const double> series, std::size_t hi) {
  std::vector<std::size_t> maxima;
  for (std::size_t t = 1; t < hi; ++t) {
    if (is_local_max(series, t)) maxima.push_back(t);
  }
  if (maxima.size() >= 5) return maxima;
  std::vector<std::size_t> record;
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t t = hi - 1; t >= 1; --t) {
    if (series[t] > running) {
      record.push_back(t);
      running = series[t];
    }
  }
  std::reverse(record.begin(), record.end());
  return record;
}

double wrap_phase(double phi) {
  double p = std::fmod(phi, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  return p;
}

}  // namespace

DecayFit fit_exp_decay(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < kMinExpSeries) throw Error(ErrorCode::InvalidArgument, "series needs at least 20 points");

  const std::size_t tail = n / 4;
  double floor = 0.0;
  for (std::size_t t = n - tail; t < n; ++t) floor += series[t];
  floor /= static_cast<double>(tail);
  const double threshold = std::max(3.0 * floor, 1e-12);

  std::size_t hi = 0;
  for (std::size_t t = 1; t < n; ++t) {
    if (series[t] < threshold) {
      hi = t;
      break;
    }
  }
  if (hi == 0) throw Error(ErrorCode::NonDecaying, "series never decays below its floor");

  std::vector<std::size_t> points = envelope_points(series, hi);
  if (points.size() < 5) {
    // A deep oscillation minimum can cut the window short; retry up to the
    // first local maximum below the threshold, where the envelope itself crosses.
    for (std::size_t t = hi + 1; t + 1 < n; ++t) {
      if (is_local_max(series, t) && series[t] < threshold) {
        hi = t;
        points = envelope_points(series, hi);
        break;
      }
    }
  }
  if (points.size() < 5) throw Error(ErrorCode::NonDecaying, "fit window holds fewer than 5 points");

  DecayFit fit = log_linear_fit(series, points);
  fit.t_lo = 1;
  fit.t_hi = static_cast<std::int64_t>(hi);
  return fit;
}

DecayFit fit_damped_oscillation(std::span<const double> y, double frequency_guess) {
  const std::size_t n = y.size();
  if (n < kMinSineSeries) throw Error(ErrorCode::InvalidArgument, "series needs at least 50 points");

  std::vector<double> ts(n);
  for (std::size_t t = 0; t < n; ++t) ts[t] = static_cast<double>(t);

  double gamma0 = 1.0 / static_cast<double>(n);
  {
    std::vector<double> mag(n);
    for (std::size_t t = 0; t < n; ++t) mag[t] = std::abs(y[t]);
    try {
      gamma0 = std::max(fit_exp_decay(mag).rate, 1.0 / static_cast<double>(n));
    } catch (const Error&) {
    }
  }

  auto sse_of = [&](double a, double b, double phi, double g) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double r = a * std::sin(b * ts[t] + phi) * std::exp(-g * ts[t]) - y[t];
      s += r * r;
    }
    return s;
  };

  double a = 0.0, b = frequency_guess, phi = 0.0, g = gamma0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kPhaseGridPoints; ++k) {
    const double trial = 2.0 * kPi * k / kPhaseGridPoints;
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double m = std::sin(b * ts[t] + trial) * std::exp(-g * ts[t]);
      num += m * y[t];
      den += m * m;
    }
    if (!(den > 0.0)) continue;
    const double amp = num / den;
    const double s = sse_of(amp, b, trial, g);
    if (s < best) {
      best = s;
      a = amp;
      phi = trial;
    }
  }

  DecayFit fit;
  fit.converged = false;
  Eigen::MatrixXd J(n, 4);
  Eigen::VectorXd r(n);
  double sse = sse_of(a, b, phi, g);
  int iter = 0;
  for (; iter < kMaxGaussNewtonIterations; ++iter) {
    for (std::size_t t = 0; t < n; ++t) {
      const double e = std::exp(-g * ts[t]);
      const double s = std::sin(b * ts[t] + phi);
      const double c = std::cos(b * ts[t] + phi);
      r(t) = a * s * e - y[t];
      J(t, 0) = s * e;
      J(t, 1) = a * ts[t] * c * e;
      J(t, 2) = a * c * e;
      J(t, 3) = -a * ts[t] * s * e;
    }
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
    double lambda = 1.0;
    bool improved = false;
    double next_sse = sse;
    double na = a, nb = b, nphi = phi, ng = g;
    for (int halving = 0; halving < 40; ++halving) {
      na = a + lambda * step(0);
      nb = b + lambda * step(1);
      nphi = phi + lambda * step(2);
      ng = g + lambda * step(3);
      next_sse = sse_of(na, nb, nphi, ng);
      if (std::isfinite(next_sse) && next_sse < sse) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      // No descent direction left at working precision.
      fit.converged = true;
      break;
    }
    const double change = (sse - next_sse) / std::max(sse, std::numeric_limits<double>::min());
    a = na;
    b = nb;
    phi = nphi;
    g = ng;
    sse = next_sse;
    if (change < kGaussNewtonTolerance) {
      fit.converged = true;
      ++iter;
      break;
    }
  }

  if (b < 0.0) {
    b = -b;
    phi = kPi - phi;
  }
  if (a < 0.0) {
    a = -a;
    phi += kPi;
  }
  fit.amplitude = a;
  fit.frequency = b;
  fit.phase = wrap_phase(phi);
  fit.rate = g;
  fit.t_lo = 0;
  fit.t_hi = static_cast<std::int64_t>(n) - 1;
  fit.rms_residual = std::sqrt(sse / static_cast<double>(n));
  fit.iterations = iter;
  return fit;
}

DecayFit fit_damped_sine(std::span<const double> series, double frequency_guess) {
  std::vector<double> dev(series.begin(), series.end());
  for (auto& v : dev) v -= 0.5;
  return fit_damped_oscillation(dev, frequency_guess);
}

double residual_level(std::span<const double> series, std::int64_t t_lo, std::int64_t t_hi) {
  if (t_lo < 0 || t_hi < t_lo) throw Error(ErrorCode::InvalidArgument, "empty averaging window");
  if (static_cast<std::size_t>(t_hi) >= series.size()) {
    throw Error(ErrorCode::InvalidArgument, "averaging window exceeds the series");
  }
  double s = 0.0;
  for (auto t = t_lo; t <= t_hi; ++t) s += series[static_cast<std::size_t>(t)];
  return s / static_cast<double>(t_hi - t_lo + 1);
}

DecayFit fit_presaturation_decay(std::span<const double> series, double floor) {
  const double threshold = 3.0 * floor;
  std::size_t end = series.size();
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (series[t] < threshold) {
      end = t;
      break;
    }
  }
  if (end < 4) throw Error(ErrorCode::NonDecaying, "fewer than 3 points before saturation");
  std::vector<std::size_t> points;
  for (std::size_t t = 1; t < end; ++t) points.push_back(t);
  DecayFit fit = log_linear_fit(series, points);
  fit.t_lo = 1;
  fit.t_hi = static_cast<std::int64_t>(end) - 1;
  return fit;
}

double slope_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorCode::InvalidArgument, "slope: bad input");
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  return sxy / sxx;
}

double inverse_square_coefficient(std::span<const double> eps, std::span<const double> gamma) {
  std::vector<double> inv(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) inv[i] = 1.0 / (eps[i] * eps[i]);
  return slope_through_origin(inv, gamma);
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "epsilon") return SweepParameter::Epsilon;
  if (name == "epsilon_c") return SweepParameter::EpsilonC;
  if (name == "K") return SweepParameter::K;
  if (name == "delta") return SweepParameter::Delta;
  if (name == "n_levels") return SweepParameter::NLevels;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + name + "'");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Epsilon: return "epsilon";
    case SweepParameter::EpsilonC: return "epsilon_c";
    case SweepParameter::K: return "K";
    case SweepParameter::Delta: return "delta";
    case SweepParameter::NLevels: return "n_levels";
  }
  return "?";
}

std::string flag_string(unsigned flags) {
  if (flags == kSweepOk) return "ok";
  std::string out;
  auto add = [&](const char* s) {
    if (!out.empty()) out += '|';
    out += s;
  };
  if (flags & kGamma2Failed) add("gamma2_failed");
  if (flags & kGamma1Failed) add("gamma1_failed");
  if (flags & kGamma1Unconverged) add("gamma1_unconverged");
  if (flags & kGamma1Overdamped) add("gamma1_overdamped");
  return out;
}

SimParams sweep_params(const SimParams& base, SweepParameter vary, double value) {
  switch (vary) {
    case SweepParameter::Epsilon: return base.with_epsilon_c(value * base.hbar());
    case SweepParameter::EpsilonC: return base.with_epsilon_c(value);
    case SweepParameter::K: return base.with_K(value);
    case SweepParameter::Delta: return base.with_delta(value);
    case SweepParameter::NLevels: {
      const double rounded = std::round(value);
      if (rounded != value || rounded < 2) {
        throw Error(ErrorCode::InvalidArgument, "n_levels sweep values must be integers");
      }
      return SimParams::from_levels_scaled(base.K(), base.epsilon(), base.delta(),
                                           static_cast<std::int64_t>(rounded), base.t_max());
    }
  }
  throw Error(ErrorCode::InvalidArgument, "bad sweep parameter");
}

namespace {

SweepRow run_row(const SweepRequest& req, double value) {
  SweepRow row;
  row.value = value;
  const SimParams params = sweep_params(req.base, req.vary, value);
  const coupled::Trajectory traj = coupled::evolve(params, req.alpha, req.beta, req.theta0, req.p0);
  try {
    row.dephasing = fit_exp_decay(traj.abs_rho01());
    row.gamma2 = row.dephasing.rate;
  } catch (const Error&) {
    row.flags |= kGamma2Failed;
    row.gamma2 = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> deviation = traj.rho11();
  for (auto& v : deviation) v = std::abs(v - 0.5);
  try {
    row.relaxation = fit_damped_sine(traj.rho11(), 2.0 * params.delta());
    if (!row.relaxation.converged) row.flags |= kGamma1Unconverged;
    // No oscillation left to fit: relaxation is a sum of exponentials, so the
    // slow rate comes from the envelope of |rho11 - 1/2| instead.
    if (!row.relaxation.converged || row.relaxation.frequency <= row.relaxation.rate) {
      row.relaxation = fit_exp_decay(deviation);
      row.flags |= kGamma1Overdamped;
    }
    row.gamma1 = row.relaxation.rate;
  } catch (const Error&) {
    row.flags |= kGamma1Failed;
    row.gamma1 = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepRequest& request, unsigned threads) {
  if (request.values.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one value");
  // Validate every parameter set before starting any work.
  for (double v : request.values) (void)sweep_params(request.base, request.vary, v);

  std::vector<SweepRow> rows(request.values.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(request.values.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(rows.size());
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        rows[i] = run_row(request, request.values[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace qkr::analysis

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkrdet/qstate.hpp"

namespace qkr::analysis {

struct DecayFit {
  double rate = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  std::int64_t t_lo = 0;
  std::int64_t t_hi = 0;
  double rms_residual = 0.0;
  bool converged = true;
  int iterations = 0;
};

inline constexpr std::size_t kMinExpSeries = 20;
inline constexpr std::size_t kMinSineSeries = 50;
inline constexpr int kMaxGaussNewtonIterations = 200;
inline constexpr double kGaussNewtonTolerance = 1e-10;
inline constexpr int kPhaseGridPoints = 64;

/// Exponential decay rate of a series that relaxes onto a fluctuation floor.
///
/// The floor is the mean of the final quarter. The fit window runs from t = 1
/// up to the first t where the series drops below max(3 * floor, 1e-12).
/// Inside the window log(series) is fitted by linear least squares on the
/// local maxima (the upper envelope of any superimposed oscillation); with
/// fewer than five maxima the monotone upper envelope (every point that
/// exceeds all later points in the window) is used instead, which for a
/// monotone series is every point. If that leaves fewer than five points
/// (an oscillation minimum dipping under the threshold early), the window is
/// extended to the first local maximum below the threshold.
///
/// Throws Error(NonDecaying) when the series never reaches the floor or the
/// window holds fewer than five points.
DecayFit fit_exp_decay(std::span<const double> series);

/// Fits y(t) = a sin(b t + phi) exp(-G t) by Gauss-Newton with step halving.
/// Initial guesses: b = frequency_guess, G from an envelope fit of |y|, phi by
/// a grid search with a solved linearly at each grid point. A fit that hits
/// the iteration cap is returned with converged = false.
DecayFit fit_damped_oscillation(std::span<const double> deviation, double frequency_guess);

/// fit_damped_oscillation applied to (series - 1/2).
DecayFit fit_damped_sine(std::span<const double> series, double frequency_guess);

/// Mean of series[t_lo .. t_hi] (inclusive).
double residual_level(std::span<const double> series, std::int64_t t_lo, std::int64_t t_hi);

/// Log-linear least squares of series over t = 1 .. t_s - 1, where t_s is the
/// first t >= 1 with series[t] < 3 * floor: the exponential stretch before a
/// decaying overlap reaches its saturation floor.
DecayFit fit_presaturation_decay(std::span<const double> series, double floor);

/// Least-squares A in y = A x.
double slope_through_origin(std::span<const double> x, std::span<const double> y);

/// Least-squares B in gamma = B / eps^2.
double inverse_square_coefficient(std::span<const double> eps, std::span<const double> gamma);

enum class SweepParameter {
  Epsilon,    // epsilon = epsilon_c / hbar, hbar fixed
  EpsilonC,
  K,
  Delta,
  NLevels,    // hbar = 2 pi / n_levels, epsilon kept fixed
};

SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepParameter p);

enum SweepFlag : unsigned {
  kSweepOk = 0,
  kGamma2Failed = 1u << 0,
  kGamma1Failed = 1u << 1,
  kGamma1Unconverged = 1u << 2,
  kGamma1Overdamped = 1u << 3,  // gamma1 from the exponential envelope fit
};

std::string flag_string(unsigned flags);

struct SweepRow {
  double value = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  unsigned flags = kSweepOk;
  DecayFit relaxation;
  DecayFit dephasing;
};

struct SweepRequest {
  SimParams base;
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  double theta0 = 0.0;
  double p0 = 0.0;
  SweepParameter vary = SweepParameter::Epsilon;
  std::vector<double> values;
};

/// Applies one sweep value to the template parameters.
SimParams sweep_params(const SimParams& base, SweepParameter vary, double value);

/// Runs evolve plus both fits for every value. Rows come back in input order
/// and do not depend on `threads`. Fit failures are flagged on the row.
/// gamma1 is the damped-sine rate while that fit converges on a genuine
/// oscillation (frequency above rate); otherwise it is fit_exp_decay of
/// |rho11 - 1/2| and the row carries kGamma1Overdamped.
std::vector<SweepRow> sweep(const SweepRequest& request, unsigned threads);

}  // namespace qkr::analysis

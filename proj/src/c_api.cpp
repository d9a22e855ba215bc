#include "qkrdet/qkrdet.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>

#include "qkrdet/analysis.hpp"
#include "qkrdet/channel.hpp"
#include "qkrdet/coupled.hpp"
#include "qkrdet/detector.hpp"
#include "qkrdet/error.hpp"

struct qkr_params {
  qkr::SimParams value;
};

struct qkr_trajectory {
  qkr::coupled::Trajectory value;
};

struct qkr_sweep {
  std::vector<qkr::analysis::SweepRow> rows;
};

struct qkr_husimi {
  qkr::coupled::HusimiGrid grid;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_flag_string;

qkr_status set_error(qkr_status status, const char* message) {
  g_last_error = message;
  return status;
}

qkr_status to_status(qkr::ErrorCode code) {
  switch (code) {
    case qkr::ErrorCode::InvalidArgument: return QKR_ERR_INVALID_ARGUMENT;
    case qkr::ErrorCode::DimensionTooLarge: return QKR_ERR_DIMENSION_TOO_LARGE;
    case qkr::ErrorCode::WrongRepresentation: return QKR_ERR_WRONG_REPRESENTATION;
    case qkr::ErrorCode::NonDecaying: return QKR_ERR_NON_DECAYING;
    case qkr::ErrorCode::NotConverged: return QKR_ERR_NOT_CONVERGED;
    case qkr::ErrorCode::Io: return QKR_ERR_IO;
  }
  return QKR_ERR_INTERNAL;
}

template <class F>
qkr_status guarded(F&& body) {
  try {
    std::forward<F>(body)();
    g_last_error.clear();
    return QKR_OK;
  } catch (const qkr::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(QKR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(QKR_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(QKR_ERR_INTERNAL, "unknown failure");
  }
}

#define QKR_REQUIRE(ptr)                                                   \
  do {                                                                     \
    if ((ptr) == nullptr) return set_error(QKR_ERR_NULL_POINTER, #ptr " is null"); \
  } while (0)

qkr::cplx alpha_of(const qkr_qubit& q) { return {q.alpha_re, q.alpha_im}; }
qkr::cplx beta_of(const qkr_qubit& q) { return {q.beta_re, q.beta_im}; }

void copy_fit(const qkr::analysis::DecayFit& f, qkr_fit* out) {
  out->rate = f.rate;
  out->amplitude = f.amplitude;
  out->frequency = f.frequency;
  out->phase = f.phase;
  out->t_lo = f.t_lo;
  out->t_hi = f.t_hi;
  out->rms_residual = f.rms_residual;
  out->converged = f.converged ? 1 : 0;
  out->iterations = f.iterations;
}

qkr::CVector unpack(const double* interleaved, size_t n) {
  qkr::CVector v(n);
  for (size_t i = 0; i < n; ++i) v[i] = {interleaved[2 * i], interleaved[2 * i + 1]};
  return v;
}

void pack(const qkr::CVector& v, double* interleaved) {
  for (size_t i = 0; i < v.size(); ++i) {
    interleaved[2 * i] = v[i].real();
    interleaved[2 * i + 1] = v[i].imag();
  }
}

qkr_status step_with(const qkr_params* params, double* up, double* down, size_t n, bool dense) {
  QKR_REQUIRE(params);
  QKR_REQUIRE(up);
  QKR_REQUIRE(down);
  if (n != params->value.size()) return set_error(QKR_ERR_BUFFER_SIZE, "state size differs from n_levels");
  return guarded([&] {
    qkr::CoupledState s{unpack(up, n), unpack(down, n)};
    s = dense ? qkr::dense_oracle_step(s, params->value) : qkr::coupled::coupled_step(s, params->value);
    pack(s.up, up);
    pack(s.down, down);
  });
}

qkr::coupled::ConditionalMode mode_of(int mode) {
  if (mode == QKR_MODE_COMPONENT) return qkr::coupled::ConditionalMode::Component;
  if (mode == QKR_MODE_SEPARATE) return qkr::coupled::ConditionalMode::Separate;
  throw qkr::Error(qkr::ErrorCode::InvalidArgument, "unknown conditional mode");
}

}  // namespace

extern "C" {

const char* qkr_version(void) { return QKRDET_VERSION_STRING; }

const char* qkr_last_error(void) { return g_last_error.c_str(); }

const char* qkr_status_name(qkr_status status) {
  switch (status) {
    case QKR_OK: return "ok";
    case QKR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QKR_ERR_DIMENSION_TOO_LARGE: return "dimension_too_large";
    case QKR_ERR_WRONG_REPRESENTATION: return "wrong_representation";
    case QKR_ERR_NON_DECAYING: return "non_decaying";
    case QKR_ERR_NOT_CONVERGED: return "not_converged";
    case QKR_ERR_IO: return "io";
    case QKR_ERR_NULL_POINTER: return "null_pointer";
    case QKR_ERR_BUFFER_SIZE: return "buffer_size";
    case QKR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

qkr_status qkr_params_create(double K, double epsilon_c, double delta, double hbar,
                             int64_t n_levels, int64_t t_max, qkr_params** out) {
  QKR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new qkr_params{qkr::SimParams(K, epsilon_c, delta, hbar, n_levels, t_max)}; });
}

qkr_status qkr_params_from_levels(double K, double epsilon, double delta, int64_t n_levels,
                                  int64_t t_max, qkr_params** out) {
  QKR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new qkr_params{qkr::SimParams::from_levels_scaled(K, epsilon, delta, n_levels, t_max)};
  });
}

qkr_status qkr_params_get(const qkr_params* params, qkr_params_values* out) {
  QKR_REQUIRE(params);
  QKR_REQUIRE(out);
  const auto& p = params->value;
  *out = {p.K(), p.epsilon_c(), p.epsilon(), p.delta(), p.hbar(), p.n_levels(), p.t_max()};
  g_last_error.clear();
  return QKR_OK;
}

void qkr_params_destroy(qkr_params* params) { delete params; }

qkr_status qkr_coupled_step(const qkr_params* params, double* up, double* down, size_t n) {
  return step_with(params, up, down, n, false);
}

qkr_status qkr_dense_step(const qkr_params* params, double* up, double* down, size_t n) {
  return step_with(params, up, down, n, true);
}

qkr_status qkr_evolve(const qkr_params* params, qkr_qubit qubit, double theta0, double p0,
                      qkr_trajectory** out) {
  QKR_REQUIRE(params);
  QKR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new qkr_trajectory{
        qkr::coupled::evolve(params->value, alpha_of(qubit), beta_of(qubit), theta0, p0)};
  });
}

size_t qkr_trajectory_length(const qkr_trajectory* traj) {
  return traj == nullptr ? 0 : traj->value.records.size();
}

qkr_status qkr_trajectory_record(const qkr_trajectory* traj, size_t index, qkr_record* out) {
  QKR_REQUIRE(traj);
  QKR_REQUIRE(out);
  if (index >= traj->value.records.size()) return set_error(QKR_ERR_INVALID_ARGUMENT, "record index out of range");
  const auto& r = traj->value.records[index];
  *out = {r.t, r.rho01.real(), r.rho01.imag(), r.rho00, r.rho11, r.p2, r.purity};
  g_last_error.clear();
  return QKR_OK;
}

void qkr_trajectory_destroy(qkr_trajectory* traj) { delete traj; }

qkr_status qkr_fit_exp_decay(const double* series, size_t n, qkr_fit* out) {
  QKR_REQUIRE(series);
  QKR_REQUIRE(out);
  return guarded([&] { copy_fit(qkr::analysis::fit_exp_decay({series, n}), out); });
}

qkr_status qkr_fit_damped_sine(const double* series, size_t n, double frequency_guess, qkr_fit* out) {
  QKR_REQUIRE(series);
  QKR_REQUIRE(out);
  return guarded([&] { copy_fit(qkr::analysis::fit_damped_sine({series, n}, frequency_guess), out); });
}

qkr_status qkr_fit_damped_oscillation(const double* series, size_t n, double frequency_guess,
                                      qkr_fit* out) {
  QKR_REQUIRE(series);
  QKR_REQUIRE(out);
  return guarded(
      [&] { copy_fit(qkr::analysis::fit_damped_oscillation({series, n}, frequency_guess), out); });
}

qkr_status qkr_fit_presaturation(const double* series, size_t n, double floor, qkr_fit* out) {
  QKR_REQUIRE(series);
  QKR_REQUIRE(out);
  return guarded([&] { copy_fit(qkr::analysis::fit_presaturation_decay({series, n}, floor), out); });
}

qkr_status qkr_residual_level(const double* series, size_t n, int64_t t_lo, int64_t t_hi, double* out) {
  QKR_REQUIRE(series);
  QKR_REQUIRE(out);
  return guarded([&] { *out = qkr::analysis::residual_level({series, n}, t_lo, t_hi); });
}

qkr_status qkr_sweep_run(const qkr_params* base, qkr_qubit qubit, double theta0, double p0,
                         const char* vary, const double* values, size_t n_values, unsigned threads,
                         qkr_sweep** out) {
  QKR_REQUIRE(base);
  QKR_REQUIRE(vary);
  QKR_REQUIRE(values);
  QKR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    qkr::analysis::SweepRequest req;
    req.base = base->value;
    req.alpha = alpha_of(qubit);
    req.beta = beta_of(qubit);
    req.theta0 = theta0;
    req.p0 = p0;
    req.vary = qkr::analysis::parse_sweep_parameter(vary);
    req.values.assign(values, values + n_values);
    *out = new qkr_sweep{qkr::analysis::sweep(req, threads)};
  });
}

size_t qkr_sweep_length(const qkr_sweep* sweep) { return sweep == nullptr ? 0 : sweep->rows.size(); }

qkr_status qkr_sweep_get(const qkr_sweep* sweep, size_t index, qkr_sweep_row* out) {
  QKR_REQUIRE(sweep);
  QKR_REQUIRE(out);
  if (index >= sweep->rows.size()) return set_error(QKR_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = sweep->rows[index];
  out->value = r.value;
  out->gamma1 = r.gamma1;
  out->gamma2 = r.gamma2;
  out->flags = r.flags;
  copy_fit(r.relaxation, &out->relaxation);
  copy_fit(r.dephasing, &out->dephasing);
  g_last_error.clear();
  return QKR_OK;
}

const char* qkr_sweep_flag_string(unsigned flags) {
  g_flag_string = qkr::analysis::flag_string(flags);
  return g_flag_string.c_str();
}

void qkr_sweep_destroy(qkr_sweep* sweep) { delete sweep; }

qkr_status qkr_husimi_conditional(const qkr_params* params, qkr_qubit qubit, double theta0, double p0,
                                  int64_t t, int spin, int mode, size_t n_theta, size_t n_p,
                                  qkr_husimi** out) {
  QKR_REQUIRE(params);
  QKR_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (spin != QKR_SPIN_UP && spin != QKR_SPIN_DOWN) {
      throw qkr::Error(qkr::ErrorCode::InvalidArgument, "spin must be up or down");
    }
    const auto s = spin == QKR_SPIN_UP ? qkr::coupled::Spin::Up : qkr::coupled::Spin::Down;
    const auto state = qkr::coupled::conditional_state(params->value, alpha_of(qubit), beta_of(qubit),
                                                       theta0, p0, t, s, mode_of(mode));
    *out = new qkr_husimi{qkr::coupled::husimi(state, n_theta, n_p, params->value)};
  });
}

qkr_status qkr_husimi_dims(const qkr_husimi* h, size_t* n_theta, size_t* n_p) {
  QKR_REQUIRE(h);
  QKR_REQUIRE(n_theta);
  QKR_REQUIRE(n_p);
  *n_theta = h->grid.n_theta;
  *n_p = h->grid.n_p;
  g_last_error.clear();
  return QKR_OK;
}

qkr_status qkr_husimi_values(const qkr_husimi* h, double* out, size_t n) {
  QKR_REQUIRE(h);
  QKR_REQUIRE(out);
  if (n != h->grid.values.size()) return set_error(QKR_ERR_BUFFER_SIZE, "buffer must hold n_theta * n_p values");
  std::memcpy(out, h->grid.values.data(), n * sizeof(double));
  g_last_error.clear();
  return QKR_OK;
}

qkr_status qkr_husimi_box(const qkr_husimi* h, double theta_c, double p_c, double side, double* out) {
  QKR_REQUIRE(h);
  QKR_REQUIRE(out);
  return guarded([&] { *out = qkr::coupled::box_integral(h->grid, theta_c, p_c, side); });
}

void qkr_husimi_destroy(qkr_husimi* h) { delete h; }

qkr_status qkr_wd_series(const qkr_params* params, qkr_qubit qubit, double theta0, double p0,
                         qkr_box box, int mode, double* up, double* down, size_t n) {
  QKR_REQUIRE(params);
  QKR_REQUIRE(up);
  QKR_REQUIRE(down);
  if (n != static_cast<size_t>(params->value.t_max() + 1)) {
    return set_error(QKR_ERR_BUFFER_SIZE, "buffers must hold t_max + 1 values");
  }
  return guarded([&] {
    const qkr::coupled::BoxSpec spec{box.theta_c, box.p_c, box.side, box.n_theta, box.n_p};
    const auto series = qkr::coupled::box_integral_series(params->value, alpha_of(qubit), beta_of(qubit),
                                                          theta0, p0, spec, mode_of(mode));
    std::copy(series.up.begin(), series.up.end(), up);
    std::copy(series.down.begin(), series.down.end(), down);
  });
}

qkr_status qkr_lyapunov(double K, int64_t n_orbits, int64_t n_steps, uint64_t seed, double* out) {
  QKR_REQUIRE(out);
  return guarded([&] { *out = qkr::detector::lyapunov(K, n_orbits, n_steps, seed); });
}

qkr_status qkr_fidelity_series(const qkr_params* params, double theta0, double p0, double* re,
                               double* im, size_t n) {
  QKR_REQUIRE(params);
  QKR_REQUIRE(re);
  QKR_REQUIRE(im);
  if (n == 0) return set_error(QKR_ERR_BUFFER_SIZE, "empty fidelity buffer");
  return guarded([&] {
    const auto f = qkr::coupled::fidelity_series(params->value, theta0, p0, static_cast<int64_t>(n) - 1);
    for (size_t t = 0; t < n; ++t) {
      re[t] = f[t].real();
      im[t] = f[t].imag();
    }
  });
}

qkr_status qkr_channel_map(const double b0[3], double epsilon, double delta, int64_t t_max, double* out,
                           size_t n) {
  QKR_REQUIRE(b0);
  QKR_REQUIRE(out);
  if (t_max < 0 || n != static_cast<size_t>(t_max + 1)) {
    return set_error(QKR_ERR_BUFFER_SIZE, "buffer must hold t_max + 1 vectors");
  }
  return guarded([&] {
    const auto recs = qkr::channel::map_trajectory({b0[0], b0[1], b0[2]}, epsilon, delta, t_max);
    for (size_t t = 0; t < recs.size(); ++t) {
      out[3 * t] = recs[t].bloch.x;
      out[3 * t + 1] = recs[t].bloch.y;
      out[3 * t + 2] = recs[t].bloch.z;
    }
  });
}

qkr_status qkr_channel_continuous(const double b0[3], double epsilon, double delta, double t,
                                  double out[3]) {
  QKR_REQUIRE(b0);
  QKR_REQUIRE(out);
  return guarded([&] {
    const auto b = qkr::channel::continuous_solution({b0[0], b0[1], b0[2]}, epsilon, delta, t);
    out[0] = b.x;
    out[1] = b.y;
    out[2] = b.z;
  });
}

qkr_status qkr_phase_kick_factor(double epsilon, double* re, double* im) {
  QKR_REQUIRE(re);
  QKR_REQUIRE(im);
  return guarded([&] {
    const auto f = qkr::channel::phase_kick_factor(epsilon);
    *re = f.real();
    *im = f.imag();
  });
}

}  // extern "C"

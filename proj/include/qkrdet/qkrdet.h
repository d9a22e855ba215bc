/* C interface to the qubit / kicked-rotator detector library. */
#ifndef QKRDET_QKRDET_H
#define QKRDET_QKRDET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QKR_API __declspec(dllexport)
#else
#define QKR_API __attribute__((visibility("default")))
#endif

typedef enum qkr_status {
  QKR_OK = 0,
  QKR_ERR_INVALID_ARGUMENT = 1,
  QKR_ERR_DIMENSION_TOO_LARGE = 2,
  QKR_ERR_WRONG_REPRESENTATION = 3,
  QKR_ERR_NON_DECAYING = 4,
  QKR_ERR_NOT_CONVERGED = 5,
  QKR_ERR_IO = 6,
  QKR_ERR_NULL_POINTER = 7,
  QKR_ERR_BUFFER_SIZE = 8,
  QKR_ERR_INTERNAL = 99
} qkr_status;

typedef struct qkr_params qkr_params;
typedef struct qkr_trajectory qkr_trajectory;
typedef struct qkr_sweep qkr_sweep;
typedef struct qkr_husimi qkr_husimi;

/* Qubit amplitudes alpha |0> + beta |1> as {re(alpha), im(alpha), re(beta), im(beta)}. */
typedef struct qkr_qubit {
  double alpha_re, alpha_im, beta_re, beta_im;
} qkr_qubit;

typedef struct qkr_params_values {
  double K;
  double epsilon_c;
  double epsilon; /* epsilon_c / hbar */
  double delta;
  double hbar;
  int64_t n_levels;
  int64_t t_max;
} qkr_params_values;

typedef struct qkr_record {
  int64_t t;
  double rho01_re, rho01_im;
  double rho00, rho11;
  double p2;
  double purity;
} qkr_record;

typedef struct qkr_fit {
  double rate;
  double amplitude;
  double frequency;
  double phase;
  int64_t t_lo, t_hi;
  double rms_residual;
  int converged;
  int iterations;
} qkr_fit;

typedef struct qkr_sweep_row {
  double value;
  double gamma1;
  double gamma2;
  unsigned flags;
  qkr_fit relaxation;
  qkr_fit dephasing;
} qkr_sweep_row;

typedef struct qkr_box {
  double theta_c, p_c, side;
  size_t n_theta, n_p;
} qkr_box;

enum { QKR_SPIN_UP = 0, QKR_SPIN_DOWN = 1 };
/* Component: normalized spin component of the coupled run.
   Separate: uncoupled rotators with kick strengths K + eps_c and K - eps_c. */
enum { QKR_MODE_COMPONENT = 0, QKR_MODE_SEPARATE = 1 };

QKR_API const char* qkr_version(void);
/* Message of the last failed call on this thread ("" if none). */
QKR_API const char* qkr_last_error(void);
QKR_API const char* qkr_status_name(qkr_status status);

QKR_API qkr_status qkr_params_create(double K, double epsilon_c, double delta, double hbar,
                                     int64_t n_levels, int64_t t_max, qkr_params** out);
/* hbar = 2 pi / n_levels, epsilon_c = epsilon * hbar. */
QKR_API qkr_status qkr_params_from_levels(double K, double epsilon, double delta, int64_t n_levels,
                                          int64_t t_max, qkr_params** out);
QKR_API qkr_status qkr_params_get(const qkr_params* params, qkr_params_values* out);
QKR_API void qkr_params_destroy(qkr_params* params);

/* One Floquet step on interleaved (re, im) amplitude arrays of n complex entries each. */
QKR_API qkr_status qkr_coupled_step(const qkr_params* params, double* up, double* down, size_t n);
/* Same step from the dense unitary; n <= 64. */
QKR_API qkr_status qkr_dense_step(const qkr_params* params, double* up, double* down, size_t n);

QKR_API qkr_status qkr_evolve(const qkr_params* params, qkr_qubit qubit, double theta0, double p0,
                              qkr_trajectory** out);
QKR_API size_t qkr_trajectory_length(const qkr_trajectory* traj);
QKR_API qkr_status qkr_trajectory_record(const qkr_trajectory* traj, size_t index, qkr_record* out);
QKR_API void qkr_trajectory_destroy(qkr_trajectory* traj);

QKR_API qkr_status qkr_fit_exp_decay(const double* series, size_t n, qkr_fit* out);
/* Fits 1/2 + a sin(b t + phi) exp(-G t). An unconverged fit returns QKR_OK with converged = 0. */
QKR_API qkr_status qkr_fit_damped_sine(const double* series, size_t n, double frequency_guess,
                                       qkr_fit* out);
QKR_API qkr_status qkr_fit_damped_oscillation(const double* series, size_t n,
                                              double frequency_guess, qkr_fit* out);
QKR_API qkr_status qkr_fit_presaturation(const double* series, size_t n, double floor,
                                         qkr_fit* out);
QKR_API qkr_status qkr_residual_level(const double* series, size_t n, int64_t t_lo, int64_t t_hi,
                                      double* out);

/* vary: "epsilon", "epsilon_c", "K", "delta" or "n_levels". */
QKR_API qkr_status qkr_sweep_run(const qkr_params* base, qkr_qubit qubit, double theta0, double p0,
                                 const char* vary, const double* values, size_t n_values,
                                 unsigned threads, qkr_sweep** out);
QKR_API size_t qkr_sweep_length(const qkr_sweep* sweep);
QKR_API qkr_status qkr_sweep_get(const qkr_sweep* sweep, size_t index, qkr_sweep_row* out);
/* "ok" or '|'-joined failure names. Valid until the next call on this thread. */
QKR_API const char* qkr_sweep_flag_string(unsigned flags);
QKR_API void qkr_sweep_destroy(qkr_sweep* sweep);

QKR_API qkr_status qkr_husimi_conditional(const qkr_params* params, qkr_qubit qubit, double theta0,
                                          double p0, int64_t t, int spin, int mode, size_t n_theta,
                                          size_t n_p, qkr_husimi** out);
QKR_API qkr_status qkr_husimi_dims(const qkr_husimi* h, size_t* n_theta, size_t* n_p);
/* Row-major, n_p rows (momentum ascending from -pi) by n_theta columns. */
QKR_API qkr_status qkr_husimi_values(const qkr_husimi* h, double* out, size_t n);
QKR_API qkr_status qkr_husimi_box(const qkr_husimi* h, double theta_c, double p_c, double side,
                                  double* out);
QKR_API void qkr_husimi_destroy(qkr_husimi* h);

/* Box-integral series for both spins; n must equal t_max + 1. */
QKR_API qkr_status qkr_wd_series(const qkr_params* params, qkr_qubit qubit, double theta0,
                                 double p0, qkr_box box, int mode, double* up, double* down,
                                 size_t n);

QKR_API qkr_status qkr_lyapunov(double K, int64_t n_orbits, int64_t n_steps, uint64_t seed,
                                double* out);

/* Fidelity amplitude f(t) for t = 0 .. n - 1. */
QKR_API qkr_status qkr_fidelity_series(const qkr_params* params, double theta0, double p0,
                                       double* re, double* im, size_t n);

/* Phase-damping map; out holds n = t_max + 1 Bloch vectors as (x, y, z) triples. */
QKR_API qkr_status qkr_channel_map(const double b0[3], double epsilon, double delta,
                                   int64_t t_max, double* out, size_t n);
QKR_API qkr_status qkr_channel_continuous(const double b0[3], double epsilon, double delta,
                                          double t, double out[3]);
QKR_API qkr_status qkr_phase_kick_factor(double epsilon, double* re, double* im);

#ifdef __cplusplus
}
#endif

#endif

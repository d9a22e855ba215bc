#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qkrdet/qkrdet.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_params(void) {
  qkr_params* p = NULL;
  EXPECT(qkr_params_from_levels(4.5, 0.5, 0.1, 256, 10, &p) == QKR_OK);
  qkr_params_values v;
  EXPECT(qkr_params_get(p, &v) == QKR_OK);
  EXPECT(v.n_levels == 256);
  EXPECT(fabs(v.epsilon - 0.5) < 1e-14);
  EXPECT(fabs(v.hbar * 256 - 2.0 * M_PI) < 1e-12);
  qkr_params_destroy(p);

  qkr_params* bad = NULL;
  EXPECT(qkr_params_from_levels(4.5, 0.5, 0.1, 100, 10, &bad) == QKR_ERR_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(strlen(qkr_last_error()) > 0);
  EXPECT(qkr_params_get(NULL, &v) == QKR_ERR_NULL_POINTER);
  EXPECT(strcmp(qkr_status_name(QKR_OK), "") != 0);
  qkr_params_destroy(NULL);
}

static void test_step_against_dense(void) {
  qkr_params* p = NULL;
  qkr_params_create(1.0, 0.3, 0.1, 2.0 * M_PI / 8.0, 8, 1, &p);
  double up[16], down[16], up2[16], down2[16];
  srand(5);
  double norm = 0.0;
  for (int i = 0; i < 16; ++i) {
    up[i] = rand() / (double)RAND_MAX - 0.5;
    down[i] = rand() / (double)RAND_MAX - 0.5;
    norm += up[i] * up[i] + down[i] * down[i];
  }
  for (int i = 0; i < 16; ++i) {
    up[i] /= sqrt(norm);
    down[i] /= sqrt(norm);
  }
  memcpy(up2, up, sizeof up);
  memcpy(down2, down, sizeof down);
  EXPECT(qkr_coupled_step(p, up, down, 8) == QKR_OK);
  EXPECT(qkr_dense_step(p, up2, down2, 8) == QKR_OK);
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    worst = fmax(worst, fabs(up[i] - up2[i]));
    worst = fmax(worst, fabs(down[i] - down2[i]));
  }
  EXPECT(worst < 1e-10);
  EXPECT(qkr_coupled_step(p, up, down, 4) == QKR_ERR_BUFFER_SIZE);
  qkr_params_destroy(p);

  qkr_params* big = NULL;
  qkr_params_from_levels(1.0, 0.3, 0.1, 128, 1, &big);
  double* a = calloc(256, sizeof(double));
  double* b = calloc(256, sizeof(double));
  EXPECT(qkr_dense_step(big, a, b, 128) == QKR_ERR_DIMENSION_TOO_LARGE);
  free(a);
  free(b);
  qkr_params_destroy(big);
}

static void test_evolve_and_fit(void) {
  qkr_params* p = NULL;
  qkr_params_from_levels(4.5, 0.3, 0.1, 512, 400, &p);
  const double h = 1.0 / sqrt(2.0);
  qkr_qubit q = {h, 0.0, h, 0.0};
  qkr_trajectory* traj = NULL;
  EXPECT(qkr_evolve(p, q, M_PI, 0.0, &traj) == QKR_OK);
  EXPECT(qkr_trajectory_length(traj) == 401);
  double series[401];
  for (size_t t = 0; t < 401; ++t) {
    qkr_record r;
    qkr_trajectory_record(traj, t, &r);
    EXPECT(fabs(r.rho00 + r.rho11 - 1.0) < 1e-10);
    series[t] = hypot(r.rho01_re, r.rho01_im);
  }
  qkr_record r;
  EXPECT(qkr_trajectory_record(traj, 401, &r) == QKR_ERR_INVALID_ARGUMENT);
  qkr_fit fit;
  EXPECT(qkr_fit_exp_decay(series, 401, &fit) == QKR_OK);
  EXPECT(fit.rate > 0.0);
  qkr_trajectory_destroy(traj);

  qkr_qubit bad = {1.0, 0.0, 1.0, 0.0};
  EXPECT(qkr_evolve(p, bad, M_PI, 0.0, &traj) == QKR_ERR_INVALID_ARGUMENT);

  double flat[40];
  for (int i = 0; i < 40; ++i) flat[i] = 0.25;
  EXPECT(qkr_fit_exp_decay(flat, 40, &fit) == QKR_ERR_NON_DECAYING);
  qkr_params_destroy(p);
}

static void test_channel_and_misc(void) {
  double re = 0.0, im = 0.0;
  EXPECT(qkr_phase_kick_factor(0.5, &re, &im) == QKR_OK);
  EXPECT(fabs(re - 0.7651976865579665) < 1e-12);
  const double b0[3] = {1.0, 0.0, 0.0};
  double out[3 * 11];
  EXPECT(qkr_channel_map(b0, 0.225, 0.0, 10, out, 11) == QKR_OK);
  EXPECT(fabs(out[3] - 0.949375) < 1e-15);
  EXPECT(qkr_channel_map(b0, 0.225, 0.0, 10, out, 10) == QKR_ERR_BUFFER_SIZE);
  double c[3];
  EXPECT(qkr_channel_continuous(b0, 0.5, 0.1, 2.0, c) == QKR_OK);
  EXPECT(fabs(c[0] - exp(-0.5)) < 1e-12);
  double lambda = 0.0;
  EXPECT(qkr_lyapunov(8.0, 20, 2000, 1, &lambda) == QKR_OK);
  EXPECT(fabs(lambda - log(4.0)) < 0.15);
  EXPECT(qkr_lyapunov(8.0, 2, 2000, 1, &lambda) == QKR_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(qkr_sweep_flag_string(0), "ok") == 0);
  EXPECT(strlen(qkr_version()) > 0);
}

static void test_husimi(void) {
  qkr_params* p = NULL;
  qkr_params_from_levels(4.5, 0.5, 0.1, 256, 0, &p);
  const double h = 1.0 / sqrt(2.0);
  qkr_qubit q = {h, 0.0, h, 0.0};
  qkr_husimi* hus = NULL;
  EXPECT(qkr_husimi_conditional(p, q, M_PI, 0.0, 0, QKR_SPIN_UP, QKR_MODE_COMPONENT, 64, 32, &hus) ==
         QKR_OK);
  size_t nt = 0, np = 0;
  qkr_husimi_dims(hus, &nt, &np);
  EXPECT(nt == 64 && np == 32);
  double* values = malloc(nt * np * sizeof(double));
  EXPECT(qkr_husimi_values(hus, values, nt * np) == QKR_OK);
  EXPECT(qkr_husimi_values(hus, values, 10) == QKR_ERR_BUFFER_SIZE);
  double total = 0.0;
  for (size_t i = 0; i < nt * np; ++i) total += values[i];
  double whole = 0.0;
  EXPECT(qkr_husimi_box(hus, M_PI, 0.0, 10.0, &whole) == QKR_OK);
  EXPECT(fabs(whole - 1.0) < 1e-12);
  EXPECT(total > 0.0);
  free(values);
  qkr_husimi_destroy(hus);

  double re[5], im[5];
  EXPECT(qkr_fidelity_series(p, M_PI, 0.0, re, im, 5) == QKR_OK);
  EXPECT(fabs(re[0] - 1.0) < 1e-12);
  qkr_params_destroy(p);
}

int main(void) {
  test_params();
  test_step_against_dense();
  test_evolve_and_fit();
  test_channel_and_misc();
  test_husimi();
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  puts("c api: all checks passed");
  return 0;
}

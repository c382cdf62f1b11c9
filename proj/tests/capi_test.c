#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qsl/qsl.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

#define EXPECT_OK(call) EXPECT((call) == QSL_OK)

static void states(void) {
  qsl_state* f = NULL;
  qsl_state* c = NULL;
  double re = 0.0;
  double im = 0.0;
  double d = 0.0;
  EXPECT_OK(qsl_state_fock(2, 10, &f));
  EXPECT(qsl_state_dim(f) == 10);
  EXPECT_OK(qsl_state_element(f, 2, 2, &re, &im));
  EXPECT(re == 1.0 && im == 0.0);
  EXPECT_OK(qsl_expectation(f, QSL_OP_NUMBER, &re, &im));
  EXPECT(fabs(re - 2.0) < 1e-12);
  EXPECT_OK(qsl_state_coherent(1.0, 0.5, 30, &c));
  EXPECT_OK(qsl_expectation(c, QSL_OP_A, &re, &im));
  EXPECT(fabs(re - 1.0) < 1e-9 && fabs(im - 0.5) < 1e-9);
  EXPECT_OK(qsl_trace_distance(f, f, &d));
  EXPECT(d < 1e-12);
  EXPECT(qsl_trace_distance(f, c, &d) == QSL_E_DIM_MISMATCH);
  EXPECT(strlen(qsl_last_error()) > 0);
  EXPECT(qsl_state_fock(12, 10, &f) == QSL_E_INVALID_SPEC);
  EXPECT(qsl_state_coherent(5.0, 0.0, 10, &c) == QSL_E_TRUNCATION_LEAK);
  EXPECT(qsl_state_fock(0, 10, NULL) == QSL_E_NULL_ARGUMENT);
  EXPECT(strcmp(qsl_status_name(QSL_E_GRID_TOO_SMALL), "GridTooSmall") == 0);
  qsl_state_free(f);
  qsl_state_free(c);

  double m[8] = {0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0};
  qsl_state* s = NULL;
  EXPECT_OK(qsl_state_from_matrix(m, 2, &s));
  qsl_state_free(s);
  m[0] = 0.7;
  EXPECT(qsl_state_from_matrix(m, 2, &s) == QSL_E_INVALID_ARGUMENT);
}

static void steady(void) {
  qsl_params p = {1.0, 0.1, 0.045};
  qsl_steady* ss = NULL;
  double e = 0.0;
  int hi = 0;
  EXPECT_OK(qsl_steady_state(p, 60, &ss));
  EXPECT_OK(qsl_steady_energy(ss, &e));
  EXPECT(fabs(e - 10.50) < 0.01);
  EXPECT_OK(qsl_steady_n_hi(ss, &hi));
  EXPECT(hi > 0 && hi < 60);
  qsl_steady_free(ss);
  qsl_params weak = {1.0, 0.9, 0.005};
  EXPECT(qsl_steady_state(weak, 30, &ss) == QSL_E_DIM_TOO_SMALL);
  qsl_params edge = {0.1, 0.0, 0.001};
  EXPECT_OK(qsl_n_hi(edge, &hi));
  EXPECT(hi == 94);
  double A = 0.0, B = 0.0, C = 0.0;
  EXPECT_OK(qsl_regime(p, &A, &B, &C));
  EXPECT(fabs(B - 20.0) < 1e-12);
  double pops[5];
  EXPECT_OK(qsl_pnss(2.0, 0.5, 5, pops));
  EXPECT(pops[0] > pops[4]);
}

static void evolution_and_spectrum(void) {
  qsl_params p = {0.1, 0.05, 0.02};
  qsl_state* rho0 = NULL;
  qsl_trajectory* tr = NULL;
  qsl_spectrum* sp = NULL;
  qsl_state* fin = NULL;
  qsl_state* rec = NULL;
  double d = 1.0, gap = 0.0, re = 0.0, im = 0.0;
  int hi = 0, valid = 0;
  EXPECT_OK(qsl_state_coherent(1.0, 0.0, 15, &rho0));
  EXPECT_OK(qsl_evolve(p, rho0, 1.0, 0.25, 1e-12, 1e-10, &tr));
  EXPECT(qsl_trajectory_length(tr) == 5);
  EXPECT_OK(qsl_trajectory_final_state(tr, &fin));
  EXPECT_OK(qsl_spectrum_compute(p, 15, rho0, 0, &sp));
  EXPECT(qsl_spectrum_size(sp) == 225);
  EXPECT_OK(qsl_spectrum_gap(sp, &gap, &hi, &valid));
  EXPECT(fabs(gap - 0.0228088552) < 1e-8);
  EXPECT_OK(qsl_spectrum_eigenvalue(sp, 0, &re, &im));
  EXPECT(fabs(re) < 1e-10);
  EXPECT_OK(qsl_spectrum_reconstruct(sp, 1.0, &rec));
  EXPECT_OK(qsl_trace_distance(fin, rec, &d));
  EXPECT(d < 1e-6);
  EXPECT(qsl_spectrum_eigenvalue(sp, 1000, &re, &im) == QSL_E_INVALID_ARGUMENT);
  qsl_spectrum* big = NULL;
  EXPECT(qsl_spectrum_compute(p, 51, NULL, 0, &big) == QSL_E_DIM_TOO_LARGE);
  qsl_state_free(rec);
  qsl_state_free(fin);
  qsl_spectrum_free(sp);
  qsl_trajectory_free(tr);
  qsl_state_free(rho0);
}

static void wigner(void) {
  qsl_state* f = NULL;
  qsl_wigner* w = NULL;
  double v = 0.0, err = 0.0, integral = 0.0;
  EXPECT_OK(qsl_state_fock(1, 4, &f));
  EXPECT_OK(qsl_wigner_compute(f, 7.0, 401, &w));
  EXPECT_OK(qsl_wigner_integral(w, &integral));
  EXPECT(fabs(integral - 1.0) < 1e-8);
  EXPECT_OK(qsl_wigner_negative_volume(w, &v, &err));
  EXPECT(fabs(v - (2.0 * exp(-0.5) - 1.0)) <= err);
  EXPECT(err < 1e-4);
  double x0, x1, p0, p1;
  int nx, np;
  EXPECT_OK(qsl_wigner_grid(w, &x0, &x1, &nx, &p0, &p1, &np));
  EXPECT(nx == 401 && x1 == 7.0);
  qsl_wigner_free(w);
  EXPECT(qsl_wigner_compute(f, 1.0, 41, &w) == QSL_E_GRID_TOO_SMALL);
  qsl_state_free(f);
}

static void text(void) {
  char* s = NULL;
  EXPECT_OK(qsl_derive_eom(QSL_LATEX, &s));
  EXPECT(s != NULL && strstr(s, "\\partial_x") != NULL);
  qsl_string_free(s);
  EXPECT_OK(qsl_derive_eom(QSL_JSON, &s));
  EXPECT(s != NULL && s[0] == '{');
  qsl_string_free(s);
  int ok = 1;
  char* report = NULL;
  EXPECT(qsl_validate_config("/nonexistent/config.yaml", &ok, &report) == QSL_E_IO);
  const char* path = "qsl_capi_test_config.yaml";
  FILE* fp = fopen(path, "w");
  EXPECT(fp != NULL);
  if (fp) {
    fputs("experiment: derive_eom\n", fp);
    fclose(fp);
    EXPECT_OK(qsl_validate_config(path, &ok, &report));
    EXPECT(ok == 1);
    EXPECT(report != NULL && strncmp(report, "OK", 2) == 0);
    qsl_string_free(report);
    fp = fopen(path, "w");
    fputs("experiment: derive_eom\nbogus: 1\n", fp);
    fclose(fp);
    EXPECT_OK(qsl_validate_config(path, &ok, &report));
    EXPECT(ok == 0);
    qsl_string_free(report);
    remove(path);
  }
  EXPECT(qsl_set_log_level("shouting") == QSL_E_INVALID_ARGUMENT);
  EXPECT(strlen(qsl_version()) > 0);
}

int main(void) {
  qsl_set_log_level("warn");
  states();
  steady();
  evolution_and_spectrum();
  wigner();
  text();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}

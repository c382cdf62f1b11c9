#ifndef QSL_QSL_H
#define QSL_QSL_H

/* C interface to the quantum Stuart-Landau library.
 *
 * Every fallible call returns a qsl_status. On failure the message is kept in
 * thread-local storage and read back with qsl_last_error(). Handles are opaque
 * and owned by the caller; release them with the matching *_free function.
 * Strings returned through char** are released with qsl_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  ifdef QSL_BUILDING_LIBRARY
#    define QSL_API __declspec(dllexport)
#  else
#    define QSL_API __declspec(dllimport)
#  endif
#else
#  define QSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsl_status {
  QSL_OK = 0,
  QSL_E_INVALID_ARGUMENT = 1,
  QSL_E_DIM_MISMATCH = 2,
  QSL_E_TRUNCATION_LEAK = 3,
  QSL_E_INVALID_SPEC = 4,
  QSL_E_STEP_FAILURE = 5,
  QSL_E_NOT_REACHED = 6,
  QSL_E_CONVERGENCE_FAILURE = 7,
  QSL_E_DIM_TOO_SMALL = 8,
  QSL_E_BELOW_BIFURCATION = 9,
  QSL_E_GRID_TOO_SMALL = 10,
  QSL_E_GRID_TOO_COARSE = 11,
  QSL_E_GRID_MISMATCH = 12,
  QSL_E_NOT_NORMALIZED = 13,
  QSL_E_DIM_TOO_LARGE = 14,
  QSL_E_MISSING_COEFFICIENTS = 15,
  QSL_E_CONFIG = 16,
  QSL_E_PARSE = 17,
  QSL_E_IO = 18,
  QSL_E_NULL_ARGUMENT = 100,
  QSL_E_INTERNAL = 101
} qsl_status;

typedef enum qsl_operator {
  QSL_OP_A = 0,
  QSL_OP_ADAG = 1,
  QSL_OP_NUMBER = 2,
  QSL_OP_HAMILTONIAN = 3
} qsl_operator;

typedef enum qsl_text_format { QSL_TEXT = 0, QSL_JSON = 1, QSL_LATEX = 2 } qsl_text_format;

/* Outcome of qsl_run_experiment, equal to the CLI exit code. */
typedef enum qsl_run_status {
  QSL_RUN_OK = 0,
  QSL_RUN_CONFIG_ERROR = 1,
  QSL_RUN_NUMERICAL_FAILURE = 2,
  QSL_RUN_PARTIAL = 3
} qsl_run_status;

typedef struct qsl_params {
  double kappa1; /* one-quantum pump */
  double gamma1; /* one-quantum loss */
  double gamma2; /* two-quantum loss */
} qsl_params;

typedef struct qsl_state qsl_state;
typedef struct qsl_steady qsl_steady;
typedef struct qsl_trajectory qsl_trajectory;
typedef struct qsl_spectrum qsl_spectrum;
typedef struct qsl_wigner qsl_wigner;

QSL_API const char* qsl_version(void);
QSL_API const char* qsl_last_error(void);
QSL_API const char* qsl_status_name(qsl_status status);
QSL_API void qsl_string_free(char* s);
QSL_API qsl_status qsl_set_log_level(const char* level);

/* States in a space of `dim` Fock levels. */
QSL_API qsl_status qsl_state_fock(int n, int dim, qsl_state** out);
QSL_API qsl_status qsl_state_thermal(double mean, int dim, qsl_state** out);
QSL_API qsl_status qsl_state_coherent(double beta_re, double beta_im, int dim, qsl_state** out);
QSL_API qsl_status qsl_state_cat(double beta_re, double beta_im, double phi, int dim,
                                 qsl_state** out);
/* Row-major dim x dim matrix of interleaved (re, im) pairs. */
QSL_API qsl_status qsl_state_from_matrix(const double* re_im, int dim, qsl_state** out);
QSL_API void qsl_state_free(qsl_state* s);
QSL_API int qsl_state_dim(const qsl_state* s);
QSL_API qsl_status qsl_state_element(const qsl_state* s, int m, int n, double* re, double* im);
QSL_API qsl_status qsl_trace_distance(const qsl_state* a, const qsl_state* b, double* out);
QSL_API qsl_status qsl_expectation(const qsl_state* s, qsl_operator op, double* re, double* im);

QSL_API qsl_status qsl_steady_state(qsl_params params, int dim, qsl_steady** out);
QSL_API void qsl_steady_free(qsl_steady* ss);
QSL_API qsl_status qsl_steady_energy(const qsl_steady* ss, double* out);
QSL_API qsl_status qsl_steady_n_hi(const qsl_steady* ss, int* out);
QSL_API qsl_status qsl_steady_rho(const qsl_steady* ss, qsl_state** out);

/* Closed-form populations P_0..P_{levels-1}; `out` holds `levels` doubles. */
QSL_API qsl_status qsl_pnss(double kappa_tilde, double gamma_tilde, int levels, double* out);
QSL_API qsl_status qsl_n_hi(qsl_params params, int* out);
/* A = k1/g2, B = (k1-g1)/g2, C = A/B. */
QSL_API qsl_status qsl_regime(qsl_params params, double* A, double* B, double* C);

/* sample_every <= 0 samples only the end points. Tolerances <= 0 use defaults. */
QSL_API qsl_status qsl_evolve(qsl_params params, const qsl_state* rho0, double t_end,
                              double sample_every, double atol, double rtol,
                              qsl_trajectory** out);
QSL_API void qsl_trajectory_free(qsl_trajectory* tr);
QSL_API size_t qsl_trajectory_length(const qsl_trajectory* tr);
QSL_API qsl_status qsl_trajectory_sample(const qsl_trajectory* tr, size_t i, double* t,
                                         double* re_a, double* im_a, double* n, double* n2);
QSL_API qsl_status qsl_trajectory_final_state(const qsl_trajectory* tr, qsl_state** out);
QSL_API qsl_status qsl_trajectory_write_csv(const qsl_trajectory* tr, const char* path);

/* First time the trace distance to the steady state falls to epsilon. */
QSL_API qsl_status qsl_steady_state_time(qsl_params params, const qsl_state* rho0,
                                         double epsilon, double t_cap, double* out);

/* rho0 may be NULL; reconstruction then fails with QSL_E_MISSING_COEFFICIENTS. */
QSL_API qsl_status qsl_spectrum_compute(qsl_params params, int dim, const qsl_state* rho0,
                                        int allow_large, qsl_spectrum** out);
QSL_API void qsl_spectrum_free(qsl_spectrum* s);
QSL_API size_t qsl_spectrum_size(const qsl_spectrum* s);
QSL_API qsl_status qsl_spectrum_eigenvalue(const qsl_spectrum* s, size_t j, double* re,
                                           double* im);
QSL_API qsl_status qsl_spectrum_gap(const qsl_spectrum* s, double* gap, int* n_hi, int* valid);
QSL_API qsl_status qsl_spectrum_reconstruct(const qsl_spectrum* s, double t, qsl_state** out);
QSL_API qsl_status qsl_spectrum_write_csv(const qsl_spectrum* s, const char* path);

/* half_width <= 0 picks the extent from the state energy and widens it until
 * the boundary check passes. */
QSL_API qsl_status qsl_wigner_compute(const qsl_state* s, double half_width, int points,
                                      qsl_wigner** out);
QSL_API void qsl_wigner_free(qsl_wigner* w);
QSL_API qsl_status qsl_wigner_grid(const qsl_wigner* w, double* x_min, double* x_max,
                                   int* x_points, double* p_min, double* p_max, int* p_points);
QSL_API qsl_status qsl_wigner_value(const qsl_wigner* w, int i, int j, double* out);
QSL_API qsl_status qsl_wigner_integral(const qsl_wigner* w, double* out);
QSL_API qsl_status qsl_wigner_negative_volume(const qsl_wigner* w, double* volume,
                                              double* error_estimate);
QSL_API qsl_status qsl_wigner_write_csv(const qsl_wigner* w, const char* path);

QSL_API qsl_status qsl_derive_eom(qsl_text_format format, char** out);

/* Runs the experiment in a YAML config. out_dir may be NULL; workers and dim
 * <= 0 keep the config values. manifest_path may be NULL. */
QSL_API qsl_status qsl_run_experiment(const char* config_path, const char* out_dir, int workers,
                                      int dim, qsl_run_status* run_status,
                                      char** manifest_path);
/* ok is 1 when the config has no errors; report lists errors and warnings. */
QSL_API qsl_status qsl_validate_config(const char* config_path, int* ok, char** report);

#ifdef __cplusplus
}
#endif

#endif

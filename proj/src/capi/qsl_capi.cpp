#include "qsl/qsl.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "qsl/config.hpp"
#include "qsl/experiments.hpp"
#include "qsl/io.hpp"
#include "qsl/log.hpp"
#include "qsl/moyal.hpp"
#include "qsl/spectrum.hpp"
#include "qsl/steadystate.hpp"
#include "qsl/wigner.hpp"

struct qsl_state {
  qsl::DensityMatrix rho;
};
struct qsl_steady {
  qsl::SteadyState ss;
};
struct qsl_trajectory {
  qsl::Trajectory tr;
};
struct qsl_spectrum {
  qsl::SpectrumResult s;
};
struct qsl_wigner {
  qsl::WignerGrid w;
};

namespace {

thread_local std::string g_last_error;

qsl_status fail(qsl_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

qsl_status from_code(qsl::ErrorCode code) { return static_cast<qsl_status>(static_cast<int>(code) + 1); }

template <class F>
qsl_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QSL_OK;
  } catch (const qsl::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(QSL_E_INTERNAL, e.what());
  } catch (...) {
    return fail(QSL_E_INTERNAL, "unknown exception");
  }
}

#define QSL_REQUIRE(ptr) \
  if (!(ptr)) return fail(QSL_E_NULL_ARGUMENT, #ptr " is NULL")

qsl::SLParams to_params(qsl_params p) { return {p.kappa1, p.gamma1, p.gamma2}; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qsl_status make(const qsl::StateSpec& spec, int dim, qsl_state** out) {
  QSL_REQUIRE(out);
  return guarded([&] { *out = new qsl_state{qsl::make_state(spec, qsl::HilbertDim(dim))}; });
}

}  // namespace

extern "C" {

const char* qsl_version(void) { return "1.0.0"; }

const char* qsl_last_error(void) { return g_last_error.c_str(); }

const char* qsl_status_name(qsl_status status) {
  switch (status) {
    case QSL_OK: return "Ok";
    case QSL_E_NULL_ARGUMENT: return "NullArgument";
    case QSL_E_INTERNAL: return "Internal";
    default: break;
  }
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(qsl::ErrorCode::IoError)) return "Unknown";
  return qsl::to_string(static_cast<qsl::ErrorCode>(code));
}

void qsl_string_free(char* s) { std::free(s); }

qsl_status qsl_set_log_level(const char* level) {
  QSL_REQUIRE(level);
  if (!qsl::set_log_level(level)) {
    return fail(QSL_E_INVALID_ARGUMENT, std::string("unknown log level '") + level + "'");
  }
  return QSL_OK;
}

qsl_status qsl_state_fock(int n, int dim, qsl_state** out) {
  return make(qsl::state::Fock{n}, dim, out);
}

qsl_status qsl_state_thermal(double mean, int dim, qsl_state** out) {
  return make(qsl::state::Thermal{mean}, dim, out);
}

qsl_status qsl_state_coherent(double beta_re, double beta_im, int dim, qsl_state** out) {
  return make(qsl::state::Coherent{{beta_re, beta_im}}, dim, out);
}

qsl_status qsl_state_cat(double beta_re, double beta_im, double phi, int dim, qsl_state** out) {
  return make(qsl::state::Cat{{beta_re, beta_im}, phi}, dim, out);
}

qsl_status qsl_state_from_matrix(const double* re_im, int dim, qsl_state** out) {
  QSL_REQUIRE(re_im);
  QSL_REQUIRE(out);
  return guarded([&] {
    const qsl::HilbertDim d(dim);
    qsl::CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const std::size_t k = 2 * (static_cast<std::size_t>(i) * dim + j);
        m(i, j) = {re_im[k], re_im[k + 1]};
      }
    }
    *out = new qsl_state{qsl::DensityMatrix::from_matrix(std::move(m))};
  });
}

void qsl_state_free(qsl_state* s) { delete s; }

int qsl_state_dim(const qsl_state* s) { return s ? s->rho.dim().value() : 0; }

qsl_status qsl_state_element(const qsl_state* s, int m, int n, double* re, double* im) {
  QSL_REQUIRE(s);
  const int N = s->rho.dim().value();
  if (m < 0 || n < 0 || m >= N || n >= N) return fail(QSL_E_INVALID_ARGUMENT, "index out of range");
  const auto v = s->rho.matrix()(m, n);
  if (re) *re = v.real();
  if (im) *im = v.imag();
  return QSL_OK;
}

qsl_status qsl_trace_distance(const qsl_state* a, const qsl_state* b, double* out) {
  QSL_REQUIRE(a);
  QSL_REQUIRE(b);
  QSL_REQUIRE(out);
  return guarded([&] { *out = qsl::trace_distance(a->rho, b->rho); });
}

qsl_status qsl_expectation(const qsl_state* s, qsl_operator op, double* re, double* im) {
  QSL_REQUIRE(s);
  if (op < QSL_OP_A || op > QSL_OP_HAMILTONIAN) return fail(QSL_E_INVALID_ARGUMENT, "unknown operator");
  return guarded([&] {
    const auto v = qsl::expectation(s->rho, static_cast<qsl::OperatorKind>(op));
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

qsl_status qsl_steady_state(qsl_params params, int dim, qsl_steady** out) {
  QSL_REQUIRE(out);
  return guarded([&] {
    *out = new qsl_steady{qsl::steady_state_numeric(to_params(params), qsl::HilbertDim(dim))};
  });
}

void qsl_steady_free(qsl_steady* ss) { delete ss; }

qsl_status qsl_steady_energy(const qsl_steady* ss, double* out) {
  QSL_REQUIRE(ss);
  QSL_REQUIRE(out);
  *out = ss->ss.energy;
  return QSL_OK;
}

qsl_status qsl_steady_n_hi(const qsl_steady* ss, int* out) {
  QSL_REQUIRE(ss);
  QSL_REQUIRE(out);
  *out = ss->ss.n_hi;
  return QSL_OK;
}

qsl_status qsl_steady_rho(const qsl_steady* ss, qsl_state** out) {
  QSL_REQUIRE(ss);
  QSL_REQUIRE(out);
  return guarded([&] { *out = new qsl_state{ss->ss.rho}; });
}

qsl_status qsl_pnss(double kappa_tilde, double gamma_tilde, int levels, double* out) {
  QSL_REQUIRE(out);
  return guarded([&] {
    const auto p = qsl::pnss_analytic(kappa_tilde, gamma_tilde, levels);
    std::copy(p.begin(), p.end(), out);
  });
}

qsl_status qsl_n_hi(qsl_params params, int* out) {
  QSL_REQUIRE(out);
  return guarded([&] { *out = qsl::n_hi(to_params(params)); });
}

qsl_status qsl_regime(qsl_params params, double* A, double* B, double* C) {
  return guarded([&] {
    const auto p = to_params(params);
    p.validate();
    const auto wr = qsl::regime(p);
    if (A) *A = wr.A;
    if (B) *B = wr.B;
    if (C) *C = wr.C;
  });
}

qsl_status qsl_evolve(qsl_params params, const qsl_state* rho0, double t_end, double sample_every,
                      double atol, double rtol, qsl_trajectory** out) {
  QSL_REQUIRE(rho0);
  QSL_REQUIRE(out);
  return guarded([&] {
    qsl::EvolveOptions o;
    o.sample_every = sample_every;
    if (atol > 0.0) o.atol = atol;
    if (rtol > 0.0) o.rtol = rtol;
    o.keep_every = 1;
    *out = new qsl_trajectory{qsl::evolve(to_params(params), rho0->rho, t_end, o)};
  });
}

void qsl_trajectory_free(qsl_trajectory* tr) { delete tr; }

size_t qsl_trajectory_length(const qsl_trajectory* tr) { return tr ? tr->tr.times.size() : 0; }

qsl_status qsl_trajectory_sample(const qsl_trajectory* tr, size_t i, double* t, double* re_a,
                                 double* im_a, double* n, double* n2) {
  QSL_REQUIRE(tr);
  if (i >= tr->tr.times.size()) return fail(QSL_E_INVALID_ARGUMENT, "sample index out of range");
  if (t) *t = tr->tr.times[i];
  if (re_a) *re_a = tr->tr.a[i].real();
  if (im_a) *im_a = tr->tr.a[i].imag();
  if (n) *n = tr->tr.n[i];
  if (n2) *n2 = tr->tr.n2[i];
  return QSL_OK;
}

qsl_status qsl_trajectory_final_state(const qsl_trajectory* tr, qsl_state** out) {
  QSL_REQUIRE(tr);
  QSL_REQUIRE(out);
  if (tr->tr.states.empty()) return fail(QSL_E_INVALID_ARGUMENT, "trajectory stored no states");
  return guarded([&] { *out = new qsl_state{tr->tr.states.back()}; });
}

qsl_status qsl_trajectory_write_csv(const qsl_trajectory* tr, const char* path) {
  QSL_REQUIRE(tr);
  QSL_REQUIRE(path);
  return guarded([&] { qsl::io::write_file(path, qsl::io::trajectory_csv(tr->tr).text()); });
}

qsl_status qsl_steady_state_time(qsl_params params, const qsl_state* rho0, double epsilon,
                                 double t_cap, double* out) {
  QSL_REQUIRE(rho0);
  QSL_REQUIRE(out);
  return guarded([&] {
    const auto p = to_params(params);
    const auto ss = qsl::steady_state_numeric(p, rho0->rho.dim());
    qsl::SteadyStateTimeOptions o;
    if (epsilon > 0.0) o.epsilon = epsilon;
    if (t_cap > 0.0) o.t_cap = t_cap;
    *out = qsl::steady_state_time(p, rho0->rho, ss.rho, o).time;
  });
}

qsl_status qsl_spectrum_compute(qsl_params params, int dim, const qsl_state* rho0, int allow_large,
                        qsl_spectrum** out) {
  QSL_REQUIRE(out);
  return guarded([&] {
    qsl::SpectrumOptions o;
    o.allow_large = allow_large != 0;
    std::optional<qsl::DensityMatrix> r0;
    if (rho0) r0 = rho0->rho;
    *out = new qsl_spectrum{qsl::spectrum(to_params(params), qsl::HilbertDim(dim), r0, o)};
  });
}

void qsl_spectrum_free(qsl_spectrum* s) { delete s; }

size_t qsl_spectrum_size(const qsl_spectrum* s) { return s ? s->s.eigenvalues.size() : 0; }

qsl_status qsl_spectrum_eigenvalue(const qsl_spectrum* s, size_t j, double* re, double* im) {
  QSL_REQUIRE(s);
  if (j >= s->s.eigenvalues.size()) return fail(QSL_E_INVALID_ARGUMENT, "eigenvalue index out of range");
  if (re) *re = s->s.eigenvalues[j].real();
  if (im) *im = s->s.eigenvalues[j].imag();
  return QSL_OK;
}

qsl_status qsl_spectrum_gap(const qsl_spectrum* s, double* gap, int* n_hi, int* valid) {
  QSL_REQUIRE(s);
  if (gap) *gap = s->s.gap;
  if (n_hi) *n_hi = s->s.n_hi;
  if (valid) *valid = s->s.valid ? 1 : 0;
  return QSL_OK;
}

qsl_status qsl_spectrum_reconstruct(const qsl_spectrum* s, double t, qsl_state** out) {
  QSL_REQUIRE(s);
  QSL_REQUIRE(out);
  return guarded([&] { *out = new qsl_state{qsl::spectral_reconstruct(s->s, t)}; });
}

qsl_status qsl_spectrum_write_csv(const qsl_spectrum* s, const char* path) {
  QSL_REQUIRE(s);
  QSL_REQUIRE(path);
  return guarded([&] { qsl::io::write_file(path, qsl::io::spectrum_csv(s->s).text()); });
}

qsl_status qsl_wigner_compute(const qsl_state* s, double half_width, int points, qsl_wigner** out) {
  QSL_REQUIRE(s);
  QSL_REQUIRE(out);
  return guarded([&] {
    if (half_width > 0.0) {
      *out = new qsl_wigner{qsl::wigner_of_rho(s->rho, qsl::GridSpec::square(half_width, points))};
    } else {
      const double n = qsl::moments(s->rho.matrix()).n;
      *out = new qsl_wigner{qsl::wigner_auto(s->rho, n, points)};
    }
  });
}

void qsl_wigner_free(qsl_wigner* w) { delete w; }

qsl_status qsl_wigner_grid(const qsl_wigner* w, double* x_min, double* x_max, int* x_points,
                           double* p_min, double* p_max, int* p_points) {
  QSL_REQUIRE(w);
  const auto& g = w->w.spec();
  if (x_min) *x_min = g.x.min;
  if (x_max) *x_max = g.x.max;
  if (x_points) *x_points = g.x.points;
  if (p_min) *p_min = g.p.min;
  if (p_max) *p_max = g.p.max;
  if (p_points) *p_points = g.p.points;
  return QSL_OK;
}

qsl_status qsl_wigner_value(const qsl_wigner* w, int i, int j, double* out) {
  QSL_REQUIRE(w);
  QSL_REQUIRE(out);
  const auto& v = w->w.values();
  if (i < 0 || j < 0 || i >= v.rows() || j >= v.cols()) {
    return fail(QSL_E_INVALID_ARGUMENT, "grid index out of range");
  }
  *out = v(i, j);
  return QSL_OK;
}

qsl_status qsl_wigner_integral(const qsl_wigner* w, double* out) {
  QSL_REQUIRE(w);
  QSL_REQUIRE(out);
  *out = w->w.integral();
  return QSL_OK;
}

qsl_status qsl_wigner_negative_volume(const qsl_wigner* w, double* volume, double* error_estimate) {
  QSL_REQUIRE(w);
  return guarded([&] {
    const auto r = qsl::negative_volume(w->w);
    if (volume) *volume = r.volume;
    if (error_estimate) *error_estimate = r.error_estimate;
  });
}

qsl_status qsl_wigner_write_csv(const qsl_wigner* w, const char* path) {
  QSL_REQUIRE(w);
  QSL_REQUIRE(path);
  return guarded([&] { qsl::io::write_file(path, qsl::io::wigner_csv(w->w).text()); });
}

qsl_status qsl_derive_eom(qsl_text_format format, char** out) {
  QSL_REQUIRE(out);
  return guarded([&] {
    const auto& op = qsl::moyal::qsl_operator();
    switch (format) {
      case QSL_TEXT: *out = dup_string(op.str()); break;
      case QSL_JSON: *out = dup_string(op.json()); break;
      case QSL_LATEX: *out = dup_string(op.latex()); break;
      default: throw qsl::Error(qsl::ErrorCode::InvalidArgument, "unknown text format");
    }
  });
}

qsl_status qsl_run_experiment(const char* config_path, const char* out_dir, int workers, int dim,
                              qsl_run_status* run_status, char** manifest_path) {
  QSL_REQUIRE(config_path);
  if (run_status) *run_status = QSL_RUN_CONFIG_ERROR;
  qsl::ExperimentConfig cfg;
  const qsl_status parsed = guarded([&] {
    cfg = qsl::load_config(config_path);
    if (out_dir) cfg.output_dir = out_dir;
    if (workers > 0) cfg.workers = workers;
    if (dim > 0) cfg.dims = {dim};
    qsl::check_config(cfg);
  });
  if (parsed != QSL_OK) return parsed;
  if (run_status) *run_status = QSL_RUN_NUMERICAL_FAILURE;
  return guarded([&] {
    const auto r = qsl::run_experiment(cfg);
    if (run_status) *run_status = static_cast<qsl_run_status>(static_cast<int>(r.status));
    if (manifest_path) *manifest_path = dup_string(r.manifest.string());
  });
}

qsl_status qsl_validate_config(const char* config_path, int* ok, char** report) {
  QSL_REQUIRE(config_path);
  return guarded([&] {
    qsl::ValidationReport r;
    try {
      r = qsl::validate_config(qsl::load_config(config_path));
    } catch (const qsl::Error& e) {
      if (e.code() == qsl::ErrorCode::IoError) throw;
      r.ok = false;
      r.errors.push_back(std::string(qsl::to_string(e.code())) + ": " + e.what());
    }
    if (ok) *ok = r.ok ? 1 : 0;
    if (report) *report = dup_string(r.text());
  });
}

}  // extern "C"

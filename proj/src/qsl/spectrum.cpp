#include "qsl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include <lapacke.h>

#include "qsl/pool.hpp"
#include "qsl/steadystate.hpp"

extern "C" void openblas_set_num_threads(int);

namespace qsl {

namespace {

void single_threaded_blas() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

// out += c * (A kron B), skipping zero entries of A.
void add_kron(CMatrix& out, Complex c, const CMatrix& A, const CMatrix& B) {
  const Eigen::Index n = B.rows();
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (A(i, j) != Complex(0.0, 0.0)) out.block(i * n, j * n, n, n) += (c * A(i, j)) * B;
    }
  }
}

struct Eigensystem {
  Eigen::VectorXcd values;
  CMatrix left;
  CMatrix right;
};

lapack_complex_double* as_lapack(Complex* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

Eigensystem zgeev(CMatrix L, bool vectors) {
  single_threaded_blas();
  const auto n = static_cast<lapack_int>(L.rows());
  Eigensystem es;
  es.values.resize(n);
  if (vectors) {
    es.left.resize(n, n);
    es.right.resize(n, n);
  }
  const char job = vectors ? 'V' : 'N';
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, job, job, n, as_lapack(L.data()), n, as_lapack(es.values.data()),
      vectors ? as_lapack(es.left.data()) : nullptr, n,
      vectors ? as_lapack(es.right.data()) : nullptr, n);
  if (info != 0) {
    throw Error(ErrorCode::ConvergenceFailure,
                "eigendecomposition failed (LAPACK info " + std::to_string(info) + ")");
  }
  return es;
}

// Ascending |Re|; runs of equal |Re| (within tol) by ascending Im, then index.
std::vector<Eigen::Index> spectral_order(const Eigen::VectorXcd& values, double tol) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values(a).real()) < std::abs(values(b).real());
  });
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    const double base = std::abs(values(order[start]).real());
    while (end < order.size() && std::abs(values(order[end]).real()) - base <= tol) ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
              order.begin() + static_cast<std::ptrdiff_t>(end),
              [&](Eigen::Index a, Eigen::Index b) {
                const double ia = values(a).imag(), ib = values(b).imag();
                if (std::abs(ia - ib) > tol) return ia < ib;
                return a < b;
              });
    start = end;
  }
  return order;
}

void check_dim(HilbertDim dim, const SpectrumOptions& options) {
  if (dim.value() > options.max_dim && !options.allow_large) {
    throw Error(ErrorCode::DimTooLarge,
                "dense Liouvillian spectrum capped at N = " + std::to_string(options.max_dim) +
                    " (requested " + std::to_string(dim.value()) + ")");
  }
}

int safe_n_hi(const SLParams& params) {
  try {
    return n_hi(params);
  } catch (const Error&) {
    return -1;
  }
}

}  // namespace

Eigen::VectorXcd vectorize(const CMatrix& rho) {
  const Eigen::Index N = rho.rows();
  Eigen::VectorXcd v(N * N);
  for (Eigen::Index m = 0; m < N; ++m) {
    for (Eigen::Index n = 0; n < N; ++n) v(m * N + n) = rho(m, n);
  }
  return v;
}

CMatrix unvectorize(const Eigen::VectorXcd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw Error(ErrorCode::DimMismatch, "vector length is not N^2");
  }
  CMatrix rho(dim, dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) rho(m, n) = v(static_cast<Eigen::Index>(m) * dim + n);
  }
  return rho;
}

CMatrix build_vectorized_lindbladian(const SLParams& params, HilbertDim dim) {
  params.validate();
  const int N = dim.value();
  const CMatrix I = CMatrix::Identity(N, N);
  const CMatrix a = build_operator(OperatorKind::annihilate, dim).matrix();
  const CMatrix H = build_operator(OperatorKind::hamiltonian, dim).matrix();
  const CMatrix a2 = a * a;

  CMatrix L = CMatrix::Zero(N * N, N * N);
  const Complex minus_i(0.0, -1.0);
  add_kron(L, minus_i, H, I);
  add_kron(L, -minus_i, I, H.transpose());

  auto dissipator = [&](double rate, const CMatrix& O) {
    if (rate == 0.0) return;
    const CMatrix OdO = O.adjoint() * O;
    add_kron(L, rate, O, O.conjugate());
    add_kron(L, -0.5 * rate, OdO, I);
    add_kron(L, -0.5 * rate, I, OdO.transpose());
  };
  dissipator(params.kappa1, a.adjoint());
  dissipator(params.gamma1, a);
  dissipator(params.gamma2, a2);
  return L;
}

std::vector<Complex> eigenvalues_only(const SLParams& params, HilbertDim dim,
                                      const SpectrumOptions& options) {
  check_dim(dim, options);
  const CMatrix L = build_vectorized_lindbladian(params, dim);
  const double norm = L.norm();
  const Eigensystem es = zgeev(L, false);
  std::vector<Complex> out;
  for (const Eigen::Index k : spectral_order(es.values, options.cluster_tolerance * norm)) {
    out.push_back(es.values(k));
  }
  return out;
}

SpectrumResult spectrum(const SLParams& params, HilbertDim dim,
                        const std::optional<DensityMatrix>& rho0, const SpectrumOptions& options) {
  check_dim(dim, options);
  if (rho0) require_same_dim(rho0->dim(), dim, "spectrum");
  const int N = dim.value();
  const CMatrix L = build_vectorized_lindbladian(params, dim);

  SpectrumResult r;
  r.params = params;
  r.dim = N;
  r.norm = L.norm();
  const double tol = options.cluster_tolerance * r.norm;

  Eigensystem es = zgeev(L, true);
  const auto order = spectral_order(es.values, tol);
  const auto count = static_cast<Eigen::Index>(order.size());
  Eigen::VectorXcd values(count);
  CMatrix U(count, count), V(count, count);
  for (Eigen::Index k = 0; k < count; ++k) {
    values(k) = es.values(order[static_cast<std::size_t>(k)]);
    U.col(k) = es.left.col(order[static_cast<std::size_t>(k)]);
    V.col(k) = es.right.col(order[static_cast<std::size_t>(k)]);
  }

  // Steady-state mode with unit trace.
  {
    const Complex tr = unvectorize(V.col(0), N).trace();
    if (std::abs(tr) > 0.0) V.col(0) /= tr;
  }

  // Clusters of (near-)equal eigenvalues: transitive closure of |li - lj| <= tol.
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = i + 1; j < count; ++j) {
      if (std::abs(values(i) - values(j)) <= tol) {
        parent[static_cast<std::size_t>(find(j))] = find(i);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> clusters(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    clusters[static_cast<std::size_t>(find(i))].push_back(i);
  }

  // Blockwise biorthonormalization: U_c <- U_c M^{-H} with M = U_c^H V_c.
  for (const auto& members : clusters) {
    if (members.empty()) continue;
    const auto m = static_cast<Eigen::Index>(members.size());
    CMatrix Uc(count, m), Vc(count, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      Uc.col(k) = U.col(members[static_cast<std::size_t>(k)]);
      Vc.col(k) = V.col(members[static_cast<std::size_t>(k)]);
    }
    const CMatrix M = Uc.adjoint() * Vc;
    const Eigen::JacobiSVD<CMatrix> svd(M);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(m - 1);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    r.max_cluster_condition = std::max(r.max_cluster_condition, cond);
    if (cond > options.ill_conditioned) r.degenerate_warning = true;
    const CMatrix Unew = Uc * M.inverse().adjoint();
    for (Eigen::Index k = 0; k < m; ++k) U.col(members[static_cast<std::size_t>(k)]) = Unew.col(k);
  }
  if (r.degenerate_warning) {
    spdlog::warn("ill-conditioned eigenvalue cluster (condition {:.3g}); reconstruction may be inaccurate",
                 r.max_cluster_condition);
  }

  r.eigenvalues.assign(values.data(), values.data() + count);
  r.right.reserve(static_cast<std::size_t>(count));
  r.left.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    r.right.push_back(unvectorize(V.col(k), N));
    r.left.push_back(unvectorize(U.col(k), N));
  }
  if (rho0) {
    const Eigen::VectorXcd v0 = vectorize(rho0->matrix());
    const Eigen::VectorXcd c = U.adjoint() * v0;
    r.coefficients.assign(c.data(), c.data() + c.size());
  }
  r.gap = count > 1 ? std::abs(values(1).real()) : 0.0;
  r.n_hi = safe_n_hi(params);
  r.valid = r.n_hi >= 0 && r.n_hi <= N;
  if (params.gamma2 > 0.0) {
    try {
      const SteadyState ss = steady_state_numeric(params, dim);
      r.steady_state_distance = trace_distance(hermitian_part(r.right[0]), ss.rho.matrix());
    } catch (const Error&) {
      r.steady_state_distance = -1.0;
    }
  }
  return r;
}

CMatrix spectral_reconstruct_matrix(const SpectrumResult& spec, double t) {
  if (spec.coefficients.empty()) {
    throw Error(ErrorCode::MissingCoefficients, "spectrum was computed without an initial state");
  }
  CMatrix rho = spec.right[0];
  for (std::size_t j = 1; j < spec.eigenvalues.size(); ++j) {
    rho += spec.coefficients[j] * std::exp(spec.eigenvalues[j] * t) * spec.right[j];
  }
  return rho;
}

DensityMatrix spectral_reconstruct(const SpectrumResult& spec, double t) {
  CMatrix rho = hermitian_part(spectral_reconstruct_matrix(spec, t));
  DensityTolerances tol;
  tol.trace = 1e-8;
  return DensityMatrix::from_matrix(std::move(rho), tol);
}

std::vector<GapPoint> gap_sweep(const std::vector<std::pair<double, double>>& points,
                                const std::vector<int>& dims, double kappa1, int workers,
                                const SpectrumOptions& options) {
  std::vector<GapPoint> out(points.size() * dims.size());
  parallel_for(out.size(), workers, [&](std::size_t idx) {
    const auto& [A, B] = points[idx / dims.size()];
    GapPoint& g = out[idx];
    g.A = A;
    g.B = B;
    g.dim = dims[idx % dims.size()];
    try {
      g.params = params_from_regime(A, B, kappa1);
      g.n_hi = n_hi(g.params);
      g.valid = g.n_hi <= g.dim;
      const auto ev = eigenvalues_only(g.params, HilbertDim(g.dim), options);
      g.gap = ev.size() > 1 ? std::abs(ev[1].real()) : 0.0;
    } catch (const std::exception& e) {
      g.error = e.what();
      g.valid = false;
    }
  });
  return out;
}

}  // namespace qsl

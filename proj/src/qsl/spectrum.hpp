#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsl/core.hpp"
#include "qsl/dynamics.hpp"

namespace qsl {

/// Row-major vectorization: vec(rho)[m*N + n] = rho(m, n), so
/// vec(A rho B) = (A kron B^T) vec(rho).
Eigen::VectorXcd vectorize(const CMatrix& rho);
CMatrix unvectorize(const Eigen::VectorXcd& v, int dim);

/// N^2 x N^2 Liouvillian assembled from Kronecker products of the truncated
/// ladder operators.
CMatrix build_vectorized_lindbladian(const SLParams& params, HilbertDim dim);

struct SpectrumOptions {
  int max_dim = 50;
  bool allow_large = false;      // lift the max_dim cap
  double cluster_tolerance = 1e-8;  // relative to the Frobenius norm of L
  double ill_conditioned = 1e10;    // condition number that flags a cluster
};

struct SpectrumResult {
  SLParams params;
  int dim = 0;
  double norm = 0.0;  // Frobenius norm of L
  std::vector<Complex> eigenvalues;
  std::vector<CMatrix> right;  // right[0] has unit trace
  std::vector<CMatrix> left;   // biorthonormal: <left_i, right_j> = delta_ij
  std::vector<Complex> coefficients;  // empty without an initial state
  double gap = 0.0;                   // |Re lambda_1|
  int n_hi = -1;                      // -1 when undefined for these rates
  bool valid = false;                 // n_hi <= N
  double steady_state_distance = -1.0;  // d_tr(right[0], numeric steady state); -1 if unavailable
  bool degenerate_warning = false;
  double max_cluster_condition = 1.0;
};

/// Full eigendecomposition sorted by ascending |Re lambda|, ties (equal |Re|
/// within the cluster tolerance) by ascending Im, then index. Throws
/// DimTooLarge above options.max_dim unless allow_large is set.
SpectrumResult spectrum(const SLParams& params, HilbertDim dim,
                        const std::optional<DensityMatrix>& rho0 = std::nullopt,
                        const SpectrumOptions& options = {});

/// Eigenvalues only, in the same order as spectrum().
std::vector<Complex> eigenvalues_only(const SLParams& params, HilbertDim dim,
                                      const SpectrumOptions& options = {});

/// rho_ss + sum_{j>=1} c_j exp(lambda_j t) rho_j^R without validation.
CMatrix spectral_reconstruct_matrix(const SpectrumResult& spec, double t);

/// Hermitized reconstruction; throws MissingCoefficients without c_j.
DensityMatrix spectral_reconstruct(const SpectrumResult& spec, double t);

struct GapPoint {
  double A = 0.0;
  double B = 0.0;
  int dim = 0;
  SLParams params;
  double gap = 0.0;
  int n_hi = 0;
  bool valid = false;
  std::string error;  // non-empty when the point failed
};

/// Gap over working-regime points (A, B) with basis k1, for each dimension.
/// Output is ordered by (point index, dimension index) regardless of workers.
std::vector<GapPoint> gap_sweep(const std::vector<std::pair<double, double>>& points,
                                const std::vector<int>& dims, double kappa1, int workers = 1,
                                const SpectrumOptions& options = {});

}  // namespace qsl

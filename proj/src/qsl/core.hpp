#pragma once

// Truncated Fock-basis operator and state algebra.
//
// Units follow the oscillator convention hbar = m = omega0 = 1, so the ladder
// operator is a = (x + i p) / sqrt(2) and the free period is 2*pi.

#include <complex>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qsl/error.hpp"

namespace qsl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Number of retained Fock levels; the basis is |0>, ..., |N-1>.
class HilbertDim {
 public:
  explicit HilbertDim(int levels);

  int value() const noexcept { return levels_; }
  friend bool operator==(HilbertDim, HilbertDim) = default;

 private:
  int levels_;
};

void require_same_dim(HilbertDim a, HilbertDim b, const char* what);

enum class OperatorKind { annihilate, create, number, hamiltonian };

class OperatorMatrix {
 public:
  OperatorMatrix(HilbertDim dim, CMatrix entries);

  HilbertDim dim() const noexcept { return dim_; }
  const CMatrix& matrix() const noexcept { return entries_; }

 private:
  HilbertDim dim_;
  CMatrix entries_;
};

OperatorMatrix build_operator(OperatorKind kind, HilbertDim dim);

struct DensityTolerances {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double min_eigenvalue = -1e-8;
};

/// Hermitian, unit-trace, positive (to tolerance) N x N matrix.
class DensityMatrix {
 public:
  /// Validates the invariants and throws InvalidArgument when one fails.
  static DensityMatrix from_matrix(CMatrix rho, const DensityTolerances& tol = {});

  HilbertDim dim() const noexcept { return dim_; }
  const CMatrix& matrix() const noexcept { return rho_; }
  double population(int n) const { return rho_(n, n).real(); }
  std::vector<double> populations() const;

 private:
  DensityMatrix(HilbertDim dim, CMatrix rho) : dim_(dim), rho_(std::move(rho)) {}

  HilbertDim dim_;
  CMatrix rho_;
};

namespace state {
struct Fock {
  int n;
};
struct Thermal {
  double mean;
};
struct Coherent {
  Complex beta;
};
/// N (|beta> + e^{i phi} |-beta>)
struct Cat {
  Complex beta;
  double phi = 0.0;
};
struct FockSuperposition {
  std::vector<std::pair<int, Complex>> terms;
};
}  // namespace state

using StateSpec = std::variant<state::Fock, state::Thermal, state::Coherent,
                               state::Cat, state::FockSuperposition>;

/// Builds the density matrix for `spec`. Throws TruncationLeak when more than
/// `leak_tolerance` of the probability lies above level N-1, InvalidSpec for
/// specs that cannot be represented at this dimension.
DensityMatrix make_state(const StateSpec& spec, HilbertDim dim,
                         double leak_tolerance = 1e-8);

/// Probability of the untruncated state lying at or above level `levels`.
double truncation_leak(const StateSpec& spec, int levels);

/// Squared normalization constant of |beta> + e^{i phi}|-beta>.
double cat_normalization_squared(Complex beta, double phi);

/// (1/2) sum |eig(a - b)| for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);
Complex expectation(const DensityMatrix& rho, OperatorKind kind);

/// tr(A^dagger B)
Complex hs_inner(const CMatrix& a, const CMatrix& b);

CMatrix hermitian_part(const CMatrix& m);
double hermiticity_defect(const CMatrix& m);
double min_eigenvalue(const CMatrix& hermitian);

}  // namespace qsl

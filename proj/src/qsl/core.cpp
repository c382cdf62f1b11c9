#include "qsl/core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace qsl {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::TruncationLeak: return "TruncationLeak";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NotReached: return "NotReached";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimTooSmall: return "DimTooSmall";
    case ErrorCode::BelowBifurcation: return "BelowBifurcation";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DimTooLarge: return "DimTooLarge";
    case ErrorCode::MissingCoefficients: return "MissingCoefficients";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

HilbertDim::HilbertDim(int levels) : levels_(levels) {
  if (levels < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "Hilbert dimension must be >= 2, got " + std::to_string(levels));
  }
}

void require_same_dim(HilbertDim a, HilbertDim b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimMismatch,
                std::string(what) + ": dimension " + std::to_string(a.value()) +
                    " vs " + std::to_string(b.value()));
  }
}

OperatorMatrix::OperatorMatrix(HilbertDim dim, CMatrix entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.rows() != dim.value() || entries_.cols() != dim.value()) {
    throw Error(ErrorCode::DimMismatch, "operator matrix shape does not match dimension");
  }
}

OperatorMatrix build_operator(OperatorKind kind, HilbertDim dim) {
  const int n = dim.value();
  CMatrix m = CMatrix::Zero(n, n);
  switch (kind) {
    case OperatorKind::annihilate:
      for (int k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
      break;
    case OperatorKind::create:
      for (int k = 1; k < n; ++k) m(k, k - 1) = std::sqrt(static_cast<double>(k));
      break;
    case OperatorKind::number:
      for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
      break;
    case OperatorKind::hamiltonian:
      for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k) + 0.5;
      break;
  }
  return OperatorMatrix(dim, std::move(m));
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::from_matrix(CMatrix rho, const DensityTolerances& tol) {
  if (rho.rows() != rho.cols()) {
    throw Error(ErrorCode::InvalidArgument, "density matrix must be square");
  }
  const HilbertDim dim(static_cast<int>(rho.rows()));
  if (const double d = hermiticity_defect(rho); d > tol.hermitian) {
    throw Error(ErrorCode::InvalidArgument,
                "density matrix not Hermitian (defect " + std::to_string(d) + ")");
  }
  if (const double t = rho.trace().real(); std::abs(t - 1.0) > tol.trace) {
    throw Error(ErrorCode::InvalidArgument,
                "density matrix trace " + std::to_string(t) + " differs from 1");
  }
  if (const double e = min_eigenvalue(hermitian_part(rho)); e < tol.min_eigenvalue) {
    throw Error(ErrorCode::InvalidArgument,
                "density matrix has negative eigenvalue " + std::to_string(e));
  }
  return DensityMatrix(dim, std::move(rho));
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> p(static_cast<std::size_t>(dim_.value()));
  for (int n = 0; n < dim_.value(); ++n) p[static_cast<std::size_t>(n)] = population(n);
  return p;
}

namespace {

// Amplitudes e^{-|b|^2/2} b^n / sqrt(n!) for n < levels.
Eigen::VectorXcd coherent_amplitudes(Complex beta, int levels) {
  Eigen::VectorXcd c(levels);
  c(0) = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n < levels; ++n) c(n) = c(n - 1) * beta / std::sqrt(static_cast<double>(n));
  return c;
}

Eigen::VectorXcd cat_amplitudes(Complex beta, double phi, int levels) {
  Eigen::VectorXcd c = coherent_amplitudes(beta, levels);
  const Complex phase = std::polar(1.0, phi);
  for (int n = 0; n < levels; ++n) c(n) *= 1.0 + phase * (n % 2 == 0 ? 1.0 : -1.0);
  return c;
}

double coherent_leak(Complex beta, int levels) {
  return std::max(0.0, 1.0 - coherent_amplitudes(beta, levels).squaredNorm());
}

struct LeakVisitor {
  int levels;

  double operator()(const state::Fock& s) const { return s.n < levels ? 0.0 : 1.0; }
  double operator()(const state::Thermal& s) const {
    if (s.mean <= 0.0) return 0.0;
    return std::pow(s.mean / (1.0 + s.mean), levels);
  }
  double operator()(const state::Coherent& s) const { return coherent_leak(s.beta, levels); }
  double operator()(const state::Cat& s) const {
    const double kept = cat_amplitudes(s.beta, s.phi, levels).squaredNorm();
    return std::max(0.0, 1.0 - kept * cat_normalization_squared(s.beta, s.phi));
  }
  double operator()(const state::FockSuperposition& s) const {
    double total = 0.0;
    double outside = 0.0;
    for (const auto& [level, coef] : s.terms) {
      total += std::norm(coef);
      if (level >= levels) outside += std::norm(coef);
    }
    return total > 0.0 ? outside / total : 0.0;
  }
};

DensityMatrix pure_state(Eigen::VectorXcd psi) {
  psi /= psi.norm();
  CMatrix rho = psi * psi.adjoint();
  return DensityMatrix::from_matrix(std::move(rho));
}

void check_leak(double leak, double tolerance, const char* kind) {
  if (leak > tolerance) {
    throw Error(ErrorCode::TruncationLeak,
                std::string(kind) + " state leaks " + std::to_string(leak) +
                    " probability above the truncation (tolerance " +
                    std::to_string(tolerance) + ")");
  }
}

}  // namespace

double cat_normalization_squared(Complex beta, double phi) {
  const double norm = 2.0 * (1.0 + std::cos(phi) * std::exp(-2.0 * std::norm(beta)));
  if (norm <= 0.0) {
    throw Error(ErrorCode::InvalidSpec, "cat state with zero norm");
  }
  return 1.0 / norm;
}

double truncation_leak(const StateSpec& spec, int levels) {
  return std::visit(LeakVisitor{levels}, spec);
}

DensityMatrix make_state(const StateSpec& spec, HilbertDim dim, double leak_tolerance) {
  const int n = dim.value();
  return std::visit(
      [&](const auto& s) -> DensityMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, state::Fock>) {
          if (s.n < 0 || s.n >= n) {
            throw Error(ErrorCode::InvalidSpec, "Fock level " + std::to_string(s.n) +
                                                    " outside basis of size " +
                                                    std::to_string(n));
          }
          CMatrix rho = CMatrix::Zero(n, n);
          rho(s.n, s.n) = 1.0;
          return DensityMatrix::from_matrix(std::move(rho));
        } else if constexpr (std::is_same_v<T, state::Thermal>) {
          if (!(s.mean >= 0.0)) {
            throw Error(ErrorCode::InvalidSpec, "thermal mean occupation must be >= 0");
          }
          check_leak(LeakVisitor{n}(s), leak_tolerance, "thermal");
          CMatrix rho = CMatrix::Zero(n, n);
          const double ratio = s.mean / (1.0 + s.mean);
          double p = 1.0 / (1.0 + s.mean);
          double total = 0.0;
          for (int k = 0; k < n; ++k) {
            rho(k, k) = p;
            total += p;
            p *= ratio;
          }
          rho /= total;
          return DensityMatrix::from_matrix(std::move(rho));
        } else if constexpr (std::is_same_v<T, state::Coherent>) {
          check_leak(coherent_leak(s.beta, n), leak_tolerance, "coherent");
          return pure_state(coherent_amplitudes(s.beta, n));
        } else if constexpr (std::is_same_v<T, state::Cat>) {
          (void)cat_normalization_squared(s.beta, s.phi);
          check_leak(LeakVisitor{n}(s), leak_tolerance, "cat");
          return pure_state(cat_amplitudes(s.beta, s.phi, n));
        } else {
          if (s.terms.empty()) throw Error(ErrorCode::InvalidSpec, "empty superposition");
          Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
          for (const auto& [level, coef] : s.terms) {
            if (level < 0 || level >= n) {
              throw Error(ErrorCode::InvalidSpec, "superposition level " +
                                                      std::to_string(level) +
                                                      " outside basis");
            }
            psi(level) += coef;
          }
          if (psi.norm() == 0.0) throw Error(ErrorCode::InvalidSpec, "superposition has zero norm");
          return pure_state(std::move(psi));
        }
      },
      spec);
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimMismatch, "trace_distance: shape mismatch");
  }
  const CMatrix diff = hermitian_part(a - b);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "trace_distance");
  return trace_distance(a.matrix(), b.matrix());
}

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  require_same_dim(rho.dim(), op.dim(), "expectation");
  // tr(rho O) without forming the product.
  return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum();
}

Complex expectation(const DensityMatrix& rho, OperatorKind kind) {
  return expectation(rho, build_operator(kind, rho.dim()));
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimMismatch, "hs_inner: shape mismatch");
  }
  return (a.conjugate().cwiseProduct(b)).sum();
}

}  // namespace qsl

#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using namespace qsl::moyal;

MatrixXcd ladder(int N) {
  MatrixXcd a = MatrixXcd::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

namespace {

MatrixXcd dissipator(const MatrixXcd& O, const MatrixXcd& rho) {
  const MatrixXcd OdO = O.adjoint() * O;
  return O * rho * O.adjoint() - 0.5 * (OdO * rho + rho * OdO);
}

MatrixXcd super_dissipator(const MatrixXcd& O) {
  const int N = static_cast<int>(O.rows());
  const MatrixXcd I = MatrixXcd::Identity(N, N);
  const MatrixXcd OdO = O.adjoint() * O;
  return Eigen::kroneckerProduct(O.conjugate(), O).eval() -
         0.5 * Eigen::kroneckerProduct(I, OdO).eval() -
         0.5 * Eigen::kroneckerProduct(OdO.transpose(), I).eval();
}

}  // namespace

MatrixXcd lindblad_dense(const qsl::SLParams& p, const MatrixXcd& rho) {
  const int N = static_cast<int>(rho.rows());
  const MatrixXcd a = ladder(N);
  const MatrixXcd ad = a.adjoint();
  const MatrixXcd H = ad * a + 0.5 * MatrixXcd::Identity(N, N);
  const Complex i(0.0, 1.0);
  return -i * (H * rho - rho * H) + p.kappa1 * dissipator(ad, rho) + p.gamma1 * dissipator(a, rho) +
         p.gamma2 * dissipator(a * a, rho);
}

MatrixXcd superoperator_colmajor(const qsl::SLParams& p, int N) {
  const MatrixXcd a = ladder(N);
  const MatrixXcd ad = a.adjoint();
  const MatrixXcd I = MatrixXcd::Identity(N, N);
  const MatrixXcd H = ad * a + 0.5 * I;
  const Complex i(0.0, 1.0);
  MatrixXcd L = -i * (Eigen::kroneckerProduct(I, H).eval() - Eigen::kroneckerProduct(H.transpose(), I).eval());
  L += p.kappa1 * super_dissipator(ad) + p.gamma1 * super_dissipator(a) +
       p.gamma2 * super_dissipator(a * a);
  return L;
}

MatrixXcd propagate_exact(const qsl::SLParams& p, const MatrixXcd& rho, double t) {
  const int N = static_cast<int>(rho.rows());
  const MatrixXcd E = (superoperator_colmajor(p, N) * t).exp();
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), N * N);
  const Eigen::VectorXcd out = E * v;
  return Eigen::Map<const MatrixXcd>(out.data(), N, N);
}

std::vector<double> fock_wavefunctions(int n_max, double x) {
  std::vector<double> psi(static_cast<std::size_t>(n_max) + 1);
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n_max >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n < n_max; ++n) {
    psi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * psi[n - 1];
  }
  return psi;
}

Complex fock_wigner_quadrature(int m, int n, double x, double p) {
  const int top = std::max(m, n);
  const double Y = 14.0;
  const int steps = 6000;
  const double h = 2.0 * Y / steps;
  Complex sum = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double y = -Y + h * k;
    const auto minus = fock_wavefunctions(top, x - y);
    const auto plus = fock_wavefunctions(top, x + y);
    const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    sum += w * minus[m] * plus[n] * std::polar(1.0, 2.0 * p * y);
  }
  return sum * h / std::numbers::pi;
}

std::vector<double> populations_by_kernel(const qsl::SLParams& p, int N) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
  for (int n = 0; n < N; ++n) {
    if (n + 1 < N) {
      R(n + 1, n) += p.kappa1 * (n + 1);
      R(n, n) -= p.kappa1 * (n + 1);
    }
    if (n >= 1) {
      R(n - 1, n) += p.gamma1 * n;
      R(n, n) -= p.gamma1 * n;
    }
    if (n >= 2) {
      R(n - 2, n) += p.gamma2 * n * (n - 1);
      R(n, n) -= p.gamma2 * n * (n - 1);
    }
  }
  const Eigen::MatrixXd K = R.fullPivLu().kernel();
  Eigen::VectorXd v = K.col(0);
  v /= v.sum();
  return {v.data(), v.data() + N};
}

PhaseDiffOp transcribed_generator() {
  const PhasePoly x = PhasePoly::var(Var::x);
  const PhasePoly p = PhasePoly::var(Var::p);
  const PhasePoly k1 = PhasePoly::var(Var::kappa1);
  const PhasePoly g1 = PhasePoly::var(Var::gamma1);
  const PhasePoly g2 = PhasePoly::var(Var::gamma2);
  const PhasePoly r2 = x * x + p * p;
  const auto d = [](int a, int b) { return PhaseDiffOp::derivative(a, b); };
  const auto mul = [](const PhasePoly& f) { return PhaseDiffOp(f); };
  const PhasePoly half = Coeff::ratio(1, 2);
  const PhasePoly quarter = Coeff::ratio(1, 4);

  PhaseDiffOp D;
  D -= d(1, 0).compose(mul(p));
  D += d(0, 1).compose(mul(x));
  D -= (half * (k1 - g1)) * (d(1, 0).compose(mul(x)) + d(0, 1).compose(mul(p)));
  D += (quarter * (k1 + g1)) * (d(2, 0) + d(0, 2));
  PhaseDiffOp brace = d(1, 0).compose(mul((r2 - PhasePoly(2)) * x));
  brace += d(0, 1).compose(mul((r2 - PhasePoly(2)) * p));
  brace += (d(2, 0) + d(0, 2)).compose(mul(r2 - PhasePoly(1)));
  brace += quarter * (d(3, 0).compose(mul(x)) + d(2, 1).compose(mul(p)) + d(1, 2).compose(mul(x)) +
                      d(0, 3).compose(mul(p)));
  D += (half * g2) * brace;
  return D;
}

}  // namespace oracle

#include "qsl/steadystate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

namespace qsl {

namespace {

constexpr int kSeriesTermCap = 10'000;

// log 1F1(b; c; z) for b, c, z > 0 (all terms positive).
double log_hyp1f1(double b, double c, double z) {
  if (z == 0.0) return 0.0;
  double log_term = 0.0;
  double log_sum = 0.0;
  for (int k = 0; k < kSeriesTermCap; ++k) {
    const double ratio = (b + k) * z / ((c + k) * (k + 1.0));
    log_term += std::log(ratio);
    // log(exp(log_sum) + exp(log_term)), log_sum >= log_term near the tail
    if (log_term > log_sum) {
      log_sum = log_term + std::log1p(std::exp(log_sum - log_term));
    } else {
      log_sum += std::log1p(std::exp(log_term - log_sum));
    }
    if (ratio < 1.0 && log_term - log_sum < std::log(1e-17)) return log_sum;
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "hypergeometric series did not converge within 10^4 terms (b = " +
                  std::to_string(b) + ", c = " + std::to_string(c) +
                  ", z = " + std::to_string(z) + ")");
}

}  // namespace

std::vector<double> pnss_analytic(double kappa_tilde, double gamma_tilde, int levels) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "levels must be >= 1");
  if (!(kappa_tilde >= 0.0) || !(gamma_tilde >= 0.0) || !std::isfinite(kappa_tilde) ||
      !std::isfinite(gamma_tilde)) {
    throw Error(ErrorCode::InvalidArgument, "rate ratios must be finite and >= 0");
  }
  std::vector<double> p(static_cast<std::size_t>(levels), 0.0);
  if (kappa_tilde == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double s = kappa_tilde + gamma_tilde;
  const double log_norm = log_hyp1f1(1.0, s, 2.0 * kappa_tilde);
  const double lgamma_s = std::lgamma(s);
  const double log_k = std::log(kappa_tilde);
  double total = 0.0;
  for (int n = 0; n < levels; ++n) {
    const double log_pochhammer = std::lgamma(s + n) - lgamma_s;
    const double log_p =
        n * log_k - log_pochhammer + log_hyp1f1(1.0 + n, s + n, kappa_tilde) - log_norm;
    p[static_cast<std::size_t>(n)] = std::exp(log_p);
    total += p[static_cast<std::size_t>(n)];
  }
  if (std::abs(1.0 - total) < 1e-12) {
    for (double& v : p) v /= total;
  }
  return p;
}

RMatrix population_rate_matrix(const SLParams& params, HilbertDim dim) {
  params.validate();
  const int N = dim.value();
  RMatrix R = RMatrix::Zero(N, N);
  for (int n = 0; n < N; ++n) {
    const double dn = n;
    if (n + 1 < N) {
      R(n + 1, n) += params.kappa1 * (dn + 1.0);
      R(n, n) -= params.kappa1 * (dn + 1.0);
    }
    if (n >= 1) {
      R(n - 1, n) += params.gamma1 * dn;
      R(n, n) -= params.gamma1 * dn;
    }
    if (n >= 2) {
      R(n - 2, n) += params.gamma2 * dn * (dn - 1.0);
      R(n, n) -= params.gamma2 * dn * (dn - 1.0);
    }
  }
  return R;
}

std::vector<double> steady_populations(const SLParams& params, HilbertDim dim) {
  const int N = dim.value();
  RMatrix R = population_rate_matrix(params, dim);
  R.row(N - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  rhs(N - 1) = 1.0;
  const Eigen::PartialPivLU<RMatrix> lu(R);
  const Eigen::VectorXd p = lu.solve(rhs);
  if (!p.allFinite()) {
    throw Error(ErrorCode::ConvergenceFailure, "steady state is not unique for these rates");
  }
  return {p.data(), p.data() + N};
}

int highest_occupied_level(const std::vector<double>& populations, double threshold) {
  for (std::size_t n = populations.size(); n-- > 0;) {
    if (populations[n] > threshold) return static_cast<int>(n);
  }
  return 0;
}

int n_hi(const SLParams& params, double threshold) {
  params.validate();
  if (params.kappa1 == 0.0) return 0;
  if (params.gamma2 <= 0.0 && params.kappa1 > params.gamma1) {
    throw Error(ErrorCode::InvalidArgument, "n_hi is unbounded for gamma2 = 0 above bifurcation");
  }
  int N = 32;
  for (;;) {
    const auto p = steady_populations(params, HilbertDim(N));
    if (p.back() < 1e-12 * threshold || N >= 1 << 14) {
      return highest_occupied_level(p, threshold);
    }
    N *= 2;
  }
}

SteadyState steady_state_numeric(const SLParams& params, HilbertDim dim) {
  params.validate();
  if (!(params.gamma2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "steady state requires gamma2 > 0");
  }
  auto p = steady_populations(params, dim);
  const int N = dim.value();
  if (p.back() > kOccupationThreshold) {
    throw Error(ErrorCode::DimTooSmall,
                "top level holds " + std::to_string(p.back()) + " at N = " + std::to_string(N));
  }
  CMatrix rho = CMatrix::Zero(N, N);
  double energy = 0.0;
  for (int n = 0; n < N; ++n) {
    rho(n, n) = p[static_cast<std::size_t>(n)];
    energy += n * p[static_cast<std::size_t>(n)];
  }
  SteadyState ss{DensityMatrix::from_matrix(std::move(rho)), std::move(p), n_hi(params), energy,
                 std::nullopt, std::nullopt};
  if (params.kappa1 > params.gamma1) {
    ss.radius = classical_limit_cycle_radius(params);
    const double B = (params.kappa1 - params.gamma1) / params.gamma2;
    ss.energy_ratio = energy / (0.5 * B);
  }
  return ss;
}

WorkingRegime regime(const SLParams& params) {
  params.validate();
  if (!(params.gamma2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "working regime requires gamma2 > 0");
  }
  WorkingRegime wr;
  wr.A = params.kappa1 / params.gamma2;
  wr.B = (params.kappa1 - params.gamma1) / params.gamma2;
  wr.C = wr.B == 0.0 ? std::numeric_limits<double>::infinity() : wr.A / wr.B;
  wr.basis = params.kappa1;
  wr.below_bifurcation = params.kappa1 <= params.gamma1;
  return wr;
}

SLParams params_from_regime(double A, double B, double kappa1) {
  if (!(A > 0.0) || !(kappa1 > 0.0) || !std::isfinite(B) || B > A) {
    throw Error(ErrorCode::InvalidArgument,
                "working-regime point needs A > 0, B <= A and a positive basis rate");
  }
  SLParams p{kappa1, kappa1 * (1.0 - B / A), kappa1 / A};
  if (p.gamma1 < 0.0) p.gamma1 = 0.0;
  return p;
}

EligibilityMargins eligibility(const WorkingRegime& wr, double n, double n2) {
  return {2.0 * n2 / wr.A, n / wr.C};
}

EligibilityMargins eligibility(const WorkingRegime& wr, const DensityMatrix& rho) {
  const Moments m = moments(rho.matrix());
  return eligibility(wr, m.n, m.n2);
}

double limit_cycle_margin(const WorkingRegime& wr) { return wr.B / (4.0 * wr.C); }

bool classical_limit_cycle(const WorkingRegime& wr, double factor) {
  return !wr.below_bifurcation && limit_cycle_margin(wr) >= factor;
}

WignerGrid wigner_guess(const SLParams& params, const GridSpec& grid) {
  const WorkingRegime wr = regime(params);
  if (wr.below_bifurcation) {
    throw Error(ErrorCode::BelowBifurcation, "guess function needs k1 > g1");
  }
  grid.validate();
  const double r_lc = std::sqrt(wr.B);
  const double sigma = std::sqrt(wr.C / std::numbers::sqrt2);
  const double pref = 1.0 / (2.0 * std::numbers::pi * r_lc) /
                      (sigma * std::sqrt(2.0 * std::numbers::pi));
  RMatrix w(grid.x.points, grid.p.points);
  for (int j = 0; j < grid.p.points; ++j) {
    const double p = grid.p.at(j);
    for (int i = 0; i < grid.x.points; ++i) {
      const double r = std::hypot(grid.x.at(i), p);
      const double d = r - r_lc;
      w(i, j) = pref * std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }
  return WignerGrid(grid, std::move(w));
}

}  // namespace qsl

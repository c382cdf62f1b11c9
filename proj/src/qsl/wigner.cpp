#include "qsl/wigner.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace qsl {

namespace {

constexpr double kInvPi = 1.0 / std::numbers::pi;

// f_j^{(k)}(u) = sqrt(j!/(j+k)!) u^{k/2} e^{-u/2} L_j^{(k)}(u) for j = 0..count-1.
void laguerre_functions(int k, double u, int count, double* f) {
  if (count <= 0) return;
  if (u == 0.0) {
    f[0] = k == 0 ? 1.0 : 0.0;
  } else {
    f[0] = std::exp(0.5 * k * std::log(u) - 0.5 * u - 0.5 * std::lgamma(k + 1.0));
  }
  if (count == 1) return;
  f[1] = (1.0 + k - u) * f[0] / std::sqrt(1.0 + k);
  for (int j = 1; j + 1 < count; ++j) {
    const double dj = j;
    f[j + 1] = ((2.0 * dj + 1.0 + k - u) * f[j] - std::sqrt(dj * (dj + k)) * f[j - 1]) /
               std::sqrt((dj + 1.0) * (dj + k + 1.0));
  }
}

// sum_mn A_mn W_mn at a single phase point.
Complex wigner_point(const CMatrix& A, double x, double p, std::vector<double>& f) {
  const int N = static_cast<int>(A.rows());
  const double u = 2.0 * (x * x + p * p);
  const double theta = std::atan2(p, x);
  Complex sum = 0.0;
  for (int k = 0; k < N; ++k) {
    const int count = N - k;
    laguerre_functions(k, u, count, f.data());
    const Complex down = std::polar(1.0, -k * theta);  // element |n+k><n|
    Complex band = 0.0;
    for (int n = 0; n < count; ++n) {
      const double w = (n % 2 == 0 ? kInvPi : -kInvPi) * f[static_cast<std::size_t>(n)];
      if (k == 0) {
        band += A(n, n) * w;
      } else {
        band += w * (A(n + k, n) * down + A(n, n + k) * std::conj(down));
      }
    }
    sum += band;
  }
  return sum;
}

}  // namespace

Eigen::MatrixXcd fock_wigner_element(int m, int n, const GridSpec& grid) {
  if (m < 0 || n < 0) throw Error(ErrorCode::InvalidArgument, "Fock levels must be >= 0");
  grid.validate();
  const int hi = std::max(m, n), lo = std::min(m, n), k = hi - lo;
  std::vector<double> f(static_cast<std::size_t>(lo + 1));
  Eigen::MatrixXcd out(grid.x.points, grid.p.points);
  const double sign = lo % 2 == 0 ? kInvPi : -kInvPi;
  for (int j = 0; j < grid.p.points; ++j) {
    const double p = grid.p.at(j);
    for (int i = 0; i < grid.x.points; ++i) {
      const double x = grid.x.at(i);
      laguerre_functions(k, 2.0 * (x * x + p * p), lo + 1, f.data());
      // (x - i p)^k for m > n, conjugate for m < n
      const double phase = (m >= n ? -1.0 : 1.0) * k * std::atan2(p, x);
      out(i, j) = sign * f[static_cast<std::size_t>(lo)] * std::polar(1.0, phase);
    }
  }
  return out;
}

Eigen::MatrixXcd wigner_of_matrix(const CMatrix& A, const GridSpec& grid) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw Error(ErrorCode::InvalidArgument, "Wigner transform needs a square matrix");
  }
  grid.validate();
  std::vector<double> f(static_cast<std::size_t>(A.rows()));
  Eigen::MatrixXcd out(grid.x.points, grid.p.points);
  for (int j = 0; j < grid.p.points; ++j) {
    const double p = grid.p.at(j);
    for (int i = 0; i < grid.x.points; ++i) out(i, j) = wigner_point(A, grid.x.at(i), p, f);
  }
  return out;
}

WignerGrid wigner_of_operator(const CMatrix& A, const GridSpec& grid) {
  const Eigen::MatrixXcd w = wigner_of_matrix(A, grid);
  RMatrix re = w.real();
  const double scale = std::max(re.cwiseAbs().maxCoeff(), 1e-300);
  if (const double residue = w.imag().cwiseAbs().maxCoeff(); residue > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidArgument,
                "Wigner function has imaginary residue " + std::to_string(residue) +
                    "; the input is not Hermitian");
  }
  return WignerGrid(grid, std::move(re));
}

WignerGrid wigner_of_rho(const DensityMatrix& rho, const GridSpec& grid,
                         double boundary_tolerance) {
  WignerGrid w = wigner_of_operator(rho.matrix(), grid);
  const double edge = w.boundary_max_abs();
  if (edge > boundary_tolerance * w.max_abs()) {
    throw Error(ErrorCode::GridTooSmall,
                "Wigner function reaches " + std::to_string(edge / w.max_abs()) +
                    " of its maximum on the grid boundary");
  }
  return w;
}

GridSpec default_grid(double n_eff, int points) {
  const double half = std::max(std::sqrt(2.0 * std::max(n_eff, 0.0)) + 3.0, 5.0);
  return GridSpec::square(half, points);
}

WignerGrid wigner_auto(const DensityMatrix& rho, double n_eff, int points,
                       double boundary_tolerance) {
  GridSpec grid = default_grid(n_eff, points);
  for (int attempt = 0;; ++attempt) {
    try {
      return wigner_of_rho(rho, grid, boundary_tolerance);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GridTooSmall || attempt >= 12) throw;
    }
    grid = GridSpec::square(1.25 * grid.x.max, points);
  }
}

NegativityReport negative_volume(const WignerGrid& w, double normalization_tolerance) {
  NegativityReport r;
  r.grid = w.spec();
  r.integral = w.integral();
  if (std::abs(r.integral - 1.0) > normalization_tolerance) {
    throw Error(ErrorCode::NotNormalized,
                "Wigner function integrates to " + std::to_string(r.integral));
  }
  auto volume = [](double abs_integral) { return std::max(0.0, 0.5 * (abs_integral - 1.0)); };
  r.volume = volume(w.integral_abs());

  const GridSpec& g = w.spec();
  if (g.x.points % 2 == 1 && g.p.points % 2 == 1 && g.x.points >= 5 && g.p.points >= 5) {
    GridSpec coarse = g;
    coarse.x.points = (g.x.points + 1) / 2;
    coarse.p.points = (g.p.points + 1) / 2;
    RMatrix sub(coarse.x.points, coarse.p.points);
    for (int j = 0; j < coarse.p.points; ++j) {
      for (int i = 0; i < coarse.x.points; ++i) sub(i, j) = std::abs(w.values()(2 * i, 2 * j));
    }
    r.error_estimate = std::abs(r.volume - volume(trapezoid(coarse, sub))) / 3.0;
  }
  return r;
}

double overlap_expectation(const WignerGrid& w_rho, const WignerGrid& w_op) {
  if (!(w_rho.spec() == w_op.spec())) {
    throw Error(ErrorCode::GridMismatch, "overlap needs identical grids");
  }
  return 2.0 * std::numbers::pi *
         trapezoid(w_rho.spec(), w_rho.values().cwiseProduct(w_op.values()));
}

WignerGrid crop(const WignerGrid& w, int margin) {
  const GridSpec& g = w.spec();
  GridSpec c = g;
  c.x = {g.x.at(margin), g.x.at(g.x.points - 1 - margin), g.x.points - 2 * margin};
  c.p = {g.p.at(margin), g.p.at(g.p.points - 1 - margin), g.p.points - 2 * margin};
  return WignerGrid(c, w.values().block(margin, margin, c.x.points, c.p.points));
}

namespace {

// Fourth-order central stencils on offsets -3..3.
constexpr std::array<std::array<double, 7>, 4> kStencils{{
    {0, 0, 0, 1, 0, 0, 0},
    {0, 1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12, 0},
    {0, -1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12, 0},
    {1.0 / 8, -8.0 / 8, 13.0 / 8, 0, -13.0 / 8, 8.0 / 8, -1.0 / 8},
}};

// d^order/dx^order along rows, evaluated at rows margin..n-1-margin.
RMatrix diff_rows(const RMatrix& f, int order, double h) {
  const auto& s = kStencils[static_cast<std::size_t>(order)];
  const Eigen::Index rows = f.rows() - 2 * kStencilMargin;
  RMatrix out = RMatrix::Zero(rows, f.cols());
  for (int o = -3; o <= 3; ++o) {
    const double c = s[static_cast<std::size_t>(o + 3)];
    if (c != 0.0) out.noalias() += c * f.middleRows(kStencilMargin + o, rows);
  }
  return out / std::pow(h, order);
}

RMatrix diff_cols(const RMatrix& f, int order, double h) {
  const auto& s = kStencils[static_cast<std::size_t>(order)];
  const Eigen::Index cols = f.cols() - 2 * kStencilMargin;
  RMatrix out = RMatrix::Zero(f.rows(), cols);
  for (int o = -3; o <= 3; ++o) {
    const double c = s[static_cast<std::size_t>(o + 3)];
    if (c != 0.0) out.noalias() += c * f.middleCols(kStencilMargin + o, cols);
  }
  return out / std::pow(h, order);
}

}  // namespace

WignerGrid apply_phase_operator(const moyal::PhaseDiffOp& op, const SLParams& rates,
                                const WignerGrid& w) {
  const GridSpec& g = w.spec();
  constexpr int kMinPoints = 2 * kStencilMargin + 5;
  if (g.x.points < kMinPoints || g.p.points < kMinPoints) {
    throw Error(ErrorCode::GridTooCoarse, "finite differences need at least " +
                                              std::to_string(kMinPoints) + " nodes per axis");
  }
  for (const auto& [key, poly] : op.terms()) {
    if (key.first > 3 || key.second > 3) {
      throw Error(ErrorCode::InvalidArgument, "derivative order above 3 is not supported");
    }
  }
  const WignerGrid interior = crop(w, kStencilMargin);
  const GridSpec& ig = interior.spec();
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(ig.x.points, ig.x.min, ig.x.max);
  const Eigen::VectorXd ps = Eigen::VectorXd::LinSpaced(ig.p.points, ig.p.min, ig.p.max);

  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(ig.x.points, ig.p.points);
  for (const auto& [key, poly] : op.terms()) {
    const RMatrix d = diff_cols(diff_rows(w.values(), key.first, g.x.step()), key.second,
                                g.p.step());
    Eigen::MatrixXcd coeff = Eigen::MatrixXcd::Zero(ig.x.points, ig.p.points);
    for (const auto& [powers, c] : poly.substitute(rates)) {
      if (c == Complex(0.0, 0.0)) continue;
      const Eigen::ArrayXd xp = xs.array().pow(powers.first);
      const Eigen::ArrayXd pp = ps.array().pow(powers.second);
      coeff += c * (xp.matrix() * pp.matrix().transpose()).cast<Complex>();
    }
    total += coeff.cwiseProduct(d.cast<Complex>());
  }
  return WignerGrid(ig, total.real());
}

WignerGrid apply_eom_operator(const WignerGrid& w, const SLParams& rates) {
  return apply_phase_operator(moyal::qsl_operator(), rates, w);
}

}  // namespace qsl

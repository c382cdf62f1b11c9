#include "qsl/grid.hpp"

#include <cmath>
#include <string>

namespace qsl {

std::vector<double> Axis::nodes() const {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = at(i);
  return v;
}

GridSpec GridSpec::square(double half_width, int points) {
  GridSpec g{{-half_width, half_width, points}, {-half_width, half_width, points}};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  for (const Axis* a : {&x, &p}) {
    if (a->points < 2 || !(a->max > a->min) || !std::isfinite(a->min) || !std::isfinite(a->max)) {
      throw Error(ErrorCode::InvalidArgument, "grid axis needs >= 2 points and max > min");
    }
  }
}

WignerGrid::WignerGrid(GridSpec spec, RMatrix values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.rows() != spec_.x.points || values_.cols() != spec_.p.points) {
    throw Error(ErrorCode::GridMismatch, "grid values do not match the grid spec");
  }
}

Eigen::VectorXd trapezoid_weights(const Axis& axis) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(axis.points, axis.step());
  w(0) *= 0.5;
  w(axis.points - 1) *= 0.5;
  return w;
}

double trapezoid(const GridSpec& spec, const RMatrix& values) {
  return trapezoid_weights(spec.x).dot(values * trapezoid_weights(spec.p));
}

double WignerGrid::integral() const { return trapezoid(spec_, values_); }

double WignerGrid::integral_abs() const { return trapezoid(spec_, values_.cwiseAbs()); }

double WignerGrid::integral_error_estimate() const {
  const int nx = spec_.x.points, np = spec_.p.points;
  if (nx % 2 == 0 || np % 2 == 0 || nx < 5 || np < 5) return 0.0;
  GridSpec coarse = spec_;
  coarse.x.points = (nx + 1) / 2;
  coarse.p.points = (np + 1) / 2;
  RMatrix sub(coarse.x.points, coarse.p.points);
  for (int j = 0; j < coarse.p.points; ++j) {
    for (int i = 0; i < coarse.x.points; ++i) sub(i, j) = values_(2 * i, 2 * j);
  }
  return std::abs(integral() - trapezoid(coarse, sub));
}

double WignerGrid::boundary_max_abs() const {
  const auto a = values_.cwiseAbs();
  const Eigen::Index r = a.rows() - 1, c = a.cols() - 1;
  return std::max({a.row(0).maxCoeff(), a.row(r).maxCoeff(), a.col(0).maxCoeff(),
                   a.col(c).maxCoeff()});
}

std::vector<double> WignerGrid::marginal_x() const {
  const Eigen::VectorXd m = values_ * trapezoid_weights(spec_.p);
  return {m.data(), m.data() + m.size()};
}

std::vector<double> WignerGrid::marginal_p() const {
  const Eigen::VectorXd m = values_.transpose() * trapezoid_weights(spec_.x);
  return {m.data(), m.data() + m.size()};
}

}  // namespace qsl

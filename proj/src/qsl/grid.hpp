#pragma once

#include <vector>

#include "qsl/core.hpp"

namespace qsl {

/// Uniform lattice min, min + h, ..., max with `points` nodes.
struct Axis {
  double min = -5.0;
  double max = 5.0;
  int points = 201;

  double step() const { return (max - min) / (points - 1); }
  double at(int i) const { return min + step() * i; }
  std::vector<double> nodes() const;
  friend bool operator==(const Axis&, const Axis&) = default;
};

struct GridSpec {
  Axis x;
  Axis p;

  static GridSpec square(double half_width, int points);
  void validate() const;
  double cell_area() const { return x.step() * p.step(); }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Real function sampled on a GridSpec; values(i, j) = W(x_i, p_j).
class WignerGrid {
 public:
  WignerGrid(GridSpec spec, RMatrix values);

  const GridSpec& spec() const noexcept { return spec_; }
  const RMatrix& values() const noexcept { return values_; }
  RMatrix& values() noexcept { return values_; }

  /// Trapezoid rule.
  double integral() const;
  double integral_abs() const;
  /// |I_h - I_2h| from the every-other-node subgrid (0 if the grid cannot be halved).
  double integral_error_estimate() const;
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }
  /// Largest |W| on the outer frame of the lattice.
  double boundary_max_abs() const;

  std::vector<double> marginal_x() const;  // integral over p, indexed by x
  std::vector<double> marginal_p() const;  // integral over x, indexed by p

 private:
  GridSpec spec_;
  RMatrix values_;
};

/// Trapezoid weights h * (1/2, 1, ..., 1, 1/2).
Eigen::VectorXd trapezoid_weights(const Axis& axis);

/// Trapezoid integral of an arbitrary sampled function on `spec`.
double trapezoid(const GridSpec& spec, const RMatrix& values);

}  // namespace qsl

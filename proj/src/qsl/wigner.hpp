#pragma once

#include "qsl/core.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/grid.hpp"
#include "qsl/moyal.hpp"

namespace qsl {

/// W of |m><n| on the grid (complex unless m == n). Normalized so that
/// W_00 = exp(-(x^2 + p^2)) / pi.
Eigen::MatrixXcd fock_wigner_element(int m, int n, const GridSpec& grid);

/// sum_mn A_mn W_{|m><n|} for an arbitrary matrix A.
Eigen::MatrixXcd wigner_of_matrix(const CMatrix& A, const GridSpec& grid);

/// Real Wigner function of a Hermitian operator; throws InvalidArgument if the
/// imaginary residue exceeds 1e-10 of the largest value.
WignerGrid wigner_of_operator(const CMatrix& A, const GridSpec& grid);

/// Wigner function of a state. Throws GridTooSmall when the largest |W| on
/// the grid frame exceeds boundary_tolerance * max |W|.
WignerGrid wigner_of_rho(const DensityMatrix& rho, const GridSpec& grid,
                         double boundary_tolerance = 1e-8);

/// Square grid with half-width max(sqrt(2 n_eff) + 3, 5).
GridSpec default_grid(double n_eff, int points = 201);

/// wigner_of_rho on default_grid(n_eff), widening the extent by 25% per try
/// until the boundary check passes.
WignerGrid wigner_auto(const DensityMatrix& rho, double n_eff, int points = 201,
                       double boundary_tolerance = 1e-8);

struct NegativityReport {
  double volume = 0.0;
  double error_estimate = 0.0;
  double integral = 0.0;  // trapezoid integral of W
  GridSpec grid;
};

/// (1/2)(integral |W| - 1). Throws NotNormalized if |integral W - 1| exceeds
/// normalization_tolerance.
NegativityReport negative_volume(const WignerGrid& w, double normalization_tolerance = 1e-4);

/// 2 pi * integral W_rho W_op; equals tr(rho A) for W_op = W of A.
double overlap_expectation(const WignerGrid& w_rho, const WignerGrid& w_op);

inline constexpr int kStencilMargin = 3;

/// Applies a normal-ordered phase-space operator with the rates substituted,
/// using fourth-order central differences (orders 1 to 3 per axis). The result
/// lives on the interior grid with kStencilMargin nodes cropped on each side.
WignerGrid apply_phase_operator(const moyal::PhaseDiffOp& op, const SLParams& rates,
                                const WignerGrid& w);

/// dW/dt from the phase-space generator of the master equation.
WignerGrid apply_eom_operator(const WignerGrid& w, const SLParams& rates);

/// Interior of `w` with `margin` nodes removed on each side.
WignerGrid crop(const WignerGrid& w, int margin);

}  // namespace qsl

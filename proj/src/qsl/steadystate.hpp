#pragma once

#include <optional>
#include <vector>

#include "qsl/core.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/grid.hpp"

namespace qsl {

inline constexpr double kOccupationThreshold = 1e-6;

/// Closed-form steady-state populations P_0..P_{levels-1} for
/// kappa_tilde = k1/g2 and gamma_tilde = g1/g2. Hypergeometric series are
/// summed in the log domain; throws ConvergenceFailure if a series has not
/// settled within 10^4 terms.
std::vector<double> pnss_analytic(double kappa_tilde, double gamma_tilde, int levels);

/// dP/dt = R P restricted to the populations of the truncated space.
RMatrix population_rate_matrix(const SLParams& params, HilbertDim dim);

/// Null vector of the rate matrix, normalized to unit sum.
std::vector<double> steady_populations(const SLParams& params, HilbertDim dim);

/// Highest level with population above `threshold`.
int highest_occupied_level(const std::vector<double>& populations,
                           double threshold = kOccupationThreshold);

/// n_hi of the untruncated steady state: the dimension is grown until the top
/// population is negligible, so the result depends on the rates only.
int n_hi(const SLParams& params, double threshold = kOccupationThreshold);

struct SteadyState {
  DensityMatrix rho;
  std::vector<double> populations;
  int n_hi = 0;
  double energy = 0.0;                 // <a^dag a>
  std::optional<double> radius;        // classical limit-cycle radius, above bifurcation
  std::optional<double> energy_ratio;  // energy / (B/2), above bifurcation
};

/// Throws InvalidArgument for gamma2 <= 0 and DimTooSmall when the top level
/// holds more than 1e-6.
SteadyState steady_state_numeric(const SLParams& params, HilbertDim dim);

struct WorkingRegime {
  double A = 0.0;  // k1 / g2
  double B = 0.0;  // (k1 - g1) / g2
  double C = 0.0;  // A / B; +inf at the bifurcation, negative below it
  double basis = 0.0;
  bool below_bifurcation = false;  // k1 <= g1
};

WorkingRegime regime(const SLParams& params);

/// Rates for the working-regime point (A, B) with basis parameter k1.
SLParams params_from_regime(double A, double B, double kappa1);

inline constexpr double kMuchGreaterFactor = 10.0;

struct EligibilityMargins {
  double second_moment = 0.0;  // 2 <a^dag^2 a^2> / A
  double energy = 0.0;         // <a^dag a> / C

  bool eligible(double factor = kMuchGreaterFactor) const {
    return second_moment >= factor && energy >= factor;
  }
};

EligibilityMargins eligibility(const WorkingRegime& wr, const DensityMatrix& rho);
EligibilityMargins eligibility(const WorkingRegime& wr, double n, double n2);

/// B / (4C)
double limit_cycle_margin(const WorkingRegime& wr);
bool classical_limit_cycle(const WorkingRegime& wr, double factor = kMuchGreaterFactor);

/// Radial Gaussian fit of the classical-regime steady-state Wigner function.
WignerGrid wigner_guess(const SLParams& params, const GridSpec& grid);

}  // namespace qsl

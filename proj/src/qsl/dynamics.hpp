#pragma once

#include <optional>
#include <vector>

#include "qsl/core.hpp"

namespace qsl {

/// Nonconservative rates in units of the oscillator frequency.
struct SLParams {
  double kappa1 = 0.0;  // one-quantum pump
  double gamma1 = 0.0;  // one-quantum loss
  double gamma2 = 0.0;  // two-quantum loss

  void validate() const;
  SLParams scaled(double s) const { return {kappa1 * s, gamma1 * s, gamma2 * s}; }
  double rate_sum() const { return kappa1 + gamma1 + gamma2; }
  friend bool operator==(const SLParams&, const SLParams&) = default;
};

/// Evolution frame. The dissipators commute with the free rotation, so the
/// rotating frame integrates only the dissipative part and samples are rotated
/// back exactly: rho_lab(t)_mn = exp(-i (m - n) t) rho_rot(t)_mn.
enum class Frame { lab, rotating };

/// Applies the Lindbladian elementwise in the Fock basis (O(N^2) per call).
/// Matches the dense operator form with truncated ladder operators exactly,
/// including the missing pump loss out of level N-1.
class LindbladGenerator {
 public:
  LindbladGenerator(const SLParams& params, HilbertDim dim);

  CMatrix apply(const CMatrix& rho, Frame frame = Frame::lab) const;
  HilbertDim dim() const noexcept { return dim_; }
  const SLParams& params() const noexcept { return params_; }

 private:
  SLParams params_;
  HilbertDim dim_;
  CMatrix diagonal_lab_;
  CMatrix diagonal_rot_;
  RMatrix shift1_;  // sqrt((m+1)(n+1))
  RMatrix shift2_;  // sqrt((m+1)(m+2)(n+1)(n+2))
};

CMatrix lindblad_rhs(const SLParams& params, const DensityMatrix& rho);

struct Moments {
  Complex a;        // <a>
  double n = 0.0;   // <a^dag a>
  double n2 = 0.0;  // <a^dag^2 a^2>
};

Moments moments(const CMatrix& rho);

/// rho_mn * exp(-i (m - n) t): rotating-frame matrix to lab frame.
CMatrix rotate_to_lab(const CMatrix& rho_rot, double t);
CMatrix rotate_to_frame(const CMatrix& rho_lab, double t);

struct EvolveOptions {
  double atol = 1e-10;
  double rtol = 1e-8;
  double sample_every = 0.0;  // <= 0: only t = 0 and t_end
  int keep_every = 1;         // store every k-th sampled state; 0 stores none
  double top_level_tolerance = 1e-6;
  Frame frame = Frame::rotating;
  std::optional<DensityMatrix> reference;  // d_tr column when set
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Complex> a;          // <a>
  std::vector<double> n;           // <a^dag a>
  std::vector<double> n2;          // <a^dag^2 a^2>
  std::vector<double> distance;    // d_tr to the reference (empty without one)
  std::vector<std::size_t> state_sample;  // sample index of each stored state
  std::vector<DensityMatrix> states;
  long accepted_steps = 0;
  long rejected_steps = 0;
  int renormalizations = 0;
  double max_trace_drift = 0.0;     // largest |tr - 1| seen before renormalizing
  double max_hermiticity_defect = 0.0;
};

Trajectory evolve(const SLParams& params, const DensityMatrix& rho0, double t_end,
                  const EvolveOptions& options = {});

struct SteadyStateTimeOptions {
  double epsilon = 1e-3;
  double t_cap = 1e6;
  double atol = 1e-10;
  double rtol = 1e-8;
  double relative_precision = 1e-3;
  double top_level_tolerance = 1e-6;
  Frame frame = Frame::rotating;
};

struct SteadyStateTime {
  double time = 0.0;
  double distance = 0.0;  // d_tr at `time`
  long accepted_steps = 0;
};

/// First time the trace distance to rho_ss drops to epsilon. The distance is
/// checked after every accepted step and the crossing refined by bisection.
/// Throws NotReached past options.t_cap.
SteadyStateTime steady_state_time(const SLParams& params, const DensityMatrix& rho0,
                                  const DensityMatrix& rho_ss,
                                  const SteadyStateTimeOptions& options = {});

struct ClassicalState {
  double t = 0.0;
  Complex alpha;
  double radius = 0.0;  // sqrt(2) |alpha|
  double theta = 0.0;   // unwrapped phase of alpha
};

struct ClassicalOptions {
  double tol = 1e-10;
  double sample_every = 0.0;  // <= 0: only t = 0 and t_end
};

/// alpha' = -i alpha + ((k1 - g1)/2) alpha - g2 |alpha|^2 alpha
std::vector<ClassicalState> classical_trajectory(const SLParams& params, Complex alpha0,
                                                 double t_end,
                                                 const ClassicalOptions& options = {});

double classical_limit_cycle_radius(const SLParams& params);

/// | |rho_mn| - |rho_ss_mn| |
RMatrix coherence_deviation(const DensityMatrix& rho, const DensityMatrix& rho_ss);

/// Largest entry of each off-diagonal band k = 1..N-1 (index k-1).
std::vector<double> band_maxima(const RMatrix& deviation);

}  // namespace qsl

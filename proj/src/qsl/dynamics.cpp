#include "qsl/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsl/integrator.hpp"

namespace qsl {

void SLParams::validate() const {
  for (const double r : {kappa1, gamma1, gamma2}) {
    if (!std::isfinite(r) || r < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "rates must be finite and non-negative");
    }
  }
}

LindbladGenerator::LindbladGenerator(const SLParams& params, HilbertDim dim)
    : params_(params), dim_(dim) {
  params.validate();
  const int N = dim.value();
  RMatrix decay(N, N);
  diagonal_lab_.resize(N, N);
  shift1_.resize(N, N);
  shift2_.resize(N, N);
  auto pump_out = [N](int k) { return k < N - 1 ? k + 1.0 : 0.0; };
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < N; ++m) {
      const double dm = m, dn = n;
      decay(m, n) = -0.5 * params.kappa1 * (pump_out(m) + pump_out(n)) -
                    0.5 * params.gamma1 * (dm + dn) -
                    0.5 * params.gamma2 * (dm * (dm - 1.0) + dn * (dn - 1.0));
      diagonal_lab_(m, n) = Complex(decay(m, n), -(dm - dn));
      shift1_(m, n) = std::sqrt((dm + 1.0) * (dn + 1.0));
      shift2_(m, n) = std::sqrt((dm + 1.0) * (dm + 2.0) * (dn + 1.0) * (dn + 2.0));
    }
  }
  diagonal_rot_ = decay.cast<Complex>();
}

CMatrix LindbladGenerator::apply(const CMatrix& rho, Frame frame) const {
  const int N = dim_.value();
  if (rho.rows() != N || rho.cols() != N) {
    throw Error(ErrorCode::DimMismatch, "lindblad: state shape does not match generator");
  }
  CMatrix out = (frame == Frame::lab ? diagonal_lab_ : diagonal_rot_).cwiseProduct(rho);
  const int M = N - 1;
  if (params_.kappa1 != 0.0) {
    out.bottomRightCorner(M, M).noalias() +=
        params_.kappa1 * shift1_.topLeftCorner(M, M).cast<Complex>().cwiseProduct(
                             rho.topLeftCorner(M, M));
  }
  if (params_.gamma1 != 0.0) {
    out.topLeftCorner(M, M).noalias() +=
        params_.gamma1 * shift1_.topLeftCorner(M, M).cast<Complex>().cwiseProduct(
                             rho.bottomRightCorner(M, M));
  }
  if (params_.gamma2 != 0.0 && N > 2) {
    const int K = N - 2;
    out.topLeftCorner(K, K).noalias() +=
        params_.gamma2 * shift2_.topLeftCorner(K, K).cast<Complex>().cwiseProduct(
                             rho.bottomRightCorner(K, K));
  }
  return out;
}

CMatrix lindblad_rhs(const SLParams& params, const DensityMatrix& rho) {
  return LindbladGenerator(params, rho.dim()).apply(rho.matrix(), Frame::lab);
}

Moments moments(const CMatrix& rho) {
  Moments m;
  for (Eigen::Index k = 0; k < rho.rows(); ++k) {
    const double dk = static_cast<double>(k);
    const double p = rho(k, k).real();
    m.n += dk * p;
    m.n2 += dk * (dk - 1.0) * p;
    if (k > 0) m.a += std::sqrt(dk) * rho(k, k - 1);
  }
  return m;
}

namespace {

CMatrix rotate(const CMatrix& rho, double t) {
  const Eigen::Index N = rho.rows();
  Eigen::VectorXcd phase(N);
  for (Eigen::Index k = 0; k < N; ++k) phase(k) = std::polar(1.0, -static_cast<double>(k) * t);
  CMatrix out(N, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index m = 0; m < N; ++m) out(m, n) = (phase(m) * std::conj(phase(n))) * rho(m, n);
  }
  return out;
}

double top_population(const CMatrix& rho) {
  return rho(rho.rows() - 1, rho.rows() - 1).real();
}

void check_top_level(const CMatrix& rho, double tolerance, double t) {
  const double top = top_population(rho);
  if (top > tolerance) {
    throw Error(ErrorCode::TruncationLeak,
                "population " + std::to_string(top) + " at the top Fock level at t = " +
                    std::to_string(t) + "; increase the dimension");
  }
}

// Re-symmetrizes and renormalizes after an accepted step.
struct Projector {
  int renormalizations = 0;
  double max_drift = 0.0;
  double max_defect = 0.0;

  StepAction operator()(CMatrix& y) {
    max_defect = std::max(max_defect, hermiticity_defect(y));
    y = hermitian_part(y);
    const double drift = std::abs(y.trace().real() - 1.0);
    max_drift = std::max(max_drift, drift);
    if (drift > 1e-10) {
      y /= y.trace().real();
      ++renormalizations;
      return StepAction::proceed_modified;
    }
    return StepAction::proceed;
  }
};

StepControl step_control(double atol, double rtol) {
  if (!(atol > 0.0) || !(rtol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
  StepControl c;
  c.atol = atol;
  c.rtol = rtol;
  return c;
}

std::vector<double> sample_times(double t_end, double every) {
  std::vector<double> times{0.0};
  if (t_end <= 0.0) return times;
  if (every > 0.0) {
    const auto count = static_cast<long>(std::floor(t_end / every * (1.0 + 1e-12)));
    for (long k = 1; k <= count; ++k) {
      const double t = static_cast<double>(k) * every;
      if (t < t_end * (1.0 - 1e-12)) times.push_back(t);
    }
  }
  times.push_back(t_end);
  return times;
}

}  // namespace

CMatrix rotate_to_lab(const CMatrix& rho_rot, double t) { return rotate(rho_rot, t); }
CMatrix rotate_to_frame(const CMatrix& rho_lab, double t) { return rotate(rho_lab, -t); }

Trajectory evolve(const SLParams& params, const DensityMatrix& rho0, double t_end,
                  const EvolveOptions& options) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must be finite and >= 0");
  }
  if (options.reference) require_same_dim(rho0.dim(), options.reference->dim(), "evolve");
  const LindbladGenerator gen(params, rho0.dim());
  const Frame frame = options.frame;
  auto rhs = [&](double, const CMatrix& y) { return gen.apply(y, frame); };

  Dopri5<CMatrix> stepper(step_control(options.atol, options.rtol));
  Projector project;
  Trajectory traj;
  const auto times = sample_times(t_end, options.sample_every);

  double t = 0.0;
  CMatrix y = rho0.matrix();
  for (std::size_t s = 0; s < times.size(); ++s) {
    stepper.integrate(t, y, times[s], rhs, [&](double, CMatrix& state) { return project(state); });
    t = times[s];
    CMatrix lab = frame == Frame::rotating ? rotate_to_lab(y, t) : y;
    lab = hermitian_part(lab);
    check_top_level(lab, options.top_level_tolerance, t);

    const Moments mom = moments(lab);
    traj.times.push_back(t);
    traj.a.push_back(mom.a);
    traj.n.push_back(mom.n);
    traj.n2.push_back(mom.n2);
    if (options.reference) traj.distance.push_back(trace_distance(lab, options.reference->matrix()));
    if (options.keep_every > 0 && s % static_cast<std::size_t>(options.keep_every) == 0) {
      traj.state_sample.push_back(s);
      traj.states.push_back(DensityMatrix::from_matrix(std::move(lab)));
    }
  }
  traj.accepted_steps = stepper.accepted_steps();
  traj.rejected_steps = stepper.rejected_steps();
  traj.renormalizations = project.renormalizations;
  traj.max_trace_drift = project.max_drift;
  traj.max_hermiticity_defect = project.max_defect;
  return traj;
}

SteadyStateTime steady_state_time(const SLParams& params, const DensityMatrix& rho0,
                                  const DensityMatrix& rho_ss,
                                  const SteadyStateTimeOptions& options) {
  require_same_dim(rho0.dim(), rho_ss.dim(), "steady_state_time");
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  const LindbladGenerator gen(params, rho0.dim());
  const Frame frame = options.frame;
  const CMatrix& target = rho_ss.matrix();
  const double sqrt_n = std::sqrt(static_cast<double>(rho0.dim().value()));
  const double eps = options.epsilon;
  auto rhs = [&](double, const CMatrix& y) { return gen.apply(y, frame); };

  auto lab_of = [&](const CMatrix& y, double t) {
    return frame == Frame::rotating ? rotate_to_lab(y, t) : y;
  };
  // Cheap bounds decide most steps without an eigensolve.
  auto distance_if_close = [&](const CMatrix& lab, double& d) {
    const CMatrix diff = lab - target;
    const double lower = 0.5 * diff.diagonal().cwiseAbs().sum();
    if (lower > eps) return false;
    const double upper = 0.5 * sqrt_n * diff.norm();
    d = upper <= eps ? upper : trace_distance(lab, target);
    return d <= eps;
  };

  SteadyStateTime result;
  {
    double d0 = 0.0;
    CMatrix lab0 = rho0.matrix();
    if (distance_if_close(lab0, d0)) {
      result.distance = trace_distance(lab0, target);
      return result;
    }
  }

  const StepControl control = step_control(options.atol, options.rtol);
  Dopri5<CMatrix> stepper(control);
  Projector project;
  double t = 0.0;
  CMatrix y = rho0.matrix();
  double t_prev = 0.0;
  CMatrix y_prev = y;
  bool crossed = false;

  auto observer = [&](double tn, CMatrix& state) {
    const StepAction action = project(state);
    const CMatrix lab = lab_of(state, tn);
    check_top_level(lab, options.top_level_tolerance, tn);
    double d = 0.0;
    if (distance_if_close(lab, d)) {
      crossed = true;
      return StepAction::stop;
    }
    t_prev = tn;
    y_prev = state;
    return action;
  };
  stepper.integrate(t, y, options.t_cap, rhs, observer);
  result.accepted_steps = stepper.accepted_steps();
  if (!crossed) {
    throw Error(ErrorCode::NotReached, "trace distance stayed above " + std::to_string(eps) +
                                           " up to t = " + std::to_string(options.t_cap));
  }

  // Bisection inside the bracketing step [t_prev, t].
  double lo = t_prev, hi = t;
  while (hi - lo > options.relative_precision * hi) {
    const double mid = 0.5 * (lo + hi);
    Dopri5<CMatrix> sub(control);
    double ts = t_prev;
    CMatrix ys = y_prev;
    sub.integrate(ts, ys, mid, rhs);
    double d = 0.0;
    if (distance_if_close(lab_of(hermitian_part(ys), mid), d)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  {
    Dopri5<CMatrix> sub(control);
    double ts = t_prev;
    CMatrix ys = y_prev;
    sub.integrate(ts, ys, hi, rhs);
    result.distance = trace_distance(lab_of(hermitian_part(ys), hi), target);
  }
  result.time = hi;
  return result;
}

double classical_limit_cycle_radius(const SLParams& params) {
  if (params.kappa1 <= params.gamma1) return 0.0;
  if (params.gamma2 <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "limit-cycle radius needs gamma2 > 0");
  }
  return std::sqrt((params.kappa1 - params.gamma1) / params.gamma2);
}

std::vector<ClassicalState> classical_trajectory(const SLParams& params, Complex alpha0,
                                                 double t_end, const ClassicalOptions& options) {
  params.validate();
  if (!(t_end >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be >= 0");
  const double gain = 0.5 * (params.kappa1 - params.gamma1);
  const double g2 = params.gamma2;
  auto rhs = [&](double, Complex a) {
    return Complex(0.0, -1.0) * a + gain * a - g2 * std::norm(a) * a;
  };

  StepControl control = step_control(0.01 * options.tol, 0.01 * options.tol);
  control.h_max = 0.5;  // keeps per-step phase advance well below pi for unwrapping
  Dopri5<Complex> stepper(control);

  double theta = std::arg(alpha0);
  double last_arg = theta;
  auto unwrap = [&](Complex a) {
    if (a == Complex(0.0, 0.0)) return;
    const double now = std::arg(a);
    double delta = now - last_arg;
    delta -= 2.0 * std::numbers::pi * std::round(delta / (2.0 * std::numbers::pi));
    theta += delta;
    last_arg = now;
  };
  auto record = [&](double t, Complex a) {
    return ClassicalState{t, a, std::numbers::sqrt2 * std::abs(a), theta};
  };

  std::vector<ClassicalState> out{record(0.0, alpha0)};
  double t = 0.0;
  Complex a = alpha0;
  const auto times = sample_times(t_end, options.sample_every);
  for (std::size_t s = 1; s < times.size(); ++s) {
    stepper.integrate(t, a, times[s], rhs, [&](double, Complex& state) {
      unwrap(state);
      return StepAction::proceed;
    });
    t = times[s];
    out.push_back(record(t, a));
  }
  return out;
}

RMatrix coherence_deviation(const DensityMatrix& rho, const DensityMatrix& rho_ss) {
  require_same_dim(rho.dim(), rho_ss.dim(), "coherence_deviation");
  return (rho.matrix().cwiseAbs() - rho_ss.matrix().cwiseAbs()).cwiseAbs();
}

std::vector<double> band_maxima(const RMatrix& deviation) {
  const Eigen::Index N = deviation.rows();
  std::vector<double> bands(static_cast<std::size_t>(std::max<Eigen::Index>(N - 1, 0)), 0.0);
  for (Eigen::Index k = 1; k < N; ++k) {
    double& b = bands[static_cast<std::size_t>(k - 1)];
    for (Eigen::Index m = 0; m + k < N; ++m) {
      b = std::max({b, deviation(m, m + k), deviation(m + k, m)});
    }
  }
  return bands;
}

}  // namespace qsl

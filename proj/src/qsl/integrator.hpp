#pragma once

// Embedded Dormand-Prince 5(4) integrator with PI step-size control.
//
// State must support `State + State`, `double * State` and be copyable. The
// error ratio is supplied through an `error_ratio` overload found by ADL or
// declared below for the types used in this library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qsl/error.hpp"

namespace qsl {

struct StepControl {
  double atol = 1e-10;
  double rtol = 1e-8;
  double h_initial = 0.0;  // 0 selects a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 10.0;
  long max_steps = 50'000'000;
};

/// max_i |err_i| / (atol + rtol * max(|y0_i|, |y1_i|))
inline double error_ratio(const Eigen::MatrixXcd& err, const Eigen::MatrixXcd& y0,
                          const Eigen::MatrixXcd& y1, double atol, double rtol) {
  const Eigen::ArrayXXd scale =
      atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

inline double error_ratio(std::complex<double> err, std::complex<double> y0,
                          std::complex<double> y1, double atol, double rtol) {
  return std::abs(err) / (atol + rtol * std::max(std::abs(y0), std::abs(y1)));
}

inline double max_abs(const Eigen::MatrixXcd& y) { return y.cwiseAbs().maxCoeff(); }
inline double max_abs(std::complex<double> y) { return std::abs(y); }

/// What the per-step observer asks the integrator to do next.
enum class StepAction {
  proceed,
  proceed_modified,  // observer changed y; the FSAL stage is recomputed
  stop,
};

template <class State>
class Dopri5 {
 public:
  explicit Dopri5(StepControl control = {}) : control_(control) {}

  /// Integrates y from t to t_end. `observer(t, y)` is called after each
  /// accepted step and may modify y. Returns false if the observer stopped
  /// the integration early (t, y then hold the stopping point).
  template <class Rhs, class Observer>
  bool integrate(double& t, State& y, double t_end, Rhs&& rhs, Observer&& observer) {
    if (t_end <= t) return true;
    if (!have_k1_ || t != t_k1_) {
      k1_ = rhs(t, y);
      have_k1_ = true;
    }
    if (h_ <= 0.0) h_ = control_.h_initial > 0.0 ? control_.h_initial : initial_step(t, y, rhs);

    while (t < t_end) {
      if (++steps_ > control_.max_steps) {
        throw Error(ErrorCode::StepFailure, "integrator exceeded the step budget");
      }
      double h = std::min({h_, control_.h_max, t_end - t});
      const bool last = (t + h >= t_end);
      if (last) h = t_end - t;
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
        throw Error(ErrorCode::StepFailure,
                    "step size underflow at t = " + std::to_string(t));
      }

      const State k2 = rhs(t + c2 * h, State(y + h * (a21 * k1_)));
      const State k3 = rhs(t + c3 * h, State(y + h * (a31 * k1_ + a32 * k2)));
      const State k4 = rhs(t + c4 * h, State(y + h * (a41 * k1_ + a42 * k2 + a43 * k3)));
      const State k5 =
          rhs(t + c5 * h, State(y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 = rhs(
          t + h, State(y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      State y_new = y + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = rhs(t + h, y_new);
      const State err =
          h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const double ratio = error_ratio(err, y, y_new, control_.atol, control_.rtol);
      if (!std::isfinite(ratio)) {
        h_ = 0.25 * h;
        ++rejected_;
        continue;
      }
      if (ratio <= 1.0) {
        // PI controller (Hairer & Wanner, II.4): beta = 0.04, alpha = 0.2 - 0.75 beta.
        const double r = std::max(ratio, 1e-10);
        double factor = control_.safety * std::pow(r, -kAlpha) * std::pow(prev_ratio_, kBeta);
        factor = std::clamp(factor, control_.min_factor, control_.max_factor);
        if (rejected_last_) factor = std::min(factor, 1.0);
        prev_ratio_ = r;
        rejected_last_ = false;

        t = last ? t_end : t + h;
        y = std::move(y_new);
        k1_ = k7;
        t_k1_ = t;
        ++accepted_;
        if (!last || h >= 0.5 * h_) h_ = h * factor;

        const StepAction action = observer(t, y);
        if (action == StepAction::proceed_modified) k1_ = rhs(t, y);
        if (action == StepAction::stop) return false;
      } else {
        const double factor =
            std::max(control_.min_factor, control_.safety * std::pow(ratio, -0.2));
        h_ = h * factor;
        rejected_last_ = true;
        ++rejected_;
      }
    }
    return true;
  }

  template <class Rhs>
  void integrate(double& t, State& y, double t_end, Rhs&& rhs) {
    integrate(t, y, t_end, rhs, [](double, State&) { return StepAction::proceed; });
  }

  /// Forget the cached derivative after the caller edits the state.
  void invalidate() noexcept { have_k1_ = false; }

  long accepted_steps() const noexcept { return accepted_; }
  long rejected_steps() const noexcept { return rejected_; }
  double next_step() const noexcept { return h_; }

 private:
  template <class Rhs>
  double initial_step(double t, const State& y, Rhs& rhs) {
    // Hairer & Wanner, II.4 starting step heuristic.
    const double scale = control_.atol + control_.rtol * max_abs(y);
    const double d0 = max_abs(y) / scale;
    const double d1 = max_abs(k1_) / scale;
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, control_.h_max);
    const State y1 = y + h0 * k1_;
    const State f1 = rhs(t + h0, y1);
    const double d2 = max_abs(State(f1 - k1_)) / scale / h0;
    const double h1 = std::max(d1, d2) <= 1e-15
                          ? std::max(1e-6, h0 * 1e-3)
                          : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, control_.h_max});
  }

  static constexpr double kBeta = 0.04;
  static constexpr double kAlpha = 0.2 - 0.75 * kBeta;

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  // b - b_hat
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  StepControl control_;
  State k1_{};
  bool have_k1_ = false;
  double t_k1_ = 0.0;
  double h_ = 0.0;
  double prev_ratio_ = 1e-4;
  bool rejected_last_ = false;
  long steps_ = 0;
  long accepted_ = 0;
  long rejected_ = 0;
};

}  // namespace qsl

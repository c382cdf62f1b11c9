#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qsl/grid.hpp"
#include "qsl/steadystate.hpp"
#include "test_util.hpp"

using namespace qsl;

TEST_SUITE("steadystate") {
  TEST_CASE("closed-form populations match the rate-matrix kernel oracle") {
    for (const auto& [kt, gt] : {std::pair{0.1, 0.1}, std::pair{2.0, 0.5}, std::pair{20.0, 0.1}, std::pair{5.0, 20.0}}) {
      const SLParams p{kt, gt, 1.0};
      const int N = 2 * n_hi(p) + 30;
      const auto analytic = pnss_analytic(kt, gt, N);
      const auto kernel = oracle::populations_by_kernel(p, N);
      const auto numeric = steady_populations(p, HilbertDim(N));
      for (int n = 0; n < N; ++n) {
        CHECK(std::abs(analytic[n] - kernel[n]) < 1e-10);
        CHECK(std::abs(numeric[n] - kernel[n]) < 1e-10);
      }
    }
  }

  TEST_CASE("closed form survives very large pump ratios") {
    const auto p = pnss_analytic(200.0, 0.0, 300);
    double total = 0.0;
    for (double v : p) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("n_hi anchors on the C = 1 line") {
    const std::vector<std::pair<double, int>> anchors{{1.0, 9}, {10.0, 22}, {30.0, 42}, {50.0, 58}, {100.0, 94}};
    for (const auto& [B, expected] : anchors) {
      const auto p = params_from_regime(B, B, 0.1);
      CHECK(p.gamma1 == 0.0);
      CHECK(n_hi(p) == expected);
    }
  }

  TEST_CASE("highest occupied level") {
    CHECK(highest_occupied_level({0.5, 0.4, 1e-3, 2e-6, 5e-7}) == 3);
    CHECK(highest_occupied_level({1.0, 0.0}) == 0);
  }

  TEST_CASE("numeric steady state is a fixed point of the generator") {
    const SLParams p{1.0, 0.1, 0.045};
    const auto ss = steady_state_numeric(p, HilbertDim(60));
    CHECK(lindblad_rhs(p, ss.rho).norm() < 1e-12);
    CHECK(ss.energy == doctest::Approx(10.5024).epsilon(1e-4));
    REQUIRE(ss.radius.has_value());
    CHECK(*ss.radius == doctest::Approx(std::sqrt(20.0)));
    REQUIRE(ss.energy_ratio.has_value());
    CHECK(*ss.energy_ratio == doctest::Approx(ss.energy / 10.0));
  }

  TEST_CASE("steady state errors") {
    CHECK_ERROR_CODE(steady_state_numeric({1.0, 0.1, 0.0}, HilbertDim(20)), ErrorCode::InvalidArgument);
    CHECK_ERROR_CODE(steady_state_numeric({1.0, 0.9, 0.005}, HilbertDim(30)), ErrorCode::DimTooSmall);
  }

  TEST_CASE("scaling all rates leaves populations and n_hi unchanged") {
    const SLParams p{0.3, 0.1, 0.02};
    for (double s : {0.5, 3.0, 40.0}) {
      const auto a = steady_populations(p, HilbertDim(40));
      const auto b = steady_populations(p.scaled(s), HilbertDim(40));
      for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) <= 1e-10 * std::max(a[n], 1e-6));
      CHECK(n_hi(p) == n_hi(p.scaled(s)));
    }
  }

  TEST_CASE("working regime round trip") {
    const auto p = params_from_regime(13.18, 3.63, 0.1);
    const auto wr = regime(p);
    CHECK(wr.A == doctest::Approx(13.18));
    CHECK(wr.B == doctest::Approx(3.63));
    CHECK(wr.C == doctest::Approx(13.18 / 3.63));
    CHECK(!wr.below_bifurcation);
    CHECK(regime({0.1, 0.2, 0.1}).below_bifurcation);
    CHECK(regime({0.1, 0.2, 0.1}).C < 0.0);
    CHECK_ERROR_CODE(params_from_regime(1.0, 2.0, 0.1), ErrorCode::InvalidArgument);
    CHECK_ERROR_CODE(regime({0.1, 0.0, 0.0}), ErrorCode::InvalidArgument);
  }

  TEST_CASE("classical-regime eligibility and limit cycle margin") {
    const auto wr = regime(params_from_regime(1000.0, 900.0, 0.1));
    const auto m = eligibility(wr, 450.0, 450.0 * 450.0);
    CHECK(m.second_moment == doctest::Approx(2.0 * 450.0 * 450.0 / 1000.0));
    CHECK(m.energy == doctest::Approx(450.0 / (1000.0 / 900.0)));
    CHECK(m.eligible());
    CHECK(limit_cycle_margin(wr) == doctest::Approx(900.0 / (4.0 * 1000.0 / 900.0)));
    CHECK(classical_limit_cycle(wr));
    CHECK(!classical_limit_cycle(regime({1.0, 0.9, 0.2})));
  }

  TEST_CASE("guess function is normalized and peaks on the limit cycle") {
    const SLParams p = params_from_regime(100.0, 90.0, 0.1);
    const auto g = wigner_guess(p, GridSpec::square(16.0, 401));
    CHECK(g.integral() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_ERROR_CODE(wigner_guess({0.1, 0.2, 0.1}, GridSpec::square(5.0, 51)), ErrorCode::BelowBifurcation);
  }
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qsl/wigner.hpp"
#include "test_util.hpp"

using namespace qsl;

TEST_SUITE("wigner") {
  TEST_CASE("Fock-basis elements match direct quadrature") {
    GridSpec g;
    g.x = {-2.0, 2.5, 7};
    g.p = {-1.5, 2.0, 5};
    for (const auto& [m, n] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{2, 0}, std::pair{0, 2},
                               std::pair{3, 1}, std::pair{1, 4}, std::pair{6, 6}}) {
      const auto w = fock_wigner_element(m, n, g);
      for (int i = 0; i < g.x.points; ++i) {
        for (int j = 0; j < g.p.points; ++j) {
          const Complex ref = oracle::fock_wigner_quadrature(m, n, g.x.at(i), g.p.at(j));
          CHECK_MESSAGE(std::abs(w(i, j) - ref) < 1e-10, "m=" << m << " n=" << n);
        }
      }
    }
  }

  TEST_CASE("vacuum normalization and bounds") {
    const auto g = GridSpec::square(6.0, 121);
    const auto w = wigner_of_rho(make_state(state::Fock{0}, HilbertDim(4)), g);
    CHECK(w.values().maxCoeff() == doctest::Approx(1.0 / std::numbers::pi));
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-10));
    const auto w5 = wigner_of_rho(make_state(state::Fock{5}, HilbertDim(8)), GridSpec::square(8.0, 201));
    CHECK(w5.max_abs() <= 1.0 / std::numbers::pi + 1e-12);
  }

  TEST_CASE("Fock 1 negative volume is 2 exp(-1/2) - 1") {
    const double exact = 2.0 * std::exp(-0.5) - 1.0;
    const auto rho = make_state(state::Fock{1}, HilbertDim(4));
    const auto coarse = negative_volume(wigner_of_rho(rho, GridSpec::square(7.0, 401)));
    CHECK(std::abs(coarse.volume - exact) <= coarse.error_estimate);
    const auto fine = negative_volume(wigner_of_rho(rho, GridSpec::square(7.0, 801)));
    CHECK(fine.volume == doctest::Approx(exact).epsilon(1e-5));
    CHECK(std::abs(fine.volume - exact) <= fine.error_estimate);
  }

  TEST_CASE("coherent state has no negative volume") {
    const auto rho = make_state(state::Coherent{{1.5, -1.0}}, HilbertDim(30));
    CHECK(negative_volume(wigner_auto(rho, 3.25)).volume <= 1e-6);
  }

  TEST_CASE("position marginal is the squared wavefunction") {
    const auto g = GridSpec::square(7.0, 281);
    const auto w = wigner_of_rho(make_state(state::Fock{3}, HilbertDim(6)), g);
    const auto mx = w.marginal_x();
    for (int i = 0; i < g.x.points; i += 20) {
      const double psi = oracle::fock_wavefunctions(3, g.x.at(i))[3];
      CHECK(mx[i] == doctest::Approx(psi * psi).epsilon(1e-8));
    }
  }

  TEST_CASE("orthogonal states have zero overlap") {
    const auto g = GridSpec::square(7.0, 301);
    const auto w0 = wigner_of_rho(make_state(state::Fock{0}, HilbertDim(3)), g);
    const auto w1 = wigner_of_rho(make_state(state::Fock{1}, HilbertDim(3)), g);
    CHECK(std::abs(overlap_expectation(w0, w1)) < 1e-10);
    CHECK(overlap_expectation(w1, w1) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("energy from the overlap formula uses only the diagonal") {
    const HilbertDim dim(30);
    const auto rho = make_state(state::Coherent{{1.0, 1.0}}, dim);
    const auto g = GridSpec::square(9.0, 301);
    const auto w_n = wigner_of_operator(build_operator(OperatorKind::number, dim).matrix(), g);
    const CMatrix diag = rho.matrix().diagonal().asDiagonal();
    CHECK(overlap_expectation(wigner_of_rho(rho, g), w_n) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(overlap_expectation(wigner_of_operator(rho.matrix() - diag, g), w_n)) < 1e-6);
  }

  TEST_CASE("grid errors") {
    const auto cat = make_state(state::Cat{{2.0, 0.0}, 0.0}, HilbertDim(30));
    CHECK_ERROR_CODE(wigner_of_rho(cat, GridSpec::square(4.0, 81)), ErrorCode::GridTooSmall);
    CHECK(wigner_auto(cat, 4.0).boundary_max_abs() <= 1e-8 * wigner_auto(cat, 4.0).max_abs());
    const auto a = wigner_of_rho(cat, GridSpec::square(9.0, 101));
    const auto b = wigner_of_rho(cat, GridSpec::square(9.0, 103));
    CHECK_ERROR_CODE(overlap_expectation(a, b), ErrorCode::GridMismatch);
    CHECK_ERROR_CODE(WignerGrid(GridSpec::square(1.0, 5), RMatrix::Zero(4, 5)), ErrorCode::GridMismatch);
    CHECK_ERROR_CODE(GridSpec::square(1.0, 1).validate(), ErrorCode::InvalidArgument);
    const auto tiny = wigner_of_rho(make_state(state::Fock{0}, HilbertDim(3)), GridSpec::square(6.0, 9));
    CHECK_ERROR_CODE(apply_eom_operator(tiny, {0.1, 0.1, 0.1}), ErrorCode::GridTooCoarse);
    const auto clipped = wigner_of_rho(make_state(state::Fock{0}, HilbertDim(3)), GridSpec::square(1.0, 41), 1.0);
    CHECK_ERROR_CODE(negative_volume(clipped), ErrorCode::NotNormalized);
  }

  TEST_CASE("finite-difference derivative of the vacuum") {
    std::vector<double> errors;
    for (int points : {121, 241}) {
      const auto g = GridSpec::square(6.0, points);
      const auto w = wigner_of_rho(make_state(state::Fock{0}, HilbertDim(3)), g);
      const auto dx = apply_phase_operator(moyal::PhaseDiffOp::derivative(1, 0), {}, w);
      const auto inner = crop(w, kStencilMargin);
      double worst = 0.0;
      for (int i = 0; i < inner.spec().x.points; ++i) {
        for (int j = 0; j < inner.spec().p.points; ++j) {
          worst = std::max(worst, std::abs(dx.values()(i, j) + 2.0 * inner.spec().x.at(i) * inner.values()(i, j)));
        }
      }
      errors.push_back(worst);
    }
    CHECK(errors[1] < 5e-6);
    CHECK(errors[0] / errors[1] > 12.0);
  }

  TEST_CASE("phase-space generator reproduces the master equation") {
    const SLParams p{0.5, 0.2, 0.1};
    const auto rho = make_state(state::FockSuperposition{{{0, 1.0}, {2, Complex(0.3, 0.4)}, {3, 0.5}}}, HilbertDim(12));
    const auto g = GridSpec::square(7.0, 281);
    const auto numeric = apply_eom_operator(wigner_of_rho(rho, g), p);
    const auto reference = crop(wigner_of_operator(lindblad_rhs(p, rho), g), kStencilMargin);
    CHECK((numeric.values() - reference.values()).norm() / reference.values().norm() < 1e-3);
  }
}

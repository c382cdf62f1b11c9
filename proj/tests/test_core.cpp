#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qsl/core.hpp"
#include "test_util.hpp"

using namespace qsl;

TEST_SUITE("core") {
  TEST_CASE("ladder operator matches the oracle and the commutator away from the edge") {
    const HilbertDim dim(12);
    const auto a = build_operator(OperatorKind::annihilate, dim).matrix();
    const auto ad = build_operator(OperatorKind::create, dim).matrix();
    CHECK((a - oracle::ladder(12)).norm() == 0.0);
    CHECK((ad - a.adjoint()).norm() == 0.0);
    const CMatrix comm = a * ad - ad * a;
    for (int n = 0; n < 11; ++n) CHECK(comm(n, n).real() == doctest::Approx(1.0));
    CHECK(comm(11, 11).real() == doctest::Approx(-11.0));
    const auto num = build_operator(OperatorKind::number, dim).matrix();
    const auto h = build_operator(OperatorKind::hamiltonian, dim).matrix();
    CHECK((num - ad * a).norm() < 1e-14);
    CHECK((h - num - 0.5 * CMatrix::Identity(12, 12)).norm() < 1e-14);
  }

  TEST_CASE("dimension must hold at least two levels") {
    CHECK_ERROR_CODE(HilbertDim(1), ErrorCode::InvalidArgument);
    CHECK_ERROR_CODE(HilbertDim(0), ErrorCode::InvalidArgument);
  }

  TEST_CASE("density matrix validation") {
    CMatrix bad = CMatrix::Zero(3, 3);
    bad(0, 0) = 0.5;
    CHECK_ERROR_CODE(DensityMatrix::from_matrix(bad), ErrorCode::InvalidArgument);
    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_ERROR_CODE(DensityMatrix::from_matrix(neg), ErrorCode::InvalidArgument);
    CMatrix nonh = CMatrix::Identity(2, 2) * 0.5;
    nonh(0, 1) = Complex(0.1, 0.0);
    CHECK_ERROR_CODE(DensityMatrix::from_matrix(nonh), ErrorCode::InvalidArgument);
  }

  TEST_CASE("state energies") {
    const HilbertDim dim(40);
    CHECK(expectation(make_state(state::Fock{3}, dim), OperatorKind::number).real() == doctest::Approx(3.0));
    CHECK(expectation(make_state(state::Thermal{1.5}, dim), OperatorKind::number).real() ==
          doctest::Approx(1.5).epsilon(1e-6));
    const Complex beta(1.2, -0.7);
    const auto coh = make_state(state::Coherent{beta}, dim);
    CHECK(expectation(coh, OperatorKind::number).real() == doctest::Approx(std::norm(beta)).epsilon(1e-10));
    const Complex a = expectation(coh, OperatorKind::annihilate);
    CHECK(std::abs(a - beta) < 1e-10);
    // even cat: <n> = |b|^2 tanh|b|^2
    const auto cat = make_state(state::Cat{{1.5, 0.0}, 0.0}, dim);
    CHECK(expectation(cat, OperatorKind::number).real() == doctest::Approx(2.25 * std::tanh(2.25)).epsilon(1e-10));
    CHECK(std::abs(expectation(cat, OperatorKind::annihilate)) < 1e-12);
  }

  TEST_CASE("state construction errors") {
    const HilbertDim dim(10);
    CHECK_ERROR_CODE(make_state(state::Fock{10}, dim), ErrorCode::InvalidSpec);
    CHECK_ERROR_CODE(make_state(state::Fock{-1}, dim), ErrorCode::InvalidSpec);
    CHECK_ERROR_CODE(make_state(state::Thermal{-0.1}, dim), ErrorCode::InvalidSpec);
    CHECK_ERROR_CODE(make_state(state::Coherent{{3.0, 0.0}}, dim), ErrorCode::TruncationLeak);
    CHECK_ERROR_CODE(make_state(state::Thermal{3.0}, HilbertDim(30)), ErrorCode::TruncationLeak);
    CHECK_ERROR_CODE(make_state(state::FockSuperposition{{}}, dim), ErrorCode::InvalidSpec);
    CHECK_ERROR_CODE(make_state(state::FockSuperposition{{{12, 1.0}}}, dim), ErrorCode::InvalidSpec);
  }

  TEST_CASE("truncation leak of a thermal state is geometric") {
    CHECK(truncation_leak(state::Thermal{3.0}, 30) == doctest::Approx(std::pow(0.75, 30)));
    CHECK(truncation_leak(state::Fock{4}, 5) == 0.0);
    CHECK(truncation_leak(state::Fock{5}, 5) == 1.0);
  }

  TEST_CASE("superposition is normalized") {
    const auto rho = make_state(state::FockSuperposition{{{0, 1.0}, {2, Complex(0.0, 1.0)}}}, HilbertDim(5));
    CHECK(rho.population(0) == doctest::Approx(0.5));
    CHECK(rho.population(2) == doctest::Approx(0.5));
    CHECK(std::abs(rho.matrix()(0, 2) - Complex(0.0, -0.5)) < 1e-14);
  }

  TEST_CASE("trace distance") {
    const HilbertDim dim(6);
    const auto f0 = make_state(state::Fock{0}, dim);
    const auto f1 = make_state(state::Fock{1}, dim);
    CHECK(trace_distance(f0, f1) == doctest::Approx(1.0));
    CHECK(trace_distance(f0, f0) == doctest::Approx(0.0));
    const auto t = make_state(state::Thermal{0.2}, HilbertDim(30));
    const auto c = make_state(state::Coherent{{0.5, 0.5}}, HilbertDim(30));
    const double d = trace_distance(t, c);
    CHECK(d == doctest::Approx(trace_distance(c, t)));
    CHECK(d > 0.0);
    CHECK(d < 1.0);
    CHECK_ERROR_CODE(trace_distance(f0, make_state(state::Fock{0}, HilbertDim(7))), ErrorCode::DimMismatch);
  }

  TEST_CASE("pure-state trace distance equals sqrt(1 - overlap)") {
    const HilbertDim dim(40);
    const Complex a(1.0, 0.3);
    const Complex b(0.4, -0.2);
    const double overlap = std::exp(-std::norm(a - b));
    const double d = trace_distance(make_state(state::Coherent{a}, dim), make_state(state::Coherent{b}, dim));
    CHECK(d == doctest::Approx(std::sqrt(1.0 - overlap)).epsilon(1e-9));
  }
}

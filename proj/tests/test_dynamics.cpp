#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/steadystate.hpp"
#include "test_util.hpp"

using namespace qsl;

namespace {

DensityMatrix random_state(int N, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  CMatrix m(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m(i, j) = Complex(g(gen), g(gen));
  CMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(rho);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("elementwise generator equals the dense operator form") {
    const SLParams p{0.3, 0.2, 0.1};
    for (unsigned seed : {1u, 2u, 3u}) {
      const auto rho = random_state(9, seed);
      const CMatrix fast = LindbladGenerator(p, rho.dim()).apply(rho.matrix());
      const CMatrix dense = oracle::lindblad_dense(p, rho.matrix());
      CHECK((fast - dense).norm() < 1e-13);
      CHECK((lindblad_rhs(p, rho) - dense).norm() < 1e-13);
    }
  }

  TEST_CASE("rotating-frame generator drops only the free rotation") {
    const SLParams p{0.3, 0.2, 0.1};
    const auto rho = random_state(7, 11);
    const LindbladGenerator gen(p, rho.dim());
    const CMatrix h = build_operator(OperatorKind::hamiltonian, rho.dim()).matrix();
    const CMatrix free = Complex(0.0, -1.0) * (h * rho.matrix() - rho.matrix() * h);
    CHECK((gen.apply(rho.matrix(), Frame::lab) - gen.apply(rho.matrix(), Frame::rotating) - free).norm() < 1e-13);
  }

  TEST_CASE("generator preserves trace and hermiticity") {
    const SLParams p{0.7, 0.1, 0.4};
    const auto rho = random_state(10, 5);
    const CMatrix d = lindblad_rhs(p, rho);
    CHECK(std::abs(d.trace()) < 1e-13);
    CHECK(hermiticity_defect(d) < 1e-13);
  }

  TEST_CASE("moment equations for the amplitude and the energy") {
    const SLParams p{0.4, 0.15, 0.05};
    const auto rho = make_state(state::Coherent{{1.1, 0.4}}, HilbertDim(40));
    const CMatrix d = lindblad_rhs(p, rho);
    const CMatrix a = build_operator(OperatorKind::annihilate, rho.dim()).matrix();
    const CMatrix n = build_operator(OperatorKind::number, rho.dim()).matrix();
    const auto m = moments(rho.matrix());
    const Complex ada2 = (rho.matrix() * a.adjoint() * a * a).trace();
    const Complex da = (d * a).trace();
    const Complex expected_da = Complex(0.0, -1.0) * m.a + 0.5 * (p.kappa1 - p.gamma1) * m.a - p.gamma2 * ada2;
    CHECK(std::abs(da - expected_da) < 1e-10);
    const double dn = (d * n).trace().real();
    const double expected_dn = p.kappa1 * (m.n + 1.0) - p.gamma1 * m.n - 2.0 * p.gamma2 * m.n2;
    CHECK(dn == doctest::Approx(expected_dn).epsilon(1e-10));
  }

  TEST_CASE("integrator matches the exact propagator in both frames") {
    const SLParams p{0.3, 0.2, 0.1};
    const auto rho0 = make_state(state::FockSuperposition{{{0, 1.0}, {1, Complex(0.5, 0.5)}, {3, 0.7}}}, HilbertDim(8));
    const double t = 2.5;
    const CMatrix exact = oracle::propagate_exact(p, rho0.matrix(), t);
    for (Frame f : {Frame::lab, Frame::rotating}) {
      EvolveOptions o;
      o.atol = 1e-12;
      o.rtol = 1e-10;
      o.frame = f;
      o.top_level_tolerance = 1.0;
      const auto tr = evolve(p, rho0, t, o);
      REQUIRE(tr.states.size() == 2);
      CHECK(trace_distance(tr.states.back().matrix(), exact) < 1e-8);
      CHECK(tr.times.back() == doctest::Approx(t));
    }
  }

  TEST_CASE("sampling grid and stored states") {
    const SLParams p{0.2, 0.1, 0.05};
    const auto rho0 = make_state(state::Fock{2}, HilbertDim(15));
    EvolveOptions o;
    o.sample_every = 0.5;
    o.keep_every = 2;
    const auto tr = evolve(p, rho0, 3.0, o);
    CHECK(tr.times.size() == 7);
    CHECK(tr.states.size() == 4);
    CHECK(tr.state_sample.back() == 6);
    for (std::size_t i = 0; i < tr.times.size(); ++i) CHECK(tr.times[i] == doctest::Approx(0.5 * i));
  }

  TEST_CASE("frame rotation round trip") {
    const auto rho = random_state(6, 9);
    const CMatrix back = rotate_to_lab(rotate_to_frame(rho.matrix(), 1.7), 1.7);
    CHECK((back - rho.matrix()).norm() < 1e-14);
  }

  TEST_CASE("classical amplitude settles on the limit cycle") {
    const SLParams p{1.0, 0.1, 0.045};
    const double r = classical_limit_cycle_radius(p);
    CHECK(r == doctest::Approx(std::sqrt((p.kappa1 - p.gamma1) / p.gamma2)));
    ClassicalOptions o;
    o.sample_every = 1.0;
    const auto path = classical_trajectory(p, {0.1, 0.0}, 60.0, o);
    CHECK(path.back().radius == doctest::Approx(r).epsilon(1e-6));
    CHECK(path.back().theta < -55.0);
  }

  TEST_CASE("steady-state time") {
    const SLParams p{0.1, 0.05, 0.02};
    const HilbertDim dim(25);
    const auto ss = steady_state_numeric(p, dim);
    const auto rho0 = make_state(state::Fock{0}, dim);
    const auto r = steady_state_time(p, rho0, ss.rho);
    CHECK(r.distance <= 1e-3 * (1.0 + 1e-6));
    CHECK(r.time > 0.0);
    EvolveOptions o;
    o.reference = ss.rho;
    const auto before = evolve(p, rho0, r.time * 0.99, o);
    CHECK(before.distance.back() > 1e-3);
    SteadyStateTimeOptions cap;
    cap.t_cap = 1.0;
    CHECK_ERROR_CODE(steady_state_time(p, rho0, ss.rho, cap), ErrorCode::NotReached);
  }

  TEST_CASE("coherence deviation bands") {
    const SLParams p{0.1, 0.05, 0.02};
    const HilbertDim dim(20);
    const auto ss = steady_state_numeric(p, dim);
    const auto coh = make_state(state::Coherent{{1.0, 0.0}}, dim);
    const auto dev = coherence_deviation(coh, ss.rho);
    const auto bands = band_maxima(dev);
    CHECK(bands.size() == 19);
    double b1 = 0.0;
    for (int m = 0; m + 1 < 20; ++m) b1 = std::max(b1, std::abs(coh.matrix()(m, m + 1)));
    CHECK(bands[0] == doctest::Approx(b1));
  }

  TEST_CASE("parameter validation") {
    CHECK_ERROR_CODE(SLParams({-1.0, 0.0, 0.0}).validate(), ErrorCode::InvalidArgument);
    CHECK_ERROR_CODE(SLParams({1.0, std::nan(""), 0.0}).validate(), ErrorCode::InvalidArgument);
  }
}

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "qsl/moyal.hpp"

using namespace qsl::moyal;

namespace {

PhasePoly x() { return PhasePoly::var(Var::x); }
PhasePoly p() { return PhasePoly::var(Var::p); }

std::vector<PhasePoly> samples() {
  const PhasePoly i = Coeff::i();
  const PhasePoly s2 = Coeff::sqrt2();
  return {x(),
          p(),
          symbol_a(),
          symbol_adag(),
          x() * x() * p() + i * p(),
          s2 * x() * x() * x() - PhasePoly(Coeff::ratio(3, 7)) * p() * p(),
          symbol_number() * symbol_number(),
          PhasePoly::var(Var::gamma2) * x() * p() * p() + PhasePoly::var(Var::kappa1)};
}

}  // namespace

TEST_SUITE("moyal") {
  TEST_CASE("coefficient field arithmetic") {
    CHECK(Coeff::sqrt2() * Coeff::sqrt2() == Coeff(2));
    CHECK(Coeff::i() * Coeff::i() == Coeff(-1));
    CHECK((Coeff::ratio(1, 2) + Coeff::ratio(1, 3)) == Coeff::ratio(5, 6));
    CHECK(Coeff::i().conj() == -Coeff::i());
    CHECK((Coeff::sqrt2() * Coeff::i()).to_complex().imag() == doctest::Approx(1.4142135623730951));
  }

  TEST_CASE("Bopp-shift star product equals the bidifferential series") {
    const auto polys = samples();
    for (const auto& f : polys) {
      for (const auto& g : polys) {
        CHECK(star(f, g) == star_series(f, g));
      }
    }
  }

  TEST_CASE("star product is associative on samples") {
    const auto polys = samples();
    for (std::size_t i = 0; i + 2 < polys.size(); ++i) {
      CHECK(star(star(polys[i], polys[i + 1]), polys[i + 2]) == star(polys[i], star(polys[i + 1], polys[i + 2])));
    }
  }

  TEST_CASE("canonical commutators") {
    CHECK(star(symbol_a(), symbol_adag()) - star(symbol_adag(), symbol_a()) == PhasePoly(1));
    CHECK(star(x(), p()) - star(p(), x()) == PhasePoly(Coeff::i()));
    CHECK(star(symbol_adag(), symbol_a()) == symbol_number());
  }

  TEST_CASE("left and right star operators") {
    const auto polys = samples();
    for (const auto& f : polys) {
      for (const auto& g : polys) {
        CHECK(star_with_symbol(f, Side::left).apply(g) == star(f, g));
        CHECK(star_with_symbol(f, Side::right).apply(g) == star(g, f));
      }
    }
  }

  TEST_CASE("harmonic Moyal bracket is the rotation generator") {
    const auto gen = moyal_bracket(symbol_h0());
    const auto expected = PhasePoly(-1) * p() * PhaseDiffOp::derivative(1, 0) + x() * PhaseDiffOp::derivative(0, 1);
    CHECK(gen == expected);
    CHECK(moyal_bracket(symbol_h0(), x() * p()) == gen.apply(x() * p()));
  }

  TEST_CASE("derived generator equals the transcribed operator exactly") {
    const auto derived = derive_qsl_operator();
    CHECK(derived == oracle::transcribed_generator());
    CHECK(&qsl_operator() == &qsl_operator());
    CHECK(qsl_operator() == derived);
    CHECK(derived.max_order() == 3);
  }

  TEST_CASE("generator preserves normalization and is real") {
    PhasePoly adjoint_on_one;
    for (const auto& [key, poly] : qsl_operator().terms()) {
      CHECK(poly.conj() == poly);
      const PhasePoly d = poly.derivative(Var::x, key.first).derivative(Var::p, key.second);
      adjoint_on_one += ((key.first + key.second) % 2 == 0) ? d : -d;
    }
    CHECK(adjoint_on_one.is_zero());
  }

  TEST_CASE("renderers") {
    const auto& op = qsl_operator();
    CHECK(op.str().find("dx^3") != std::string::npos);
    CHECK(op.latex().find("\\partial_p^{3}") != std::string::npos);
    const auto j = nlohmann::json::parse(op.json());
    CHECK(j["terms"].size() == op.terms().size());
  }
}

#pragma once

// Exact phase-space calculus for polynomial Weyl symbols.
//
// Coefficients live in Q[i, sqrt2]. Polynomials are in x, p and the rate
// indeterminates k1, g1, g2. Differential operators are kept normal-ordered:
// coefficient polynomials on the left, derivatives acting on everything to
// their right.

#include <array>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qsl/dynamics.hpp"

namespace qsl::moyal {

using Rational = boost::multiprecision::cpp_rational;

struct Gaussian {
  Rational re;
  Rational im;

  bool is_zero() const { return re == 0 && im == 0; }
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// a + b sqrt2 with Gaussian-rational a, b.
class Coeff {
 public:
  Coeff() = default;
  Coeff(long long n) : a_{Rational(n), Rational(0)} {}  // NOLINT
  Coeff(Rational re) : a_{std::move(re), Rational(0)} {}  // NOLINT
  Coeff(Gaussian a, Gaussian b) : a_(std::move(a)), b_(std::move(b)) {}

  static Coeff ratio(long long num, long long den) { return Coeff(Rational(num, den)); }
  static Coeff i() { return Coeff({0, 1}, {0, 0}); }
  static Coeff sqrt2() { return Coeff({0, 0}, {1, 0}); }

  const Gaussian& rational_part() const { return a_; }
  const Gaussian& sqrt2_part() const { return b_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  Coeff conj() const;
  std::complex<double> to_complex() const;
  std::string str() const;
  std::string latex() const;

  Coeff& operator+=(const Coeff& o);
  Coeff& operator-=(const Coeff& o);
  Coeff& operator*=(const Coeff& o);
  friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
  friend Coeff operator-(Coeff a, const Coeff& b) { return a -= b; }
  friend Coeff operator*(Coeff a, const Coeff& b) { return a *= b; }
  friend Coeff operator-(const Coeff& a) { return Coeff(0) - a; }
  friend bool operator==(const Coeff&, const Coeff&) = default;

 private:
  Gaussian a_{Rational(0), Rational(0)};
  Gaussian b_{Rational(0), Rational(0)};
};

enum class Var { x = 0, p = 1, kappa1 = 2, gamma1 = 3, gamma2 = 4 };
inline constexpr int kVars = 5;

using Monomial = std::array<int, kVars>;

class PhasePoly {
 public:
  PhasePoly() = default;
  PhasePoly(Coeff c);  // NOLINT: constant
  static PhasePoly var(Var v, int power = 1);
  static PhasePoly term(Coeff c, Monomial m);

  const std::map<Monomial, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree_xp() const;

  PhasePoly derivative(Var v, int order = 1) const;
  PhasePoly conj() const;

  /// Value at phase point (x, p) with the rates substituted.
  std::complex<double> evaluate(double x, double p, const SLParams& rates) const;
  /// Substitutes the rates; result has numeric coefficients keyed by (x, p) powers.
  std::map<std::pair<int, int>, std::complex<double>> substitute(const SLParams& rates) const;

  std::string str() const;
  std::string latex() const;

  PhasePoly& operator+=(const PhasePoly& o);
  PhasePoly& operator-=(const PhasePoly& o);
  PhasePoly& operator*=(const PhasePoly& o);
  friend PhasePoly operator+(PhasePoly a, const PhasePoly& b) { return a += b; }
  friend PhasePoly operator-(PhasePoly a, const PhasePoly& b) { return a -= b; }
  friend PhasePoly operator*(const PhasePoly& a, const PhasePoly& b);
  friend PhasePoly operator-(const PhasePoly& a) { return PhasePoly() - a; }
  friend bool operator==(const PhasePoly&, const PhasePoly&) = default;

 private:
  void add_term(const Monomial& m, const Coeff& c);
  std::map<Monomial, Coeff> terms_;
};

/// Sum of c(x, p) * d^a/dx^a d^b/dp^b, keyed by (a, b).
class PhaseDiffOp {
 public:
  using Key = std::pair<int, int>;

  PhaseDiffOp() = default;
  PhaseDiffOp(PhasePoly multiplier);  // NOLINT: multiplication operator
  static PhaseDiffOp derivative(int dx, int dp);

  const std::map<Key, PhasePoly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_order() const;

  PhasePoly apply(const PhasePoly& f) const;
  /// Operator product (this ∘ other).
  PhaseDiffOp compose(const PhaseDiffOp& other) const;

  std::string str() const;
  std::string latex() const;
  std::string json() const;

  PhaseDiffOp& operator+=(const PhaseDiffOp& o);
  PhaseDiffOp& operator-=(const PhaseDiffOp& o);
  friend PhaseDiffOp operator+(PhaseDiffOp a, const PhaseDiffOp& b) { return a += b; }
  friend PhaseDiffOp operator-(PhaseDiffOp a, const PhaseDiffOp& b) { return a -= b; }
  friend PhaseDiffOp operator*(const PhasePoly& c, const PhaseDiffOp& op);
  friend bool operator==(const PhaseDiffOp&, const PhaseDiffOp&) = default;

 private:
  void add_term(const Key& k, const PhasePoly& c);
  std::map<Key, PhasePoly> terms_;
};

// Weyl symbols.
PhasePoly symbol_x();
PhasePoly symbol_p();
PhasePoly symbol_a();       // (x + i p) / sqrt2
PhasePoly symbol_adag();    // (x - i p) / sqrt2
PhasePoly symbol_h0();      // (x^2 + p^2) / 2
PhasePoly symbol_number();  // (x^2 + p^2 - 1) / 2

enum class Side { left, right };

/// Operator equal to (f ⋆ ·) for Side::left or (· ⋆ f) for Side::right.
PhaseDiffOp star_with_symbol(const PhasePoly& f, Side side);

PhasePoly star(const PhasePoly& f, const PhasePoly& g);

/// Star product from the exponential bidifferential series; independent of
/// the Bopp-shift route and exact for polynomials.
PhasePoly star_series(const PhasePoly& f, const PhasePoly& g);

/// -i (f ⋆ g - g ⋆ f)
PhasePoly moyal_bracket(const PhasePoly& f, const PhasePoly& g);
/// W ↦ -i (f ⋆ W - W ⋆ f)
PhaseDiffOp moyal_bracket(const PhasePoly& f);

/// W ↦ O ⋆ W ⋆ O* - (O* ⋆ O ⋆ W)/2 - (W ⋆ O* ⋆ O)/2
PhaseDiffOp star_dissipator(const PhasePoly& o);

/// Generator of the Wigner function with symbolic k1, g1, g2.
PhaseDiffOp derive_qsl_operator();

/// Cached copy of derive_qsl_operator().
const PhaseDiffOp& qsl_operator();

}  // namespace qsl::moyal

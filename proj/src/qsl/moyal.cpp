#include "qsl/moyal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace qsl::moyal {

namespace {

Gaussian add(const Gaussian& a, const Gaussian& b) { return {a.re + b.re, a.im + b.im}; }
Gaussian sub(const Gaussian& a, const Gaussian& b) { return {a.re - b.re, a.im - b.im}; }
Gaussian mul(const Gaussian& a, const Gaussian& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Gaussian scale(const Gaussian& a, long long k) { return {a.re * k, a.im * k}; }

std::string gaussian_str(const Gaussian& g) {
  if (g.im == 0) return g.re.str();
  const std::string im = g.im == 1 ? "i" : g.im == -1 ? "-i" : g.im.str() + "i";
  if (g.re == 0) return im;
  return "(" + g.re.str() + (g.im > 0 ? "+" : "") + im + ")";
}

std::string rational_latex(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  if (num < 0) return "-\\frac{" + boost::multiprecision::cpp_int(-num).str() + "}{" + den.str() + "}";
  return "\\frac{" + num.str() + "}{" + den.str() + "}";
}

std::string gaussian_latex(const Gaussian& g) {
  if (g.im == 0) return rational_latex(g.re);
  const std::string im = g.im == 1 ? "i" : g.im == -1 ? "-i" : rational_latex(g.im) + "i";
  if (g.re == 0) return im;
  return "\\left(" + rational_latex(g.re) + (g.im > 0 ? "+" : "") + im + "\\right)";
}

long long binomial(int n, int k) {
  long long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

constexpr std::array<const char*, kVars> kVarNames{"x", "p", "k1", "g1", "g2"};
constexpr std::array<const char*, kVars> kVarLatex{"x", "p", "\\kappa_1", "\\gamma_1",
                                                   "\\gamma_2"};

}  // namespace

Coeff& Coeff::operator+=(const Coeff& o) {
  a_ = add(a_, o.a_);
  b_ = add(b_, o.b_);
  return *this;
}

Coeff& Coeff::operator-=(const Coeff& o) {
  a_ = sub(a_, o.a_);
  b_ = sub(b_, o.b_);
  return *this;
}

Coeff& Coeff::operator*=(const Coeff& o) {
  const Gaussian a = add(mul(a_, o.a_), scale(mul(b_, o.b_), 2));
  const Gaussian b = add(mul(a_, o.b_), mul(b_, o.a_));
  a_ = a;
  b_ = b;
  return *this;
}

Coeff Coeff::conj() const { return Coeff({a_.re, -a_.im}, {b_.re, -b_.im}); }

std::complex<double> Coeff::to_complex() const {
  const double s = std::numbers::sqrt2;
  return {a_.re.convert_to<double>() + s * b_.re.convert_to<double>(),
          a_.im.convert_to<double>() + s * b_.im.convert_to<double>()};
}

std::string Coeff::str() const {
  if (b_.is_zero()) return gaussian_str(a_);
  const std::string root = gaussian_str(b_) + "*sqrt2";
  if (a_.is_zero()) return root;
  return "(" + gaussian_str(a_) + " + " + root + ")";
}

std::string Coeff::latex() const {
  if (b_.is_zero()) return gaussian_latex(a_);
  const std::string root = gaussian_latex(b_) + "\\sqrt{2}";
  if (a_.is_zero()) return root;
  return "\\left(" + gaussian_latex(a_) + "+" + root + "\\right)";
}

PhasePoly::PhasePoly(Coeff c) { add_term(Monomial{}, c); }

PhasePoly PhasePoly::var(Var v, int power) {
  Monomial m{};
  m[static_cast<std::size_t>(v)] = power;
  return term(Coeff(1), m);
}

PhasePoly PhasePoly::term(Coeff c, Monomial m) {
  PhasePoly r;
  r.add_term(m, c);
  return r;
}

void PhasePoly::add_term(const Monomial& m, const Coeff& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool PhasePoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{});
}

int PhasePoly::degree_xp() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[0] + m[1]);
  return d;
}

PhasePoly PhasePoly::derivative(Var v, int order) const {
  const auto k = static_cast<std::size_t>(v);
  PhasePoly r;
  for (const auto& [m, c] : terms_) {
    if (m[k] < order) continue;
    long long factor = 1;
    for (int j = 0; j < order; ++j) factor *= m[k] - j;
    Monomial dm = m;
    dm[k] -= order;
    r.add_term(dm, c * Coeff(factor));
  }
  return r;
}

PhasePoly PhasePoly::conj() const {
  PhasePoly r;
  for (const auto& [m, c] : terms_) r.add_term(m, c.conj());
  return r;
}

std::complex<double> PhasePoly::evaluate(double x, double p, const SLParams& rates) const {
  const std::array<double, kVars> v{x, p, rates.kappa1, rates.gamma1, rates.gamma2};
  std::complex<double> sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double f = 1.0;
    for (std::size_t k = 0; k < kVars; ++k) f *= std::pow(v[k], m[k]);
    sum += c.to_complex() * f;
  }
  return sum;
}

std::map<std::pair<int, int>, std::complex<double>> PhasePoly::substitute(
    const SLParams& rates) const {
  std::map<std::pair<int, int>, std::complex<double>> out;
  for (const auto& [m, c] : terms_) {
    const double f = std::pow(rates.kappa1, m[2]) * std::pow(rates.gamma1, m[3]) *
                     std::pow(rates.gamma2, m[4]);
    out[{m[0], m[1]}] += c.to_complex() * f;
  }
  return out;
}

std::string PhasePoly::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.str();
    for (std::size_t k = 0; k < kVars; ++k) {
      if (m[k] == 0) continue;
      s += std::string("*") + kVarNames[k];
      if (m[k] > 1) s += "^" + std::to_string(m[k]);
    }
  }
  return s;
}

std::string PhasePoly::latex() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.latex();
    for (std::size_t k = 0; k < kVars; ++k) {
      if (m[k] == 0) continue;
      s += std::string(" ") + kVarLatex[k];
      if (m[k] > 1) s += "^{" + std::to_string(m[k]) + "}";
    }
  }
  return s;
}

PhasePoly& PhasePoly::operator+=(const PhasePoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

PhasePoly& PhasePoly::operator-=(const PhasePoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

PhasePoly operator*(const PhasePoly& a, const PhasePoly& b) {
  PhasePoly r;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      for (std::size_t k = 0; k < kVars; ++k) m[k] = ma[k] + mb[k];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

PhasePoly& PhasePoly::operator*=(const PhasePoly& o) { return *this = *this * o; }

PhaseDiffOp::PhaseDiffOp(PhasePoly multiplier) { add_term({0, 0}, multiplier); }

PhaseDiffOp PhaseDiffOp::derivative(int dx, int dp) {
  PhaseDiffOp op;
  op.add_term({dx, dp}, PhasePoly(Coeff(1)));
  return op;
}

void PhaseDiffOp::add_term(const Key& k, const PhasePoly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int PhaseDiffOp::max_order() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
  return d;
}

PhasePoly PhaseDiffOp::apply(const PhasePoly& f) const {
  PhasePoly r;
  for (const auto& [k, c] : terms_) r += c * f.derivative(Var::x, k.first).derivative(Var::p, k.second);
  return r;
}

PhaseDiffOp PhaseDiffOp::compose(const PhaseDiffOp& other) const {
  PhaseDiffOp r;
  for (const auto& [a, c1] : terms_) {
    for (const auto& [b, c2] : other.terms_) {
      for (int gx = 0; gx <= a.first; ++gx) {
        for (int gp = 0; gp <= a.second; ++gp) {
          const PhasePoly dc = c2.derivative(Var::x, gx).derivative(Var::p, gp);
          if (dc.is_zero()) continue;
          const long long w = binomial(a.first, gx) * binomial(a.second, gp);
          r.add_term({a.first - gx + b.first, a.second - gp + b.second},
                     PhasePoly(Coeff(w)) * c1 * dc);
        }
      }
    }
  }
  return r;
}

PhaseDiffOp& PhaseDiffOp::operator+=(const PhaseDiffOp& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

PhaseDiffOp& PhaseDiffOp::operator-=(const PhaseDiffOp& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

PhaseDiffOp operator*(const PhasePoly& c, const PhaseDiffOp& op) {
  PhaseDiffOp r;
  for (const auto& [k, t] : op.terms_) r.add_term(k, c * t);
  return r;
}

std::string PhaseDiffOp::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : terms_) {
    if (!s.empty()) s += "\n+ ";
    s += "[" + c.str() + "]";
    if (k.first > 0) s += "*dx" + (k.first > 1 ? "^" + std::to_string(k.first) : "");
    if (k.second > 0) s += "*dp" + (k.second > 1 ? "^" + std::to_string(k.second) : "");
  }
  return s;
}

std::string PhaseDiffOp::latex() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += "\\left(" + c.latex() + "\\right)";
    if (k.first > 0) {
      s += "\\partial_x";
      if (k.first > 1) s += "^{" + std::to_string(k.first) + "}";
    }
    if (k.second > 0) {
      s += "\\partial_p";
      if (k.second > 1) s += "^{" + std::to_string(k.second) + "}";
    }
  }
  return s;
}

std::string PhaseDiffOp::json() const {
  using nlohmann::json;
  json terms = json::array();
  for (const auto& [k, c] : terms_) {
    json poly = json::array();
    for (const auto& [m, coef] : c.terms()) {
      const Gaussian& a = coef.rational_part();
      const Gaussian& b = coef.sqrt2_part();
      poly.push_back({{"coeff",
                       {{"re", a.re.str()},
                        {"im", a.im.str()},
                        {"re_sqrt2", b.re.str()},
                        {"im_sqrt2", b.im.str()}}},
                      {"x", m[0]},
                      {"p", m[1]},
                      {"kappa1", m[2]},
                      {"gamma1", m[3]},
                      {"gamma2", m[4]}});
    }
    terms.push_back({{"dx_order", k.first}, {"dp_order", k.second}, {"poly", poly}});
  }
  return json{{"terms", terms}}.dump(2);
}

PhasePoly symbol_x() { return PhasePoly::var(Var::x); }
PhasePoly symbol_p() { return PhasePoly::var(Var::p); }

PhasePoly symbol_a() {
  return PhasePoly(Coeff::sqrt2() * Coeff::ratio(1, 2)) *
         (symbol_x() + PhasePoly(Coeff::i()) * symbol_p());
}

PhasePoly symbol_adag() { return symbol_a().conj(); }

PhasePoly symbol_h0() {
  return PhasePoly(Coeff::ratio(1, 2)) * (PhasePoly::var(Var::x, 2) + PhasePoly::var(Var::p, 2));
}

PhasePoly symbol_number() { return symbol_h0() - PhasePoly(Coeff::ratio(1, 2)); }

PhaseDiffOp star_with_symbol(const PhasePoly& f, Side side) {
  // Bopp shift: f ⋆ W = f(x + i/2 dp, p - i/2 dx) W, W ⋆ f with the opposite signs.
  const Coeff half_i = Coeff::i() * Coeff::ratio(side == Side::left ? 1 : -1, 2);
  const PhaseDiffOp X = PhaseDiffOp(symbol_x()) + PhasePoly(half_i) * PhaseDiffOp::derivative(0, 1);
  const PhaseDiffOp P = PhaseDiffOp(symbol_p()) - PhasePoly(half_i) * PhaseDiffOp::derivative(1, 0);

  std::vector<PhaseDiffOp> xp{PhaseDiffOp(PhasePoly(Coeff(1)))};
  std::vector<PhaseDiffOp> pp{PhaseDiffOp(PhasePoly(Coeff(1)))};
  auto power = [](std::vector<PhaseDiffOp>& cache, const PhaseDiffOp& base, int n) {
    while (static_cast<int>(cache.size()) <= n) cache.push_back(cache.back().compose(base));
    return cache[static_cast<std::size_t>(n)];
  };

  PhaseDiffOp out;
  for (const auto& [m, c] : f.terms()) {
    const int a = m[0], b = m[1];
    // Symmetric ordering of X^a P^b: 2^-a sum_k C(a,k) X^(a-k) P^b X^k.
    PhaseDiffOp ordered;
    const PhaseDiffOp Pb = power(pp, P, b);
    for (int k = 0; k <= a; ++k) {
      ordered += PhasePoly(Coeff(binomial(a, k))) *
                 power(xp, X, a - k).compose(Pb).compose(power(xp, X, k));
    }
    Monomial rates = m;
    rates[0] = rates[1] = 0;
    out += PhasePoly::term(c * Coeff(Rational(1, 1LL << a)), rates) * ordered;
  }
  return out;
}

PhasePoly star(const PhasePoly& f, const PhasePoly& g) {
  return star_with_symbol(f, Side::left).apply(g);
}

PhasePoly star_series(const PhasePoly& f, const PhasePoly& g) {
  // f exp((i/2)(<-dx ->dp - <-dp ->dx)) g
  const int order = std::max(f.degree_xp(), g.degree_xp());
  PhasePoly sum;
  Coeff weight(1);  // (i/2)^k / k!
  for (int k = 0; k <= order; ++k) {
    for (int j = 0; j <= k; ++j) {
      const PhasePoly df = f.derivative(Var::x, j).derivative(Var::p, k - j);
      const PhasePoly dg = g.derivative(Var::p, j).derivative(Var::x, k - j);
      const long long sign = (k - j) % 2 == 0 ? 1 : -1;
      sum += PhasePoly(weight * Coeff(sign * binomial(k, j))) * df * dg;
    }
    weight *= Coeff::i() * Coeff(Rational(1, 2 * (k + 1)));
  }
  return sum;
}

PhasePoly moyal_bracket(const PhasePoly& f, const PhasePoly& g) {
  return PhasePoly(-Coeff::i()) * (star(f, g) - star(g, f));
}

PhaseDiffOp moyal_bracket(const PhasePoly& f) {
  return PhasePoly(-Coeff::i()) *
         (star_with_symbol(f, Side::left) - star_with_symbol(f, Side::right));
}

PhaseDiffOp star_dissipator(const PhasePoly& o) {
  const PhasePoly oc = o.conj();
  const PhasePoly ocdo = star(oc, o);
  const PhasePoly half(Coeff::ratio(1, 2));
  return star_with_symbol(o, Side::left).compose(star_with_symbol(oc, Side::right)) -
         half * star_with_symbol(ocdo, Side::left) - half * star_with_symbol(ocdo, Side::right);
}

PhaseDiffOp derive_qsl_operator() {
  const PhasePoly a = symbol_a();
  return moyal_bracket(symbol_h0()) +
         PhasePoly::var(Var::kappa1) * star_dissipator(symbol_adag()) +
         PhasePoly::var(Var::gamma1) * star_dissipator(a) +
         PhasePoly::var(Var::gamma2) * star_dissipator(star(a, a));
}

const PhaseDiffOp& qsl_operator() {
  static const PhaseDiffOp op = derive_qsl_operator();
  return op;
}

}  // namespace qsl::moyal

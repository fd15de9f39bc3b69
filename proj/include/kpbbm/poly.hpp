#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kpbbm/expr.hpp"
#include "kpbbm/rational.hpp"

namespace kpbbm {

using VarId = std::uint32_t;

// Process-wide interning of variable names.
VarId intern(const std::string& name);
const std::string& var_name(VarId id);

// Sparse monomial with nonzero (possibly negative) integer exponents, sorted by variable.
struct Monomial {
  std::vector<std::pair<VarId, int>> factors;

  int degree(VarId v) const;
  int total_degree() const;
  bool is_one() const { return factors.empty(); }
  Monomial operator*(const Monomial& o) const;
  Monomial inverse() const;
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.factors < b.factors; }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors == b.factors; }
};

Monomial make_monomial(std::vector<std::pair<VarId, int>> factors);

// Laurent polynomial over the rationals.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  Poly(const Rational& c);
  Poly(int c) : Poly(Rational(c)) {}
  static Poly var(VarId v, int exponent = 1);
  static Poly var(const std::string& name, int exponent = 1) { return var(intern(name), exponent); }
  static Poly term(const Rational& c, const Monomial& m);

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  Rational coefficient(const Monomial& m) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

  Poly pow(unsigned n) const;
  Poly mul_monomial(const Monomial& m) const;
  Poly derivative(VarId v) const;
  int max_degree(VarId v) const;
  int min_degree(VarId v) const;
  std::set<VarId> variables() const;
  bool contains(VarId v) const;
  // Replaces v by p; v must occur with nonnegative exponents only.
  Poly substitute(VarId v, const Poly& p) const;
  Poly substitute(const std::map<VarId, Poly>& s) const;
  // Monomial gcd of all terms (componentwise minimum exponent).
  Monomial monomial_content() const;
  Poly divide_by_monomial(const Monomial& m) const { return mul_monomial(m.inverse()); }

  Rational eval(const std::map<VarId, Rational>& point) const;
  double eval(const std::map<VarId, double>& point) const;
  // Partial evaluation: variables in point are replaced, others kept.
  Poly partial_eval(const std::map<VarId, Rational>& point) const;

  Expr to_expr() const;
  std::string str() const { return kpbbm::to_string(to_expr()); }

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

// Converts a polynomial expression (symbols, rationals, integer powers) to a Poly.
Poly poly_from_expr(const Expr& e);

// Groups terms by the part of each monomial made of variables selected by is_key.
std::map<Monomial, Poly> collect(const Poly& p, const std::function<bool(VarId)>& is_key);

// Uniform random rational with small height, used for exact witnesses.
Rational random_rational(std::mt19937_64& rng, long max_num = 9, long max_den = 7);

}  // namespace kpbbm

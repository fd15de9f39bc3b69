#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kpbbm/rational.hpp"

namespace kpbbm {

enum class Kind : std::uint8_t { Rational, Symbol, Pow, Product, Sum, Exp, Tanh, Sech, Cosh, Sqrt };

struct UnboundSymbol : std::runtime_error {
  explicit UnboundSymbol(const std::string& name) : std::runtime_error("unbound symbol: " + name), symbol(name) {}
  std::string symbol;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node;

// Immutable expression in canonical expanded form. Every constructor below
// returns a canonical tree, so structural equality is semantic equality for
// everything the canonicalizer can decide.
class Expr {
 public:
  Expr();
  Expr(int v);
  Expr(long v);
  Expr(const Rational& v);

  static Expr symbol(std::string name);

  Kind kind() const;
  bool is_rational() const { return kind() == Kind::Rational; }
  bool is_zero() const;
  bool is_one() const;

  const Rational& value() const;        // Rational
  const std::string& name() const;      // Symbol
  std::span<const Expr> operands() const;  // Sum, Product
  const Expr& base() const;             // Pow
  long exponent() const;                // Pow
  const Expr& arg() const;              // Exp, Tanh, Sech, Cosh, Sqrt
  std::size_t hash() const;
  const Node* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend struct Build;
};

// Total order used for canonical sorting; consistent with operator==.
int compare(const Expr& a, const Expr& b);
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow(const Expr& base, long n);
Expr exp(const Expr& a);
Expr tanh(const Expr& a);
Expr sech(const Expr& a);
Expr cosh(const Expr& a);
Expr sinh(const Expr& a);
Expr sqrt(const Expr& a);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

inline Expr sym(std::string name) { return Expr::symbol(std::move(name)); }
inline Expr rat(long p, long q = 1) { Rational r(p, q); r.canonicalize(); return Expr(r); }

using Bindings = std::map<std::string, Expr>;
using NumericBindings = std::map<std::string, double>;

Expr differentiate(const Expr& e, std::string_view var);
Expr differentiate(const Expr& e, std::string_view var, int times);
Expr substitute(const Expr& e, const Bindings& b);
double eval_numeric(const Expr& e, const NumericBindings& b);
std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, std::string_view var);
// Rebuilds through the canonical constructors; idempotent.
Expr simplify(const Expr& e);
std::size_t node_count(const Expr& e);

// Splits a canonical term into rational coefficient and the remaining factor.
std::pair<Rational, Expr> split_coefficient(const Expr& term);
// Coefficient of var^1 in an expression that is affine in var (after expansion).
Expr linear_coefficient(const Expr& e, std::string_view var);

std::string to_string(const Expr& e);
Expr parse_expr(std::string_view text);

std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace kpbbm

#include "kpbbm/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace kpbbm {

struct Node {
  Kind kind{Kind::Rational};
  std::size_t hash{0};
  Rational value;
  std::string name;
  std::vector<Expr> ops;
  long exp{0};
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t rational_hash(const Rational& q) {
  std::size_t h = mpz_get_ui(q.get_num_mpz_t());
  h = mix(h, static_cast<std::size_t>(mpz_sgn(q.get_num_mpz_t()) + 1));
  return mix(h, mpz_get_ui(q.get_den_mpz_t()));
}

}  // namespace

struct Build {
  static Expr make(Node&& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911u;
    switch (n.kind) {
      case Kind::Rational: h = mix(h, rational_hash(n.value)); break;
      case Kind::Symbol: h = mix(h, std::hash<std::string>{}(n.name)); break;
      default:
        for (const auto& o : n.ops) h = mix(h, o.hash());
        h = mix(h, static_cast<std::size_t>(n.exp));
    }
    n.hash = h;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }
  static Expr rational(const Rational& q) {
    Node n;
    n.kind = Kind::Rational;
    n.value = q;
    return make(std::move(n));
  }
  static Expr symbol(std::string s) {
    Node n;
    n.kind = Kind::Symbol;
    n.name = std::move(s);
    return make(std::move(n));
  }
  static Expr nary(Kind k, std::vector<Expr> ops) {
    Node n;
    n.kind = k;
    n.ops = std::move(ops);
    return make(std::move(n));
  }
  static Expr unary(Kind k, const Expr& a) { return nary(k, {a}); }
  static Expr power(const Expr& b, long e) {
    Node n;
    n.kind = Kind::Pow;
    n.ops = {b};
    n.exp = e;
    return make(std::move(n));
  }
  static const Node& node(const Expr& e) { return *e.node_; }
};

namespace {

const Expr& zero_expr() {
  static const Expr z = Build::rational(Rational(0));
  return z;
}
const Expr& one_expr() {
  static const Expr o = Build::rational(Rational(1));
  return o;
}

}  // namespace

Expr::Expr() : Expr(zero_expr()) {}
Expr::Expr(int v) : Expr(Build::rational(Rational(v))) {}
Expr::Expr(long v) : Expr(Build::rational(Rational(v))) {}
Expr::Expr(const Rational& v) : Expr(Build::rational(v)) {}

Expr Expr::symbol(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  return Build::symbol(std::move(name));
}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return node_->kind == Kind::Rational && node_->value == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Rational && node_->value == 1; }
const Rational& Expr::value() const {
  if (node_->kind != Kind::Rational) throw std::logic_error("value() on non-rational");
  return node_->value;
}
const std::string& Expr::name() const {
  if (node_->kind != Kind::Symbol) throw std::logic_error("name() on non-symbol");
  return node_->name;
}
std::span<const Expr> Expr::operands() const { return node_->ops; }
const Expr& Expr::base() const {
  if (node_->kind != Kind::Pow) throw std::logic_error("base() on non-power");
  return node_->ops[0];
}
long Expr::exponent() const { return node_->exp; }
const Expr& Expr::arg() const {
  if (node_->ops.size() != 1 || node_->kind == Kind::Pow) throw std::logic_error("arg() on non-function");
  return node_->ops[0];
}
std::size_t Expr::hash() const { return node_->hash; }

int compare(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return 0;
  const Node& x = Build::node(a);
  const Node& y = Build::node(b);
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  switch (x.kind) {
    case Kind::Rational: {
      int c = cmp(x.value, y.value);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Symbol: {
      int c = x.name.compare(y.name);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Pow: {
      int c = compare(x.ops[0], y.ops[0]);
      if (c != 0) return c;
      if (x.exp != y.exp) return x.exp < y.exp ? -1 : 1;
      return 0;
    }
    default: {
      std::size_t n = std::min(x.ops.size(), y.ops.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(x.ops[i], y.ops[i]);
        if (c != 0) return c;
      }
      if (x.ops.size() != y.ops.size()) return x.ops.size() < y.ops.size() ? -1 : 1;
      return 0;
    }
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

std::pair<Rational, Expr> split_coefficient(const Expr& t) {
  if (t.kind() == Kind::Rational) return {t.value(), one_expr()};
  if (t.kind() == Kind::Product && t.operands()[0].kind() == Kind::Rational) {
    auto ops = t.operands();
    if (ops.size() == 2) return {ops[0].value(), ops[1]};
    return {ops[0].value(), Build::nary(Kind::Product, std::vector<Expr>(ops.begin() + 1, ops.end()))};
  }
  return {Rational(1), t};
}

namespace {

Expr scale_term(const Rational& c, const Expr& rest) {
  if (c == 0) return zero_expr();
  if (rest.is_one()) return Expr(c);
  if (c == 1) return rest;
  std::vector<Expr> ops;
  ops.emplace_back(c);
  if (rest.kind() == Kind::Product) {
    for (const auto& o : rest.operands()) ops.push_back(o);
  } else {
    ops.push_back(rest);
  }
  return Build::nary(Kind::Product, std::move(ops));
}

bool is_negative(const Expr& a) {
  switch (a.kind()) {
    case Kind::Rational: return a.value() < 0;
    case Kind::Product: return a.operands()[0].kind() == Kind::Rational && a.operands()[0].value() < 0;
    case Kind::Sum: return is_negative(a.operands()[0]);
    default: return false;
  }
}

// Scales every term of a canonical sum; the result stays canonical because
// ordering depends only on the non-coefficient part.
Expr scale_sum(const Expr& s, const Rational& c) {
  std::vector<Expr> ops;
  ops.reserve(s.operands().size());
  for (const auto& t : s.operands()) {
    auto [k, rest] = split_coefficient(t);
    ops.push_back(scale_term(k * c, rest));
  }
  return Build::nary(Kind::Sum, std::move(ops));
}

struct ProductBuilder {
  Rational coeff{1};
  std::map<Expr, long, ExprLess> powers;
  std::vector<Expr> exp_args;
  std::vector<Expr> sums;  // positive powers of sums, one entry per multiplicity

  void add_base(const Expr& b, long m) {
    if (b.kind() == Kind::Sum) {
      auto [c, rest] = split_coefficient(b.operands()[0]);
      if (c != 1) {
        coeff *= kpbbm::pow(c, m);
        powers[scale_sum(b, Rational(1) / c)] += m;
        return;
      }
    }
    powers[b] += m;
  }

  void process(const Expr& f, long m) {
    switch (f.kind()) {
      case Kind::Rational:
        if (f.value() == 0 && m < 0) throw DomainError("division by zero");
        coeff *= kpbbm::pow(f.value(), m);
        return;
      case Kind::Product:
        for (const auto& o : f.operands()) process(o, m);
        return;
      case Kind::Pow:
        add_base(f.base(), f.exponent() * m);
        return;
      case Kind::Exp:
        exp_args.push_back(m == 1 ? f.arg() : product({Expr(m), f.arg()}));
        return;
      case Kind::Cosh:
        powers[Build::unary(Kind::Sech, f.arg())] -= m;
        return;
      default:
        add_base(f, m);
    }
  }

  Expr finish() {
    // Reduce powers of square roots until every exponent is 0 or 1.
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = powers.begin(); it != powers.end(); ++it) {
        if (it->first.kind() != Kind::Sqrt) continue;
        long n = it->second;
        if (n == 0 || n == 1) continue;
        long q = n >= 0 ? n / 2 : -((-n + 1) / 2);
        long rem = n - 2 * q;
        Expr radicand = it->first.arg();
        it->second = rem;
        process(radicand, q);
        changed = true;
        break;
      }
    }
    if (coeff == 0) return zero_expr();
    std::vector<Expr> factors;
    for (const auto& [b, n] : powers) {
      if (n == 0) continue;
      if (b.kind() == Kind::Sum && n > 0) {
        for (long i = 0; i < n; ++i) sums.push_back(b);
        continue;
      }
      if (b.kind() == Kind::Sech && n < 0) {
        Expr c = Build::unary(Kind::Cosh, b.arg());
        factors.push_back(n == -1 ? c : Build::power(c, -n));
        continue;
      }
      factors.push_back(n == 1 ? b : Build::power(b, n));
    }
    if (!exp_args.empty()) {
      Expr a = sum(exp_args);
      if (!a.is_zero()) factors.push_back(Build::unary(Kind::Exp, a));
    }
    std::sort(factors.begin(), factors.end(), ExprLess{});
    Expr mono;
    if (factors.empty()) {
      mono = Expr(coeff);
    } else if (factors.size() == 1 && coeff == 1) {
      mono = factors[0];
    } else {
      std::vector<Expr> ops;
      if (coeff != 1) ops.emplace_back(coeff);
      for (auto& f : factors) ops.push_back(std::move(f));
      mono = Build::nary(Kind::Product, std::move(ops));
    }
    if (sums.empty()) return mono;
    std::vector<Expr> terms{mono};
    for (const auto& s : sums) {
      std::vector<Expr> next;
      next.reserve(terms.size() * s.operands().size());
      for (const auto& t : terms)
        for (const auto& si : s.operands()) next.push_back(product({t, si}));
      Expr combined = sum(std::move(next));
      if (combined.kind() == Kind::Sum) {
        terms.assign(combined.operands().begin(), combined.operands().end());
      } else {
        terms = {combined};
      }
    }
    return sum(std::move(terms));
  }
};

}  // namespace

Expr sum(std::vector<Expr> terms) {
  Rational constant(0);
  std::map<Expr, Rational, ExprLess> acc;
  std::function<void(const Expr&)> add = [&](const Expr& t) {
    if (t.kind() == Kind::Sum) {
      for (const auto& o : t.operands()) add(o);
      return;
    }
    auto [c, rest] = split_coefficient(t);
    if (rest.is_one()) {
      constant += c;
    } else {
      auto [it, inserted] = acc.try_emplace(rest, c);
      if (!inserted) it->second += c;
    }
  };
  for (const auto& t : terms) add(t);
  std::vector<Expr> ops;
  if (constant != 0) ops.emplace_back(constant);
  for (const auto& [rest, c] : acc)
    if (c != 0) ops.push_back(scale_term(c, rest));
  if (ops.empty()) return zero_expr();
  if (ops.size() == 1) return ops[0];
  return Build::nary(Kind::Sum, std::move(ops));
}

Expr product(std::vector<Expr> factors) {
  ProductBuilder pb;
  for (const auto& f : factors) pb.process(f, 1);
  return pb.finish();
}

Expr pow(const Expr& base, long n) {
  if (n == 0) return one_expr();
  if (n == 1) return base;
  ProductBuilder pb;
  pb.process(base, n);
  return pb.finish();
}

Expr exp(const Expr& a) {
  if (a.is_zero()) return one_expr();
  return Build::unary(Kind::Exp, a);
}

Expr tanh(const Expr& a) {
  if (a.is_zero()) return zero_expr();
  if (is_negative(a)) return product({Expr(-1), Build::unary(Kind::Tanh, -a)});
  return Build::unary(Kind::Tanh, a);
}

Expr sech(const Expr& a) {
  if (a.is_zero()) return one_expr();
  if (is_negative(a)) return Build::unary(Kind::Sech, -a);
  return Build::unary(Kind::Sech, a);
}

Expr cosh(const Expr& a) {
  if (a.is_zero()) return one_expr();
  if (is_negative(a)) return Build::unary(Kind::Cosh, -a);
  return Build::unary(Kind::Cosh, a);
}

Expr sinh(const Expr& a) { return tanh(a) * cosh(a); }

Expr sqrt(const Expr& a) {
  if (a.kind() == Kind::Rational) {
    const Rational& q = a.value();
    if (q == 0) return zero_expr();
    if (q < 0) return Build::unary(Kind::Sqrt, a);
    // sqrt(n/d) = sqrt(n d) / d, then pull square factors out of n d.
    mpz_class m = q.get_num() * q.get_den();
    mpz_class outside = 1;
    for (unsigned long p = 2; p <= 2000; ++p) {
      mpz_class p2 = p * p;
      if (p2 > m) break;
      while (mpz_divisible_p(m.get_mpz_t(), p2.get_mpz_t())) {
        m /= p2;
        outside *= p;
      }
    }
    if (mpz_perfect_square_p(m.get_mpz_t())) {
      mpz_class r;
      mpz_sqrt(r.get_mpz_t(), m.get_mpz_t());
      outside *= r;
      m = 1;
    }
    Rational c(outside, q.get_den());
    c.canonicalize();
    if (m == 1) return Expr(c);
    return product({Expr(c), Build::unary(Kind::Sqrt, Expr(Rational(m)))});
  }
  return Build::unary(Kind::Sqrt, a);
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, product({Expr(-1), b})}); }
Expr operator-(const Expr& a) { return product({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  return product({a, pow(b, -1)});
}
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

namespace {

Expr diff_impl(const Expr& e, std::string_view v, std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr r;
  switch (e.kind()) {
    case Kind::Rational: r = zero_expr(); break;
    case Kind::Symbol: r = e.name() == v ? one_expr() : zero_expr(); break;
    case Kind::Sum: {
      std::vector<Expr> ts;
      for (const auto& o : e.operands()) ts.push_back(diff_impl(o, v, memo));
      r = sum(std::move(ts));
      break;
    }
    case Kind::Product: {
      auto ops = e.operands();
      std::vector<Expr> ts;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        Expr d = diff_impl(ops[i], v, memo);
        if (d.is_zero()) continue;
        std::vector<Expr> fs(ops.begin(), ops.end());
        fs[i] = d;
        ts.push_back(product(std::move(fs)));
      }
      r = sum(std::move(ts));
      break;
    }
    case Kind::Pow: {
      Expr d = diff_impl(e.base(), v, memo);
      r = d.is_zero() ? zero_expr() : product({Expr(e.exponent()), pow(e.base(), e.exponent() - 1), d});
      break;
    }
    case Kind::Exp: {
      Expr d = diff_impl(e.arg(), v, memo);
      r = d.is_zero() ? zero_expr() : e * d;
      break;
    }
    case Kind::Tanh: {
      Expr d = diff_impl(e.arg(), v, memo);
      r = d.is_zero() ? zero_expr() : (one_expr() - pow(e, 2)) * d;
      break;
    }
    case Kind::Sech: {
      Expr d = diff_impl(e.arg(), v, memo);
      r = d.is_zero() ? zero_expr() : product({Expr(-1), e, tanh(e.arg()), d});
      break;
    }
    case Kind::Cosh: {
      Expr d = diff_impl(e.arg(), v, memo);
      r = d.is_zero() ? zero_expr() : product({e, tanh(e.arg()), d});
      break;
    }
    case Kind::Sqrt: {
      Expr d = diff_impl(e.arg(), v, memo);
      r = d.is_zero() ? zero_expr() : product({rat(1, 2), d, pow(e, -1)});
      break;
    }
  }
  memo.emplace(e.id(), r);
  return r;
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) {
  std::unordered_map<const Node*, Expr> memo;
  return diff_impl(e, var, memo);
}

Expr differentiate(const Expr& e, std::string_view var, int times) {
  Expr r = e;
  for (int i = 0; i < times; ++i) r = differentiate(r, var);
  return r;
}

namespace {

Expr rebuild(const Expr& e, const std::vector<Expr>& ops) {
  switch (e.kind()) {
    case Kind::Sum: return sum(ops);
    case Kind::Product: return product(ops);
    case Kind::Pow: return pow(ops[0], e.exponent());
    case Kind::Exp: return exp(ops[0]);
    case Kind::Tanh: return tanh(ops[0]);
    case Kind::Sech: return sech(ops[0]);
    case Kind::Cosh: return cosh(ops[0]);
    case Kind::Sqrt: return sqrt(ops[0]);
    default: return e;
  }
}

Expr subst_impl(const Expr& e, const Bindings& b, std::unordered_map<const Node*, Expr>& memo) {
  if (e.kind() == Kind::Rational) return e;
  if (e.kind() == Kind::Symbol) {
    auto it = b.find(e.name());
    return it == b.end() ? e : it->second;
  }
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  std::vector<Expr> ops;
  bool changed = false;
  for (const auto& o : e.operands()) {
    ops.push_back(subst_impl(o, b, memo));
    if (ops.back().id() != o.id()) changed = true;
  }
  Expr r = changed ? rebuild(e, ops) : e;
  memo.emplace(e.id(), r);
  return r;
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& b) {
  std::unordered_map<const Node*, Expr> memo;
  return subst_impl(e, b, memo);
}

Expr simplify(const Expr& e) {
  if (e.kind() == Kind::Rational || e.kind() == Kind::Symbol) return e;
  std::vector<Expr> ops;
  for (const auto& o : e.operands()) ops.push_back(simplify(o));
  return rebuild(e, ops);
}

double eval_numeric(const Expr& e, const NumericBindings& b) {
  switch (e.kind()) {
    case Kind::Rational: return e.value().get_d();
    case Kind::Symbol: {
      auto it = b.find(e.name());
      if (it == b.end()) throw UnboundSymbol(e.name());
      return it->second;
    }
    case Kind::Sum: {
      double s = 0;
      for (const auto& o : e.operands()) s += eval_numeric(o, b);
      return s;
    }
    case Kind::Product: {
      double s = 1;
      for (const auto& o : e.operands()) s *= eval_numeric(o, b);
      return s;
    }
    case Kind::Pow: {
      double x = eval_numeric(e.base(), b);
      if (x == 0.0 && e.exponent() < 0) throw DomainError("pole: zero base with negative exponent");
      return std::pow(x, static_cast<double>(e.exponent()));
    }
    case Kind::Exp: return std::exp(eval_numeric(e.arg(), b));
    case Kind::Tanh: return std::tanh(eval_numeric(e.arg(), b));
    case Kind::Sech: return 1.0 / std::cosh(eval_numeric(e.arg(), b));
    case Kind::Cosh: return std::cosh(eval_numeric(e.arg(), b));
    case Kind::Sqrt: {
      double x = eval_numeric(e.arg(), b);
      if (x < 0) throw DomainError("square root of a negative number");
      return std::sqrt(x);
    }
  }
  return 0;
}

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out, std::unordered_set<const Node*>& seen) {
  if (e.kind() == Kind::Symbol) {
    out.insert(e.name());
    return;
  }
  if (e.kind() == Kind::Rational || !seen.insert(e.id()).second) return;
  for (const auto& o : e.operands()) collect_symbols(o, out, seen);
}

}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  std::unordered_set<const Node*> seen;
  collect_symbols(e, out, seen);
  return out;
}

bool depends_on(const Expr& e, std::string_view var) {
  return free_symbols(e).count(std::string(var)) > 0;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& o : e.operands()) n += node_count(o);
  return n;
}

Expr linear_coefficient(const Expr& e, std::string_view var) {
  Expr d = differentiate(e, var);
  if (depends_on(d, var)) throw std::invalid_argument("expression is not affine in " + std::string(var));
  return d;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace kpbbm

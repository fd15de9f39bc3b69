#include "kpbbm/zero_test.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kpbbm/compiled.hpp"

namespace kpbbm {

namespace {

// Splits p = c * m * q with q primitive: no monomial content, first coefficient 1.
void normalize_factor(const Poly& p, Rational& c, Monomial& m, Poly& q) {
  m = p.monomial_content();
  q = p.divide_by_monomial(m);
  c = q.terms().begin()->second;
  q *= Rational(1) / c;
}

Poly power_product(const std::map<Poly, int>& exps, const std::map<Poly, int>& have) {
  Poly r(1);
  for (const auto& [f, e] : exps) {
    int h = 0;
    if (auto it = have.find(f); it != have.end()) h = it->second;
    if (e > h) r = r * f.pow(static_cast<unsigned>(e - h));
  }
  return r;
}

}  // namespace

Poly RatFun::denominator() const {
  Poly r(1);
  for (const auto& [f, e] : den) r = r * f.pow(static_cast<unsigned>(e));
  return r;
}

RatFun operator+(const RatFun& a, const RatFun& b) {
  if (a.num.is_zero()) return b;
  if (b.num.is_zero()) return a;
  if (a.den == b.den) return RatFun{a.num + b.num, a.den};
  std::map<Poly, int> lcm = a.den;
  for (const auto& [f, e] : b.den) lcm[f] = std::max(lcm[f], e);
  return RatFun{a.num * power_product(lcm, a.den) + b.num * power_product(lcm, b.den), lcm};
}

RatFun operator*(const RatFun& a, const RatFun& b) {
  if (a.num.is_zero() || b.num.is_zero()) return RatFun{};
  RatFun r{a.num * b.num, a.den};
  for (const auto& [f, e] : b.den) r.den[f] += e;
  return r;
}

RatFun inverse(const RatFun& a) {
  if (a.num.is_zero()) throw DomainError("division by zero in rational function");
  Rational c;
  Monomial m;
  Poly q;
  normalize_factor(a.num, c, m, q);
  RatFun r{a.denominator().mul_monomial(m.inverse()) * (Rational(1) / c), {}};
  if (!(q.is_constant())) r.den[q] = 1;
  return r;
}

RatFun pow(const RatFun& a, long n) {
  if (n < 0) return pow(inverse(a), -n);
  RatFun r{a.num.pow(static_cast<unsigned>(n)), {}};
  for (const auto& [f, e] : a.den) r.den[f] = e * static_cast<int>(n);
  if (n == 0) r.den.clear();
  return r;
}

namespace {

struct BudgetExceeded {};

Rational rational_gcd(const Rational& a, const Rational& b) {
  mpz_class n, d;
  mpz_gcd(n.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
  mpz_lcm(d.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
  Rational g(n, d);
  g.canonicalize();
  return g;
}

std::pair<Rational, Expr> split_scale(const Expr& w) {
  if (w.kind() == Kind::Sum) {
    Rational c = split_coefficient(w.operands()[0]).first;
    return {c, product({Expr(Rational(1) / c), w})};
  }
  return split_coefficient(w);
}

bool exp_family(Kind k) { return k == Kind::Exp || k == Kind::Tanh || k == Kind::Sech || k == Kind::Cosh; }

class Converter {
 public:
  explicit Converter(std::size_t budget) : budget_(budget) {}

  void scan(const Expr& e) {
    if (e.kind() == Kind::Rational || e.kind() == Kind::Symbol) return;
    if (!scanned_.insert(e.id()).second) return;
    if (exp_family(e.kind())) {
      auto [q, w0] = split_scale(e.arg());
      auto& g = scales_[w0];
      g = g == 0 ? abs(q) : rational_gcd(g, q);
    }
    for (const auto& o : e.operands()) scan(o);
  }

  void assign_kernels() {
    int i = 0;
    for (const auto& [w0, g] : scales_) kernels_.emplace(w0, std::make_pair(intern("__E" + std::to_string(i++)), g));
  }

  RatFun convert(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    RatFun r = convert_uncached(e);
    check(r.num);
    memo_.emplace(e.id(), r);
    return r;
  }

  Poly reduce_algebraic(Poly p) {
    for (int round = 0; round < 32; ++round) {
      bool changed = false;
      for (auto it = sqrt_kernels_.rbegin(); it != sqrt_kernels_.rend(); ++it) {
        VarId s = it->first;
        int lo = p.min_degree(s), hi = p.max_degree(s);
        if (lo >= 0 && hi <= 1) continue;
        changed = true;
        Poly n = it->second.num, d = it->second.denominator();
        auto fl = [](int e) { return e >= 0 ? e / 2 : -((-e + 1) / 2); };
        int qmin = fl(lo), qmax = fl(hi);
        Poly out;
        std::map<int, Poly> npow, dpow;
        for (const auto& [m, c] : p.terms()) {
          int e = m.degree(s);
          int q = fl(e);
          Monomial rest;
          for (const auto& f : m.factors)
            if (f.first != s) rest.factors.push_back(f);
          if (e - 2 * q) rest = rest * make_monomial({{s, 1}});
          auto& np = npow[q - qmin];
          if (np.is_zero()) np = n.pow(static_cast<unsigned>(q - qmin));
          auto& dp = dpow[qmax - q];
          if (dp.is_zero()) dp = d.pow(static_cast<unsigned>(qmax - q));
          out += (np * dp).mul_monomial(rest) * c;
          check(out);
        }
        p = std::move(out);
      }
      if (!changed) break;
    }
    return p;
  }

 private:
  void check(const Poly& p) const {
    if (p.size() > budget_) throw BudgetExceeded{};
  }

  RatFun kernel_power(const Expr& arg, long& m_out, VarId& var) {
    auto [q, w0] = split_scale(arg);
    const auto& [v, g] = kernels_.at(w0);
    Rational m = q / g;
    m_out = m.get_num().get_si();
    var = v;
    return {};
  }

  RatFun convert_uncached(const Expr& e) {
    switch (e.kind()) {
      case Kind::Rational: return RatFun::from(Poly(e.value()));
      case Kind::Symbol: return RatFun::from(Poly::var(e.name()));
      case Kind::Sum: {
        RatFun r;
        for (const auto& o : e.operands()) {
          r = r + convert(o);
          check(r.num);
        }
        return r;
      }
      case Kind::Product: {
        RatFun r = RatFun::from(Poly(1));
        for (const auto& o : e.operands()) {
          r = r * convert(o);
          check(r.num);
        }
        return r;
      }
      case Kind::Pow: return pow(convert(e.base()), e.exponent());
      case Kind::Sqrt: {
        auto it = sqrt_ids_.find(e.arg());
        if (it == sqrt_ids_.end()) {
          RatFun rad = convert(e.arg());
          VarId s = intern("__S" + std::to_string(sqrt_kernels_.size()));
          sqrt_kernels_.emplace_back(s, rad);
          it = sqrt_ids_.emplace(e.arg(), s).first;
        }
        return RatFun::from(Poly::var(it->second));
      }
      default: break;
    }
    long m = 0;
    VarId E = 0;
    kernel_power(e.arg(), m, E);
    long M = m < 0 ? -m : m;
    int sm = m < 0 ? -1 : 1;
    switch (e.kind()) {
      case Kind::Exp: return RatFun::from(Poly::var(E, static_cast<int>(m)));
      case Kind::Cosh:
        return RatFun::from((Poly::var(E, static_cast<int>(M)) + Poly::var(E, -static_cast<int>(M))) * Rational(1, 2));
      case Kind::Sech: {
        Poly q = Poly::var(E, static_cast<int>(2 * M)) + Poly(1);
        RatFun r{Poly::var(E, static_cast<int>(M)) * Rational(2), {}};
        r.den[q] = 1;
        return r;
      }
      case Kind::Tanh: {
        Poly q = Poly::var(E, static_cast<int>(2 * M)) + Poly(1);
        RatFun r{(Poly::var(E, static_cast<int>(2 * M)) - Poly(1)) * Rational(sm), {}};
        r.den[q] = 1;
        return r;
      }
      default: throw std::logic_error("unhandled kind in rational conversion");
    }
  }

  std::size_t budget_;
  std::unordered_set<const Node*> scanned_;
  std::map<Expr, Rational, ExprLess> scales_;
  std::map<Expr, std::pair<VarId, Rational>, ExprLess> kernels_;
  std::map<Expr, VarId, ExprLess> sqrt_ids_;
  std::vector<std::pair<VarId, RatFun>> sqrt_kernels_;
  std::unordered_map<const Node*, RatFun> memo_;
};

}  // namespace

std::optional<Poly> zero_numerator(const Expr& e, std::size_t term_budget) {
  if (e.is_zero()) return Poly();
  try {
    Converter c(term_budget);
    c.scan(e);
    c.assign_kernels();
    RatFun r = c.convert(e);
    return c.reduce_algebraic(r.num);
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

bool is_identically_zero(const Expr& e) {
  auto p = zero_numerator(e);
  return p && p->is_zero();
}

const char* to_string(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::Proven: return "zero";
    case ZeroVerdict::NumericallyZero: return "numerically zero";
    case ZeroVerdict::Nonzero: return "nonzero";
  }
  return "?";
}

std::string ZeroReport::describe() const {
  std::ostringstream os;
  os << to_string(verdict);
  if (verdict == ZeroVerdict::NumericallyZero) os << " (max |value| " << max_abs << " over " << points << " points)";
  if (verdict == ZeroVerdict::Nonzero) {
    os << " (witness";
    for (const auto& [k, v] : witness) os << ' ' << k << '=' << v;
    os << " -> " << witness_value << ')';
  }
  return os.str();
}

ZeroReport sample_zero(const Expr& e, std::uint64_t seed, int points, double tol) {
  ZeroReport rep;
  auto syms = free_symbols(e);
  std::vector<std::string> vars(syms.begin(), syms.end());
  CompiledExpr f(e, vars);
  std::mt19937_64 rng(seed);
  std::vector<double> x(vars.size());
  int attempts = 0;
  bool have_witness = false;
  while (rep.points < points && attempts < points * 50) {
    ++attempts;
    for (auto& xi : x) xi = random_rational(rng, 16, 8).get_d();
    double v;
    try {
      v = f(x);
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(v)) continue;
    ++rep.points;
    if (std::abs(v) > rep.max_abs) rep.max_abs = std::abs(v);
    if (std::abs(v) > tol && !have_witness) {
      have_witness = true;
      rep.witness_value = v;
      for (std::size_t i = 0; i < vars.size(); ++i) rep.witness[vars[i]] = x[i];
    }
    if (vars.empty()) break;
  }
  if (rep.points == 0) throw DomainError("no admissible sample point for numeric zero test");
  rep.verdict = have_witness ? ZeroVerdict::Nonzero : ZeroVerdict::NumericallyZero;
  return rep;
}

ZeroReport zero_test(const Expr& e, std::uint64_t seed, int points, double tol) {
  if (is_identically_zero(e)) {
    ZeroReport rep;
    rep.verdict = ZeroVerdict::Proven;
    return rep;
  }
  return sample_zero(e, seed, points, tol);
}

}  // namespace kpbbm

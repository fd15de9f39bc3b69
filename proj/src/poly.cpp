#include "kpbbm/poly.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace kpbbm {

namespace {

struct Registry {
  std::mutex mu;
  std::unordered_map<std::string, VarId> ids;
  std::vector<std::string> names;
};

Registry& registry() {
  static Registry r;
  return r;
}

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& [v, e] : m.factors) {
      h ^= (static_cast<std::size_t>(v) << 16) ^ static_cast<std::size_t>(static_cast<unsigned>(e));
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

VarId intern(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.ids.find(name);
  if (it != r.ids.end()) return it->second;
  VarId id = static_cast<VarId>(r.names.size());
  r.names.push_back(name);
  r.ids.emplace(name, id);
  return id;
}

const std::string& var_name(VarId id) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  if (id >= r.names.size()) throw std::out_of_range("unknown variable id");
  return r.names[id];
}

int Monomial::degree(VarId v) const {
  for (const auto& [w, e] : factors)
    if (w == v) return e;
  return 0;
}

int Monomial::total_degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.second;
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.factors.reserve(factors.size() + o.factors.size());
  auto a = factors.begin(), b = o.factors.begin();
  while (a != factors.end() || b != o.factors.end()) {
    if (b == o.factors.end() || (a != factors.end() && a->first < b->first)) {
      r.factors.push_back(*a++);
    } else if (a == factors.end() || b->first < a->first) {
      r.factors.push_back(*b++);
    } else {
      int e = a->second + b->second;
      if (e != 0) r.factors.emplace_back(a->first, e);
      ++a;
      ++b;
    }
  }
  return r;
}

Monomial Monomial::inverse() const {
  Monomial r = *this;
  for (auto& f : r.factors) f.second = -f.second;
  return r;
}

Monomial make_monomial(std::vector<std::pair<VarId, int>> factors) {
  std::map<VarId, int> acc;
  for (const auto& [v, e] : factors) acc[v] += e;
  Monomial m;
  for (const auto& [v, e] : acc)
    if (e != 0) m.factors.emplace_back(v, e);
  return m;
}

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::var(VarId v, int exponent) {
  Poly p;
  Monomial m;
  if (exponent != 0) m.factors.emplace_back(v, exponent);
  p.terms_.emplace(m, Rational(1));
  return p;
}

Poly Poly::term(const Rational& c, const Monomial& m) {
  Poly p;
  if (c != 0) p.terms_.emplace(m, c);
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

Rational Poly::constant_term() const { return coefficient(Monomial{}); }

Rational Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.second *= c;
  }
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.size() == 1 && a.terms_.begin()->first.is_one()) return b * a.terms_.begin()->second;
  if (b.size() == 1 && b.terms_.begin()->first.is_one()) return a * b.terms_.begin()->second;
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(a.size() * b.size());
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      auto [it, inserted] = acc.try_emplace(ma * mb, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  Poly r;
  for (auto& [m, c] : acc)
    if (c != 0) r.terms_.emplace(m, std::move(c));
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly r(1), base = *this;
  while (n) {
    if (n & 1u) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

Poly Poly::mul_monomial(const Monomial& m) const {
  Poly r;
  for (const auto& [mm, c] : terms_) r.terms_.emplace(mm * m, c);
  return r;
}

Poly Poly::derivative(VarId v) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    int e = m.degree(v);
    if (e == 0) continue;
    Monomial d = m;
    for (auto it = d.factors.begin(); it != d.factors.end(); ++it)
      if (it->first == v) {
        if (--it->second == 0) d.factors.erase(it);
        break;
      }
    r.add_term(d, c * e);
  }
  return r;
}

int Poly::max_degree(VarId v) const {
  int d = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int e = t.first.degree(v);
    if (first || e > d) d = e;
    first = false;
  }
  return d;
}

int Poly::min_degree(VarId v) const {
  int d = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int e = t.first.degree(v);
    if (first || e < d) d = e;
    first = false;
  }
  return d;
}

std::set<VarId> Poly::variables() const {
  std::set<VarId> s;
  for (const auto& t : terms_)
    for (const auto& f : t.first.factors) s.insert(f.first);
  return s;
}

bool Poly::contains(VarId v) const {
  for (const auto& t : terms_)
    if (t.first.degree(v) != 0) return true;
  return false;
}

Poly Poly::substitute(VarId v, const Poly& p) const { return substitute(std::map<VarId, Poly>{{v, p}}); }

Poly Poly::substitute(const std::map<VarId, Poly>& s) const {
  Poly r;
  std::map<std::pair<VarId, int>, Poly> cache;
  for (const auto& [m, c] : terms_) {
    Monomial keep;
    Poly factor(c);
    for (const auto& [v, e] : m.factors) {
      auto it = s.find(v);
      if (it == s.end()) {
        keep.factors.emplace_back(v, e);
        continue;
      }
      if (e < 0) throw std::domain_error("substitution into a negative power of " + var_name(v));
      auto key = std::make_pair(v, e);
      auto cit = cache.find(key);
      if (cit == cache.end()) cit = cache.emplace(key, it->second.pow(static_cast<unsigned>(e))).first;
      factor = factor * cit->second;
    }
    r += factor.mul_monomial(keep);
  }
  return r;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return {};
  std::map<VarId, int> lo;
  std::set<VarId> vars = variables();
  for (VarId v : vars) lo[v] = min_degree(v);
  Monomial m;
  for (const auto& [v, e] : lo)
    if (e != 0) m.factors.emplace_back(v, e);
  return m;
}

Rational Poly::eval(const std::map<VarId, Rational>& point) const {
  Rational s(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m.factors) {
      auto it = point.find(v);
      if (it == point.end()) throw UnboundSymbol(var_name(v));
      t *= kpbbm::pow(it->second, e);
    }
    s += t;
  }
  return s;
}

double Poly::eval(const std::map<VarId, double>& point) const {
  double s = 0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d();
    for (const auto& [v, e] : m.factors) {
      auto it = point.find(v);
      if (it == point.end()) throw UnboundSymbol(var_name(v));
      t *= std::pow(it->second, e);
    }
    s += t;
  }
  return s;
}

Poly Poly::partial_eval(const std::map<VarId, Rational>& point) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    Rational k = c;
    Monomial keep;
    for (const auto& [v, e] : m.factors) {
      auto it = point.find(v);
      if (it == point.end()) {
        keep.factors.emplace_back(v, e);
      } else {
        k *= kpbbm::pow(it->second, e);
      }
    }
    r.add_term(keep, k);
  }
  return r;
}

Expr Poly::to_expr() const {
  std::vector<Expr> ts;
  for (const auto& [m, c] : terms_) {
    std::vector<Expr> fs{Expr(c)};
    for (const auto& [v, e] : m.factors) fs.push_back(kpbbm::pow(Expr::symbol(var_name(v)), e));
    ts.push_back(product(std::move(fs)));
  }
  return sum(std::move(ts));
}

Poly poly_from_expr(const Expr& e) {
  switch (e.kind()) {
    case Kind::Rational: return Poly(e.value());
    case Kind::Symbol: return Poly::var(e.name());
    case Kind::Sum: {
      Poly r;
      for (const auto& o : e.operands()) r += poly_from_expr(o);
      return r;
    }
    case Kind::Product: {
      Poly r(1);
      for (const auto& o : e.operands()) r = r * poly_from_expr(o);
      return r;
    }
    case Kind::Pow: {
      if (e.base().kind() == Kind::Symbol) return Poly::var(e.base().name(), static_cast<int>(e.exponent()));
      if (e.exponent() < 0) throw std::invalid_argument("not a Laurent polynomial: " + to_string(e));
      return poly_from_expr(e.base()).pow(static_cast<unsigned>(e.exponent()));
    }
    default: throw std::invalid_argument("not a polynomial: " + to_string(e));
  }
}

std::map<Monomial, Poly> collect(const Poly& p, const std::function<bool(VarId)>& is_key) {
  std::map<Monomial, Poly> out;
  for (const auto& [m, c] : p.terms()) {
    Monomial key, rest;
    for (const auto& f : m.factors) (is_key(f.first) ? key : rest).factors.push_back(f);
    out[key] += Poly::term(c, rest);
  }
  return out;
}

Rational random_rational(std::mt19937_64& rng, long max_num, long max_den) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

}  // namespace kpbbm

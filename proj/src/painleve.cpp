#include "kpbbm/painleve.hpp"

#include <algorithm>

#include "kpbbm/jet.hpp"
#include "kpbbm/linalg.hpp"

namespace kpbbm {

namespace {

constexpr int kMaxIndex = 7;
const char* const kManifoldSymbol = "phi__";  // formal phi in series expansions

using Dir = Direction;

class SeriesSpace {
 public:
  explicit SeriesSpace(Gauge g)
      : gauge_(g), js_(deps(g), false), F_(intern(kManifoldSymbol)), fn_(g == Gauge::General ? "phi" : "psi") {}

  Gauge gauge() const { return gauge_; }
  VarId F() const { return F_; }

  Poly D(const Poly& p, Dir d) const {
    Poly r = js_.D(p, d);
    Poly dF = p.derivative(F_);
    if (!dF.is_zero()) r += dF * manifold_derivative(d);
    return r;
  }
  Poly D(const Poly& p, const MultiIndex& m) const {
    Poly r = p;
    for (int i = 0; i < m.x; ++i) r = D(r, Dir::X);
    for (int i = 0; i < m.y; ++i) r = D(r, Dir::Y);
    for (int i = 0; i < m.t; ++i) r = D(r, Dir::T);
    return r;
  }

  // phi_J: in the Kruskal gauge phi_x = 1 and any other x-derivative vanishes.
  Poly phi(std::string_view letters) const {
    MultiIndex m = multi_index(letters);
    if (gauge_ == Gauge::General) return js_.jet("phi", m);
    if (m.x > 0) return m.x == 1 && m.order() == 1 ? Poly(1) : Poly();
    return js_.jet("psi", m);
  }
  Poly U(int m, std::string_view letters = "") const {
    if (m < 0) return Poly();
    MultiIndex mi = multi_index(letters);
    if (gauge_ == Gauge::Kruskal && mi.x > 0) return Poly();
    return js_.jet(series_coefficient_name(m), mi);
  }
  VarId U_var(int m) const { return js_.jet_var(series_coefficient_name(m), {}); }

  Poly residual(const Poly& u, const Params& p) const {
    Poly ux = D(u, Dir::X), uxx = D(ux, Dir::X);
    Poly uxt = D(ux, Dir::T), uxxxt = D(D(uxx, Dir::X), Dir::T), uyy = D(D(u, Dir::Y), Dir::Y);
    return uxt + uxx + Rational(2) * p.a * ux * ux + Rational(2) * p.a * u * uxx + p.b * uxxxt + p.k * uyy;
  }

  // u = sum_{m<=n} U<m> F^(m-2)
  Poly series(int n) const {
    Poly u;
    for (int m = 0; m <= n; ++m) u += U(m).mul_monomial(make_monomial({{F_, m - 2}}));
    return u;
  }

  // Coefficient of F^power.
  Poly coefficient(const Poly& e, int power) const {
    Poly out;
    for (const auto& [m, c] : e.terms()) {
      if (m.degree(F_) != power) continue;
      Monomial rest;
      for (const auto& f : m.factors)
        if (f.first != F_) rest.factors.push_back(f);
      out += Poly::term(c, rest);
    }
    return out;
  }

 private:
  static std::vector<std::pair<std::string, std::vector<Dir>>> deps(Gauge g) {
    std::vector<Dir> ds = g == Gauge::General ? std::vector<Dir>{Dir::X, Dir::Y, Dir::T} : std::vector<Dir>{Dir::Y, Dir::T};
    std::vector<std::pair<std::string, std::vector<Dir>>> out{{g == Gauge::General ? "phi" : "psi", ds}};
    for (int m = 0; m <= kMaxIndex; ++m) out.emplace_back(series_coefficient_name(m), ds);
    return out;
  }
  Poly manifold_derivative(Dir d) const {
    if (gauge_ == Gauge::Kruskal && d == Dir::X) return Poly(1);
    return js_.jet(fn_, MultiIndex{} + d);
  }

  Gauge gauge_;
  PolyJetSpace js_;
  VarId F_;
  std::string fn_;
};

// Divides by a single-term polynomial.
Poly divide_by_term(const Poly& num, const Poly& den) {
  if (den.size() != 1) throw std::logic_error("division by a non-monomial: " + to_string(den.to_expr()));
  const auto& [m, c] = *den.terms().begin();
  return num.mul_monomial(m.inverse()) * (Rational(1) / c);
}

Poly u0_poly(const SeriesSpace& s, const Params& p) {
  return Rational(-6) * p.b / p.a * s.phi("x") * s.phi("t");
}

// Substitutes U<m> (and its jets) for m in `known` by the given polynomials.
Poly substitute_coefficients(const SeriesSpace& s, const Poly& e, const std::map<int, Poly>& known) {
  std::map<VarId, Poly> sub;
  for (VarId v : e.variables()) {
    auto parsed = parse_jet_name(var_name(v));
    if (!parsed || parsed->first.size() < 2 || parsed->first[0] != 'U') continue;
    int m = std::stoi(parsed->first.substr(1));
    auto it = known.find(m);
    if (it == known.end()) continue;
    sub.emplace(v, s.D(it->second, parsed->second));
  }
  return e.substitute(sub);
}

std::map<int, Poly> known_coefficients(const SeriesSpace& s, const SingularExpansion& ex, int below) {
  std::map<int, Poly> known;
  for (int m = 0; m < below; ++m) {
    const Expr& c = ex.coefficients[static_cast<std::size_t>(m)];
    if (c == sym(series_coefficient_name(m))) continue;  // arbitrary at a resonance
    known.emplace(m, poly_from_expr(c));
  }
  (void)s;
  return known;
}

bool is_resonance(int j) { return j == -1 || j == 4 || j == 5 || j == 6; }

}  // namespace

std::string series_coefficient_name(int j) { return "U" + std::to_string(j); }

LeadingOrder leading_order(const Params& p) {
  p.validate();
  SeriesSpace s(Gauge::General);
  VarId U0 = s.U_var(0);
  for (int alpha = -1; alpha >= -4; --alpha) {
    Poly u = s.U(0).mul_monomial(make_monomial({{s.F(), alpha}}));
    Poly e = s.residual(u, p);
    int lowest = 0;
    bool first = true;
    for (const auto& [m, c] : e.terms()) {
      int d = m.degree(s.F());
      if (first || d < lowest) lowest = d;
      first = false;
    }
    if (first) continue;
    Poly c = s.coefficient(e, lowest);
    // c = U0^k (c1 + c2 U0 + ...): a balance needs two distinct powers of U0.
    int lo = c.min_degree(U0), hi = c.max_degree(U0);
    if (lo == hi) continue;
    if (hi - lo != 1) throw std::logic_error("leading balance is not linear after factoring");
    Poly c1, c2;
    for (const auto& [m, q] : c.terms()) {
      Monomial rest;
      for (const auto& f : m.factors)
        if (f.first != U0) rest.factors.push_back(f);
      (m.degree(U0) == lo ? c1 : c2) += Poly::term(q, rest);
    }
    Poly u0 = divide_by_term(-c1, c2);
    return {alpha, u0.to_expr()};
  }
  throw DegenerateBalance("no dominant balance: the dispersive term is absent or too weak (b = " + p.b.get_str() + ")");
}

Expr series_balance(int j, const Params& p, Gauge g) {
  if (j < 0 || j > kMaxIndex) throw std::invalid_argument("series index out of range");
  SeriesSpace s(g);
  return s.coefficient(s.residual(s.series(j), p), j - 6).to_expr();
}

ResonancePolynomial resonance_polynomial(const Params& p) {
  p.validate();
  if (p.b == 0) throw DegenerateBalance("b = 0: no resonance polynomial");
  SeriesSpace s(Gauge::General);
  Poly E = s.residual(s.series(kMaxIndex), p);
  Poly factor = p.b * s.phi("x").pow(3) * s.phi("t");
  std::map<int, Poly> u0{{0, u0_poly(s, p)}};
  RVec values;
  for (int j = 1; j <= kMaxIndex; ++j) {
    Poly lin = s.coefficient(E, j - 6).derivative(s.U_var(j));
    lin = substitute_coefficients(s, lin, u0);
    Poly r = divide_by_term(lin, factor);
    if (!r.is_constant()) throw std::logic_error("u_j coefficient is not proportional to b phi_x^3 phi_t");
    values.push_back(r.constant_term());
  }
  RMat vander;
  RVec rhs;
  for (int j = 1; j <= 5; ++j) {
    RVec row;
    for (int i = 0; i <= 4; ++i) row.push_back(kpbbm::pow(Rational(j), i));
    vander.push_back(row);
    rhs.push_back(values[static_cast<std::size_t>(j - 1)]);
  }
  ResonancePolynomial out;
  auto c = solve(vander, rhs);
  if (!c) throw std::logic_error("interpolation failed");
  out.coeffs = *c;
  for (int j = 6; j <= kMaxIndex; ++j) {
    Rational v(0);
    for (int i = 0; i <= 4; ++i) v += out.coeffs[static_cast<std::size_t>(i)] * kpbbm::pow(Rational(j), i);
    if (v != values[static_cast<std::size_t>(j - 1)]) throw std::logic_error("u_j coefficient is not quartic in j");
  }
  std::vector<Expr> terms;
  for (int i = 0; i <= 4; ++i) terms.push_back(Expr(out.coeffs[static_cast<std::size_t>(i)]) * pow(sym("j"), i));
  out.poly = sum(std::move(terms));
  out.factor = factor.to_expr();
  for (const auto& [root, mult] : rational_roots(out.coeffs))
    for (int i = 0; i < mult; ++i) out.roots.push_back(root);
  if (out.coeffs[0] == 0) out.roots.push_back(Rational(0));
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

Expr printed_recursion(int j, const Params& p) {
  SeriesSpace s(Gauge::General);
  auto u = [&](int m, std::string_view l = "") { return s.U(m, l); };
  auto f = [&](std::string_view l) { return s.phi(l); };
  Rational J(j), a = p.a, b = p.b, k = p.k;
  Rational j3 = J - 3, j4 = J - 4, j5 = J - 5;

  Poly B = u(j - 4, "xt") + j5 * u(j - 3, "x") * f("t") + j5 * u(j - 3, "t") * f("x") +
           j4 * j5 * u(j - 2) * f("x") * f("t") + j5 * u(j - 3) * f("xt") + u(j - 4, "xx") +
           Rational(2) * j5 * u(j - 3, "x") * f("x") + j4 * j5 * u(j - 2) * f("x").pow(2) + j5 * u(j - 3) * f("xx");
  Poly Bb = u(j - 4, "xxxt") + j5 * u(j - 3, "xxx") * f("t") + 3 * j5 * u(j - 3, "xxt") * f("x") +
            3 * j4 * j5 * u(j - 2, "xx") * f("x") * f("t") + 3 * j5 * u(j - 3, "xx") * f("xt") +
            3 * j4 * j5 * u(j - 2, "xt") * f("x").pow(2) + 3 * j3 * j4 * j5 * u(j - 1, "x") * f("x").pow(2) * f("t") +
            6 * j4 * j5 * u(j - 2, "x") * f("x") * f("xt") + 2 * j5 * u(j - 3, "xt") * f("xx") +
            3 * j4 * j5 * u(j - 2, "x") * f("xx") * f("t") + 3 * j5 * u(j - 3, "x") * f("xxt") +
            j3 * j4 * j5 * u(j - 1, "t") * f("x").pow(3) + 3 * j3 * j4 * j5 * u(j - 1) * f("x").pow(2) * f("xt") +
            3 * j4 * j5 * u(j - 2, "t") * f("x") * f("xx") + 3 * j3 * j4 * j5 * u(j - 1) * f("x") * f("xx") * f("t") +
            3 * j4 * j5 * u(j - 2) * f("xt") * f("xx") + 3 * j4 * j5 * u(j - 2) * f("x") * f("xxt") +
            j5 * u(j - 3, "xt") * f("xx") + j5 * u(j - 3, "t") * f("xxx") + j4 * j5 * u(j - 2) * f("xxx") * f("t") +
            j5 * u(j - 3) * f("xxxt");
  Poly Bk = u(j - 4, "yy") + 2 * j5 * u(j - 3, "y") * f("y") + j4 * j5 * u(j - 2) * f("y").pow(2) + j5 * u(j - 3) * f("yy");
  Poly Bs;
  for (int r = 1; r <= j - 1; ++r) {
    Rational R(r), jr2 = J - R - 2, r2 = R - 2, r3 = R - 3;
    Bs += u(j - r, "x") * u(r - 2, "x") + jr2 * u(j - r) * u(r - 1, "x") * f("x") +
          r3 * u(j - r, "x") * u(r - 1) * f("x") + jr2 * r2 * u(j - r) * u(r) * f("x").pow(2) +
          u(j - r) * u(r - 2, "xx") + 2 * r3 * u(j - r) * u(r - 1, "x") * f("x") +
          r2 * r3 * u(j - r) * u(r) * f("x").pow(2) + r3 * u(j - r) * u(r - 1) * f("xx");
  }
  Poly B0 = u(0, "x") * u(j - 2, "x") - Rational(2) * u(0) * u(j - 1, "x") * f("x") + j3 * u(0, "x") * u(j - 1) * f("x") +
            u(0) * u(j - 2, "xx") + 2 * j3 * u(0) * u(j - 1, "x") * f("x") + j3 * u(0) * u(j - 1) * f("xx");
  Poly bracket = B + b * Bb + k * Bk + Rational(2) * a * Bs + Rational(2) * a * B0;
  Poly lhs = (J + 1) * j4 * j5 * (J - 6) * b * u(j) * f("x").pow(3) * f("t");
  return (lhs + bracket).to_expr();
}

RecursionComparison compare_recursion(int j, const Params& p) {
  if (j < 1 || j > kMaxIndex) throw std::invalid_argument("recursion index out of range");
  SeriesSpace s(Gauge::General);
  VarId Uj = s.U_var(j);
  std::map<int, Poly> u0{{0, u0_poly(s, p)}};
  auto split = [&](const Poly& e, Poly& lin, Poly& rest) {
    lin = substitute_coefficients(s, e.derivative(Uj), u0);
    rest = e - Poly::var(Uj) * e.derivative(Uj);
  };
  RecursionComparison out;
  Poly dl, dr, pl, pr;
  split(poly_from_expr(series_balance(j, p, Gauge::General)), dl, dr);
  split(poly_from_expr(printed_recursion(j, p)), pl, pr);
  out.derived_linear = dl.to_expr();
  out.printed_linear = pl.to_expr();
  out.derived_rest = dr.to_expr();
  out.printed_rest = pr.to_expr();
  Poly diff = dr - pr;
  out.difference = diff.to_expr();
  out.linear_agrees = (dl - pl).is_zero();
  out.rest_agrees = diff.is_zero();
  return out;
}

Expr recursion_step(int j, const SingularExpansion& expansion, const Params& p, RecursionMode mode) {
  p.validate();
  if (j < 0 || j > 6) throw std::invalid_argument("recursion index must be in 0..6");
  if (j == 0) {
    if (mode == RecursionMode::Constraint) throw std::invalid_argument("no constraint at j = 0");
    SeriesSpace s(Gauge::Kruskal);
    return u0_poly(s, p).to_expr();
  }
  if (static_cast<int>(expansion.coefficients.size()) < j)
    throw RecursionIncomplete("u_" + std::to_string(j) + " needs u_0..u_" + std::to_string(j - 1) + ", have " +
                              std::to_string(expansion.coefficients.size()));
  if (mode == RecursionMode::Solve && is_resonance(j))
    throw ResonantIndex("j = " + std::to_string(j) + " is a resonance: u_j is not determined");
  SeriesSpace s(Gauge::Kruskal);
  Poly C = s.coefficient(s.residual(s.series(j), p), j - 6);
  C = substitute_coefficients(s, C, known_coefficients(s, expansion, j));
  VarId Uj = s.U_var(j);
  Poly lin = C.derivative(Uj);
  Poly rest = C - Poly::var(Uj) * lin;
  if (mode == RecursionMode::Constraint) return rest.to_expr();
  return divide_by_term(-rest, lin).to_expr();
}

SingularExpansion kruskal_expansion(const Params& p, int upto) {
  if (upto < 0 || upto > 6) throw std::invalid_argument("expansion order must be in 0..6");
  SingularExpansion ex;
  ex.alpha = -2;
  ex.manifold = sym("x") + sym("psi");
  for (int j = 0; j <= upto; ++j) {
    if (is_resonance(j))
      ex.coefficients.push_back(sym(series_coefficient_name(j)));
    else
      ex.coefficients.push_back(recursion_step(j, ex, p, RecursionMode::Solve));
  }
  return ex;
}

CompatibilityReport compatibility_check(int j, const SingularExpansion& expansion, const Params& p) {
  if (j == -1) throw std::invalid_argument("j = -1 reflects the arbitrary singularity manifold; nothing to check");
  if (j != 4 && j != 5 && j != 6) throw std::invalid_argument("j = " + std::to_string(j) + " is not a resonance");
  CompatibilityReport r;
  r.j = j;
  r.condition = recursion_step(j, expansion, p, RecursionMode::Constraint);
  r.zero = zero_test(r.condition);
  r.satisfied = r.zero.zero();
  return r;
}

CompatibilityReport compatibility_check(int j, const Params& p) {
  if (j != 4 && j != 5 && j != 6) return compatibility_check(j, SingularExpansion{}, p);
  return compatibility_check(j, kruskal_expansion(p, j - 1), p);
}

std::map<int, Expr> truncated_residual(const SingularExpansion& expansion, const Params& p) {
  p.validate();
  SeriesSpace s(Gauge::Kruskal);
  int n = static_cast<int>(expansion.coefficients.size()) - 1;
  std::map<int, Poly> known;
  for (int m = 0; m <= n; ++m) known.emplace(m, poly_from_expr(expansion.coefficients[static_cast<std::size_t>(m)]));
  Poly e = substitute_coefficients(s, s.residual(s.series(n), p), known);
  std::map<int, Poly> by_power;
  for (const auto& [m, c] : e.terms()) {
    Monomial rest;
    for (const auto& f : m.factors)
      if (f.first != s.F()) rest.factors.push_back(f);
    by_power[m.degree(s.F())] += Poly::term(c, rest);
  }
  std::map<int, Expr> out;
  for (const auto& [k, v] : by_power)
    if (!v.is_zero()) out.emplace(k, v.to_expr());
  return out;
}

}  // namespace kpbbm

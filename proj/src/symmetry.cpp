#include "kpbbm/symmetry.hpp"

#include <algorithm>
#include <functional>

namespace kpbbm {

namespace {

const std::array<const char*, 4> kPointCoords{"x", "y", "t", "u"};

}  // namespace

Expr symmetry_condition_off_shell(const VectorField& v, const Params& p) {
  v.validate();
  using D = Direction;
  Expr e = v.eta;
  Expr ex = prolongation_coefficient(v, ProlongIndex::X);
  Expr exx = prolongation_coefficient(v, ProlongIndex::XX);
  Expr eyy = prolongation_coefficient(v, ProlongIndex::YY);
  Expr ext = prolongation_coefficient(v, std::vector<D>{D::X, D::T});
  Expr exxxt = prolongation_coefficient(v, ProlongIndex::XXXT);
  Expr a(p.a);
  return sum({ext, exx, Expr(4) * a * jet("x") * ex, Expr(2) * a * jet("xx") * e, Expr(2) * a * sym("u") * exx,
              Expr(p.b) * exxxt, Expr(p.k) * eyy});
}

Expr symmetry_condition(const VectorField& v, const Params& p) {
  Expr off = symmetry_condition_off_shell(v, p);
  if (p.k == 0) throw KZero("k = 0: u_yy cannot be eliminated; off-shell residual attached", off);
  // u_yy = -(u_xt + u_xx + 2a u_x^2 + 2a u u_xx + b u_xxxt) / k
  Expr rest = jet_form(p) - Expr(p.k) * jet("yy");
  return substitute(off, {{jet_name("u", multi_index("yy")), -rest * Expr(Rational(1) / p.k)}});
}

SymmetryAnsatz::SymmetryAnsatz(int degree) : degree_(degree) {
  if (degree < 1) throw std::invalid_argument("ansatz degree must be at least 1");
  std::function<void(int, int, std::vector<std::pair<VarId, int>>&)> gen = [&](int pos, int left,
                                                                             std::vector<std::pair<VarId, int>>& acc) {
    if (pos == 4) {
      monomials_.push_back(make_monomial(acc));
      return;
    }
    for (int e = 0; e <= left; ++e) {
      acc.emplace_back(intern(kPointCoords[static_cast<std::size_t>(pos)]), e);
      gen(pos + 1, left - e, acc);
      acc.pop_back();
    }
  };
  std::vector<std::pair<VarId, int>> acc;
  gen(0, degree, acc);
  std::sort(monomials_.begin(), monomials_.end(), [](const Monomial& a, const Monomial& b) {
    if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
    return a < b;
  });
}

RVec SymmetryAnsatz::coordinates(const VectorField& v) const {
  RVec r(static_cast<std::size_t>(size()), Rational(0));
  std::array<Expr, 4> comps{v.xi, v.gamma, v.tau, v.eta};
  std::size_t m = monomials_.size();
  for (std::size_t c = 0; c < 4; ++c) {
    Poly p = poly_from_expr(comps[c]);
    for (const auto& [mono, q] : p.terms()) {
      auto it = std::find(monomials_.begin(), monomials_.end(), mono);
      if (it == monomials_.end()) throw std::invalid_argument("field is outside the ansatz: " + to_string(comps[c]));
      r[c * m + static_cast<std::size_t>(it - monomials_.begin())] = q;
    }
  }
  return r;
}

VectorField SymmetryAnsatz::field(const RVec& coords) const {
  std::size_t m = monomials_.size();
  std::array<Expr, 4> comps;
  for (std::size_t c = 0; c < 4; ++c) {
    Poly p;
    for (std::size_t i = 0; i < m; ++i) p += Poly::term(coords[c * m + i], monomials_[i]);
    comps[c] = p.to_expr();
  }
  return {comps[0], comps[1], comps[2], comps[3]};
}

DeterminingSystem solve_determining(const Params& p, const SymmetryAnsatz& ansatz) {
  p.validate();
  if (p.k == 0) throw KZero("k = 0: determining equations need the on-shell elimination of u_yy", Expr(0));
  DeterminingSystem out;
  out.unknowns = ansatz.size();
  std::size_t m = ansatz.monomials().size();

  // Unknown coefficients as polynomial variables; index by VarId.
  std::map<VarId, int> unknown_index;
  std::array<Poly, 4> comps;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < m; ++i) {
      int idx = static_cast<int>(c * m + i);
      VarId v = intern("sym_c" + std::to_string(idx));
      unknown_index[v] = idx;
      comps[c] += Poly::var(v).mul_monomial(ansatz.monomials()[i]);
    }

  PolyJetSpace js({{"u", {Direction::X, Direction::Y, Direction::T}}}, true);
  auto D = [&](const Poly& q, Direction d) { return js.D(q, d); };
  auto J = [&](const MultiIndex& mi) { return js.jet("u", mi); };
  using Dir = Direction;
  auto pro = [&](std::vector<Dir> path) { return prolong(comps, path, D, J); };
  Poly ex = pro({Dir::X}), exx = pro({Dir::X, Dir::X}), eyy = pro({Dir::Y, Dir::Y}), ext = pro({Dir::X, Dir::T});
  Poly exxxt = pro({Dir::X, Dir::X, Dir::X, Dir::T});
  Poly u = Poly::var("u");
  Poly E = ext + exx + Rational(4) * p.a * J(multi_index("x")) * ex + Rational(2) * p.a * J(multi_index("xx")) * comps[3] +
           Rational(2) * p.a * u * exx + p.b * exxxt + p.k * eyy;
  Poly rest = J(multi_index("xt")) + J(multi_index("xx")) + Rational(2) * p.a * J(multi_index("x")).pow(2) +
              Rational(2) * p.a * u * J(multi_index("xx")) + p.b * J(multi_index("xxxt"));
  E = E.substitute(js.jet_var("u", multi_index("yy")), rest * (Rational(-1) / p.k));

  auto groups = collect(E, [&](VarId v) { return unknown_index.count(v) == 0; });
  Echelon ech(out.unknowns);
  for (const auto& [key, lin] : groups) {
    SparseRow row;
    for (const auto& [mono, q] : lin.terms()) {
      if (mono.factors.size() != 1 || mono.factors[0].second != 1)
        throw std::logic_error("determining equation is not linear in the unknowns");
      row[unknown_index.at(mono.factors[0].first)] = q;
    }
    ech.add(row);
  }
  out.equations = static_cast<int>(groups.size());
  out.rank = ech.rank();
  for (const auto& v : ech.nullspace()) out.basis.push_back(ansatz.field(v));
  return out;
}

Expr characteristic(const VectorField& v, const Expr& u) {
  Bindings on{{"u", u}};
  return substitute(v.eta, on) - substitute(v.xi, on) * differentiate(u, "x") -
         substitute(v.gamma, on) * differentiate(u, "y") - substitute(v.tau, on) * differentiate(u, "t");
}

}  // namespace kpbbm

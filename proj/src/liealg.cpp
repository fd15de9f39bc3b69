#include "kpbbm/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace kpbbm {

namespace {

const std::array<const char*, 4> kPointCoords{"x", "y", "t", "u"};

std::array<Expr, 4> components(const VectorField& v) { return {v.xi, v.gamma, v.tau, v.eta}; }

Expr apply_field(const VectorField& v, const Expr& f) {
  auto c = components(v);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < 4; ++i)
    if (!c[i].is_zero()) terms.push_back(c[i] * differentiate(f, kPointCoords[i]));
  return sum(std::move(terms));
}

RVec sparse_to_dense(const SparseRow& r, int n) {
  RVec v(static_cast<std::size_t>(n), Rational(0));
  for (const auto& [c, x] : r) v[static_cast<std::size_t>(c)] = x;
  return v;
}

bool is_zero_matrix(const RMat& m) {
  for (const auto& r : m)
    for (const auto& x : r)
      if (x != 0) return false;
  return true;
}

Rational factorial(int n) {
  Rational f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

VectorField commutator_fields(const VectorField& v, const VectorField& w) {
  auto cv = components(v), cw = components(w);
  std::array<Expr, 4> r;
  for (std::size_t i = 0; i < 4; ++i) r[i] = apply_field(v, cw[i]) - apply_field(w, cv[i]);
  return {r[0], r[1], r[2], r[3]};
}

std::optional<RVec> decompose(const VectorField& v, const std::vector<VectorField>& basis) {
  // One equation per (component, monomial in x, y, t, u).
  std::map<std::pair<int, Monomial>, RVec> rows;
  std::map<std::pair<int, Monomial>, Rational> rhs;
  std::size_t n = basis.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto c = components(basis[k]);
    for (int i = 0; i < 4; ++i) {
      Poly pc = poly_from_expr(c[static_cast<std::size_t>(i)]);
      for (const auto& [m, q] : pc.terms()) {
        auto& row = rows[{i, m}];
        if (row.empty()) row.assign(n, Rational(0));
        row[k] = q;
      }
    }
  }
  auto cv = components(v);
  for (int i = 0; i < 4; ++i) {
    Poly pc = poly_from_expr(cv[static_cast<std::size_t>(i)]);
    for (const auto& [m, q] : pc.terms()) {
      auto& row = rows[{i, m}];
      if (row.empty()) row.assign(n, Rational(0));
      rhs[{i, m}] = q;
    }
  }
  RMat A;
  RVec b;
  for (const auto& [key, row] : rows) {
    A.push_back(row);
    auto it = rhs.find(key);
    b.push_back(it == rhs.end() ? Rational(0) : it->second);
  }
  if (A.empty()) return RVec(n, Rational(0));
  auto sol = solve(A, b);
  return sol;
}

RVec StructureConstants::bracket(const RVec& x, const RVec& y) const {
  RVec r(static_cast<std::size_t>(dim_), Rational(0));
  for (int i = 0; i < dim_; ++i) {
    if (x[static_cast<std::size_t>(i)] == 0) continue;
    for (int j = 0; j < dim_; ++j) {
      Rational f = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
      if (f == 0) continue;
      for (int k = 0; k < dim_; ++k) r[static_cast<std::size_t>(k)] += f * at(i, j, k);
    }
  }
  return r;
}

bool StructureConstants::antisymmetric() const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        if (at(i, j, k) != -at(j, i, k)) return false;
  return true;
}

Rational StructureConstants::jacobi_defect() const {
  Rational worst(0);
  auto e = [&](int i) {
    RVec v(static_cast<std::size_t>(dim_), Rational(0));
    v[static_cast<std::size_t>(i)] = 1;
    return v;
  };
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        RVec a = bracket(e(i), bracket(e(j), e(k)));
        RVec b = bracket(e(j), bracket(e(k), e(i)));
        RVec c = bracket(e(k), bracket(e(i), e(j)));
        for (int m = 0; m < dim_; ++m) {
          Rational s = abs(a[static_cast<std::size_t>(m)] + b[static_cast<std::size_t>(m)] + c[static_cast<std::size_t>(m)]);
          if (s > worst) worst = s;
        }
      }
  return worst;
}

StructureConstants structure_from_fields(const std::vector<VectorField>& basis) {
  int n = static_cast<int>(basis.size());
  StructureConstants sc(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      VectorField br = commutator_fields(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
      auto c = decompose(br, basis);
      if (!c) throw NotClosed("commutator of basis fields " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                              " leaves the span");
      for (int k = 0; k < n; ++k) {
        sc.at(i, j, k) = (*c)[static_cast<std::size_t>(k)];
        sc.at(j, i, k) = -(*c)[static_cast<std::size_t>(k)];
      }
    }
  return sc;
}

std::vector<VectorField> kpbbm_generators(const Params& p) {
  p.validate();
  Expr x = sym("x"), y = sym("y"), t = sym("t"), u = sym("u");
  return {{x, y, Expr(-2) * t, u + Expr(Rational(1) / (2 * p.a))},
          {Expr(1), Expr(0), Expr(0), Expr(0)},
          {Expr(0), Expr(0), Expr(1), Expr(0)},
          {Expr(0), Expr(1), Expr(0), Expr(0)}};
}

std::vector<VectorField> kpbbm_symmetry_generators(const Params& p) {
  auto g = kpbbm_generators(p);
  g[0] = {Expr(0), rat(-1, 2) * sym("y"), -sym("t"), g[0].eta};
  return g;
}

StructureConstants kpbbm_algebra() { return structure_from_fields(kpbbm_generators(Params{})); }

DerivedSeries derived_series(const StructureConstants& sc) {
  int n = sc.dim();
  DerivedSeries ds;
  std::vector<RVec> basis;
  for (int i = 0; i < n; ++i) {
    RVec e(static_cast<std::size_t>(n), Rational(0));
    e[static_cast<std::size_t>(i)] = 1;
    basis.push_back(e);
  }
  ds.dims.push_back(n);
  while (!basis.empty()) {
    Echelon ech(n);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j) ech.add(sc.bracket(basis[i], basis[j]));
    std::vector<RVec> next;
    for (const auto& [p, r] : ech.rows()) next.push_back(sparse_to_dense(r, n));
    ds.dims.push_back(static_cast<int>(next.size()));
    if (next.size() == basis.size()) break;  // stationary: never reaches 0
    basis = std::move(next);
  }
  ds.solvable = ds.dims.back() == 0;
  return ds;
}

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  ExprMatrix c(n, std::vector<Expr>(m, Expr(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<Expr> terms;
      for (std::size_t l = 0; l < k; ++l) terms.push_back(a[i][l] * b[l][j]);
      c[i][j] = sum(std::move(terms));
    }
  return c;
}

ExprMatrix adjoint_matrix(const StructureConstants& sc, int i, const Expr& eps) {
  int n = sc.dim();
  if (i < 0 || i >= n) throw std::out_of_range("basis index out of range");
  RMat R(static_cast<std::size_t>(n), RVec(static_cast<std::size_t>(n), Rational(0)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) R[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = sc.at(i, j, k);

  ExprMatrix A(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n), Expr(0)));
  // Nilpotent: exp(-eps R) = sum_m (-eps)^m R^m / m!.
  std::vector<RMat> powers{identity(n)};
  while (static_cast<int>(powers.size()) <= n && !is_zero_matrix(powers.back())) powers.push_back(multiply(powers.back(), R));
  if (is_zero_matrix(powers.back())) {
    for (std::size_t m = 0; m < powers.size(); ++m) {
      Expr w = pow(-eps, static_cast<long>(m)) * Expr(Rational(1) / factorial(static_cast<int>(m)));
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const Rational& v = powers[m][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
          if (v != 0) A[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] += Expr(v) * w;
        }
    }
    return A;
  }

  // Characteristic polynomial by Faddeev-LeVerrier: det(zI - R) = sum c_m z^m.
  RVec charpoly(static_cast<std::size_t>(n + 1), Rational(0));
  charpoly[static_cast<std::size_t>(n)] = 1;
  RMat M = identity(n);
  for (int m = 1; m <= n; ++m) {
    RMat RM = multiply(R, M);
    Rational tr(0);
    for (int d = 0; d < n; ++d) tr += RM[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)];
    Rational cm = -tr / m;
    charpoly[static_cast<std::size_t>(n - m)] = cm;
    M = RM;
    for (int d = 0; d < n; ++d) M[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)] += cm;
  }
  auto roots = rational_roots(charpoly);
  RMat P(static_cast<std::size_t>(n), RVec());
  std::vector<Rational> eig;
  for (const auto& [lambda, mult] : roots) {
    RMat shifted = R;
    for (int d = 0; d < n; ++d) shifted[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)] -= lambda;
    auto vecs = nullspace(shifted, n);
    if (static_cast<int>(vecs.size()) != mult)
      throw UnsupportedAdjoint("ad matrix is neither nilpotent nor diagonalizable over the rationals");
    for (const auto& v : vecs) {
      for (int d = 0; d < n; ++d) P[static_cast<std::size_t>(d)].push_back(v[static_cast<std::size_t>(d)]);
      eig.push_back(lambda);
    }
  }
  if (static_cast<int>(eig.size()) != n) throw UnsupportedAdjoint("ad matrix has irrational eigenvalues");
  auto Pinv = inverse(P);
  if (!Pinv) throw UnsupportedAdjoint("eigenvector matrix is singular");
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      std::vector<Expr> terms;
      for (int m = 0; m < n; ++m) {
        Rational w = P[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] * (*Pinv)[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
        if (w != 0) terms.push_back(Expr(w) * exp(Expr(-eig[static_cast<std::size_t>(m)]) * eps));
      }
      A[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = sum(std::move(terms));
    }
  return A;
}

ExprMatrix global_adjoint(const StructureConstants& sc) {
  ExprMatrix g = adjoint_matrix(sc, 0, sym("eps1"));
  for (int i = 1; i < sc.dim(); ++i) g = multiply(g, adjoint_matrix(sc, i, sym("eps" + std::to_string(i + 1))));
  return g;
}

std::vector<std::vector<double>> evaluate(const ExprMatrix& m, const NumericBindings& at) {
  std::vector<std::vector<double>> r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& e : m[i]) r[i].push_back(eval_numeric(e, at));
  return r;
}

std::vector<Expr> apply_row(const std::vector<Expr>& row, const ExprMatrix& m) {
  std::vector<Expr> r(m.empty() ? 0 : m[0].size(), Expr(0));
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < row.size(); ++j) terms.push_back(row[j] * m[j][k]);
    r[k] = sum(std::move(terms));
  }
  return r;
}

std::vector<double> apply_row(const std::vector<double>& row, const std::vector<std::vector<double>>& m) {
  std::vector<double> r(m.empty() ? 0 : m[0].size(), 0.0);
  for (std::size_t k = 0; k < r.size(); ++k)
    for (std::size_t j = 0; j < row.size(); ++j) r[k] += row[j] * m[j][k];
  return r;
}

RVec adjoint_action(const RVec& a, const Rational& r, const Rational& eps2, const Rational& eps3, const Rational& eps4) {
  if (r <= 0) throw std::invalid_argument("exp(eps1) must be positive");
  return {a[0], -eps2 * a[0] + r * a[1], 2 * eps3 * a[0] + a[2] / (r * r), -eps4 * a[0] + r * a[3]};
}

std::array<double, 4> adjoint_action(const std::array<double, 4>& a, const std::array<double, 4>& eps) {
  double e1 = std::exp(eps[0]);
  return {a[0], -eps[1] * a[0] + e1 * a[1], 2 * eps[2] * a[0] + a[2] / (e1 * e1), -eps[3] * a[0] + e1 * a[3]};
}

// ---------------------------------------------------------------------------
// Invariants

InvariantAnalysis invariants(const StructureConstants& sc, std::optional<Rational> fixed_a1, int max_degree) {
  int n = sc.dim();
  InvariantAnalysis out;
  std::vector<VarId> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = intern("a" + std::to_string(i + 1));
  std::vector<int> free_idx;
  for (int i = fixed_a1 ? 1 : 0; i < n; ++i) {
    free_idx.push_back(i);
    out.variables.push_back("a" + std::to_string(i + 1));
  }

  // theta_k^(i) = sum_j a_j c(i, j, k): the coefficient of b_i in [W, U].
  std::vector<std::vector<Poly>> theta(static_cast<std::size_t>(n), std::vector<Poly>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Poly th;
      for (int j = 0; j < n; ++j) {
        if (sc.at(i, j, k) == 0) continue;
        Poly aj = (fixed_a1 && j == 0) ? Poly(*fixed_a1) : Poly::var(a[static_cast<std::size_t>(j)]);
        th += aj * sc.at(i, j, k);
      }
      theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = th;
    }

  for (int deg = 1; deg <= max_degree; ++deg) {
    // Monomials of exact degree deg in the free variables.
    std::vector<Monomial> monos;
    std::function<void(std::size_t, int, std::vector<std::pair<VarId, int>>&)> gen =
        [&](std::size_t pos, int left, std::vector<std::pair<VarId, int>>& acc) {
          if (pos == free_idx.size()) {
            if (left == 0) monos.push_back(make_monomial(acc));
            return;
          }
          for (int e = left; e >= 0; --e) {
            acc.emplace_back(a[static_cast<std::size_t>(free_idx[pos])], e);
            gen(pos + 1, left - e, acc);
            acc.pop_back();
          }
        };
    std::vector<std::pair<VarId, int>> acc;
    gen(0, deg, acc);

    std::map<std::pair<int, Monomial>, SparseRow> rows;
    for (std::size_t col = 0; col < monos.size(); ++col) {
      Poly m = Poly::term(1, monos[col]);
      for (int i = 0; i < n; ++i) {
        Poly image;
        for (int k : free_idx) {
          const Poly& th = theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
          if (!th.is_zero()) image += th * m.derivative(a[static_cast<std::size_t>(k)]);
        }
        for (const auto& [mm, c] : image.terms()) rows[{i, mm}][static_cast<int>(col)] += c;
      }
    }
    Echelon ech(static_cast<int>(monos.size()));
    for (auto& [key, r] : rows) ech.add(r);
    for (const auto& v : ech.nullspace()) {
      Poly p;
      for (std::size_t col = 0; col < monos.size(); ++col)
        if (v[col] != 0) p += Poly::term(v[col], monos[col]);
      out.polynomial_basis.push_back(p);
    }
  }

  // Ring generators: invariants of degree d not spanned by products of lower-degree generators.
  auto degree_of = [](const Poly& p) { return p.terms().begin()->first.total_degree(); };
  for (int deg = 1; deg <= max_degree; ++deg) {
    std::vector<Poly> span;
    std::function<void(std::size_t, int, const Poly&)> products = [&](std::size_t start, int left, const Poly& acc) {
      if (left == 0) {
        span.push_back(acc);
        return;
      }
      for (std::size_t g = start; g < out.ring_generators.size(); ++g) {
        int dg = degree_of(out.ring_generators[g]);
        if (dg <= left) products(g, left - dg, acc * out.ring_generators[g]);
      }
    };
    products(0, deg, Poly(1));
    std::map<Monomial, int> cols;
    auto to_row = [&](const Poly& p) {
      SparseRow r;
      for (const auto& [m, c] : p.terms()) {
        auto it = cols.try_emplace(m, static_cast<int>(cols.size())).first;
        r[it->second] = c;
      }
      return r;
    };
    std::vector<SparseRow> rows;
    for (const auto& p : span) rows.push_back(to_row(p));
    std::vector<Poly> candidates;
    for (const auto& p : out.polynomial_basis)
      if (degree_of(p) == deg) candidates.push_back(p);
    std::vector<SparseRow> cand_rows;
    for (const auto& p : candidates) cand_rows.push_back(to_row(p));
    Echelon ech(static_cast<int>(cols.size()) + 1);
    for (auto& r : rows) ech.add(r);
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (ech.add(cand_rows[c])) out.ring_generators.push_back(candidates[c]);
  }

  // Basic invariants: greedy by (variable count, degree, text), keeping those that raise the Jacobian rank.
  std::vector<Poly> order = out.ring_generators;
  std::sort(order.begin(), order.end(), [&](const Poly& p, const Poly& q) {
    auto key = [&](const Poly& r) { return std::make_tuple(r.variables().size(), degree_of(r), r.str()); };
    return key(p) < key(q);
  });
  std::map<VarId, Rational> point;
  const long sample[] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (std::size_t i = 0; i < free_idx.size(); ++i)
    point[a[static_cast<std::size_t>(free_idx[i])]] = Rational(sample[i % 8], static_cast<long>(i) + 2);
  Echelon jac(static_cast<int>(free_idx.size()));
  for (const auto& p : order) {
    RVec grad;
    for (int k : free_idx) grad.push_back(p.derivative(a[static_cast<std::size_t>(k)]).eval(point));
    if (jac.add(grad)) out.basic.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Optimal system

const char* to_string(OptimalTag tag) {
  switch (tag) {
    case OptimalTag::G1: return "Γ1";
    case OptimalTag::G2: return "Γ2";
    case OptimalTag::G3: return "Γ3";
    case OptimalTag::G4: return "Γ4";
    case OptimalTag::G2pG4: return "Γ2+Γ4";
    case OptimalTag::G2mG4: return "Γ2−Γ4";
    case OptimalTag::G3pG4: return "Γ3+Γ4";
    case OptimalTag::G3mG4: return "Γ3−Γ4";
    case OptimalTag::G2pG3pG4c: return "Γ2+Γ3+√cΓ4";
    case OptimalTag::mG2pG3pG4c: return "−Γ2+Γ3+√cΓ4";
  }
  return "?";
}

std::array<Rational, 4> tag_direction(OptimalTag tag) {
  switch (tag) {
    case OptimalTag::G1: return {1, 0, 0, 0};
    case OptimalTag::G2: return {0, 1, 0, 0};
    case OptimalTag::G3: return {0, 0, 1, 0};
    case OptimalTag::G4: return {0, 0, 0, 1};
    case OptimalTag::G2pG4: return {0, 1, 0, 1};
    case OptimalTag::G2mG4: return {0, 1, 0, -1};
    case OptimalTag::G3pG4: return {0, 0, 1, 1};
    case OptimalTag::G3mG4: return {0, 0, 1, -1};
    case OptimalTag::G2pG3pG4c: return {0, 1, 1, 1};
    case OptimalTag::mG2pG3pG4c: return {0, -1, 1, 1};
  }
  return {0, 0, 0, 0};
}

double orbit_residual(const RVec& a, const std::array<double, 4>& eps, double scale,
                      const std::array<double, 4>& representative) {
  std::array<double, 4> ad{a[0].get_d(), a[1].get_d(), a[2].get_d(), a[3].get_d()};
  auto img = adjoint_action(ad, eps);
  double r = 0;
  for (std::size_t i = 0; i < 4; ++i) r = std::max(r, std::abs(scale * img[i] - representative[i]));
  return r;
}

namespace {

// Fills epsilon 1 from e^{3 eps1} = r3 > 0, exactly when r3 is a rational cube.
std::optional<Rational> set_eps1_from_cube(Classification& c, const Rational& r3) {
  c.epsilons[0] = std::log(r3.get_d()) / 3.0;
  Rational root;
  bool exact = exact_root(r3, 3, root);
  if (exact && root == 1) {
    c.exact_epsilons[0] = Rational(0);
  } else {
    c.exact_epsilons[0].reset();
  }
  if (exact) return root;
  return std::nullopt;
}

}  // namespace

Classification classify(const RVec& a) {
  if (a.size() != 4) throw std::invalid_argument("algebra element needs 4 coordinates");
  if (a[0] == 0 && a[1] == 0 && a[2] == 0 && a[3] == 0) throw ZeroElement("zero element has no one-dimensional span");
  Classification c;
  c.input = a;
  for (std::size_t i = 1; i < 4; ++i) c.exact_epsilons[i] = Rational(0);
  c.exact_epsilons[0] = Rational(0);

  auto finish_exact = [&](const Rational& s, const std::array<Rational, 4>& rep) {
    c.exact_scale = s;
    c.scale = s.get_d();
    for (std::size_t i = 0; i < 4; ++i) {
      c.epsilons[i] = c.exact_epsilons[i] ? c.exact_epsilons[i]->get_d() : c.epsilons[i];
      c.representative[i] = rep[i].get_d();
    }
  };

  if (a[0] != 0) {
    // Normalize a1 to 1, then remove a2, a3, a4 with eps = (0, a2, -a3/2, a4) of the
    // normalized element; the same eps annihilate them on the unscaled element.
    Rational s = Rational(1) / a[0];
    c.tag = OptimalTag::G1;
    c.branch = "a1 != 0";
    c.printed_representative = "Γ1";
    c.exact_epsilons = {Rational(0), a[1] * s, -a[2] * s / 2, a[3] * s};
    finish_exact(s, tag_direction(c.tag));
    c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
    RVec img = adjoint_action(a, 1, *c.exact_epsilons[1], *c.exact_epsilons[2], *c.exact_epsilons[3]);
    for (std::size_t i = 0; i < 4; ++i)
      if (s * img[i] != tag_direction(c.tag)[i]) throw std::logic_error("normalization of a1 != 0 failed exact round trip");
    return c;
  }

  const Rational &a2 = a[1], &a3 = a[2], &a4 = a[3];
  if (a2 != 0 && a3 != 0) {
    // Scale so that a2^2 a3 = 1; the sign of Γ2 is sign(a2 a3) and the Γ4 entry is sign(a2 a3) a4 / a2.
    int sigma = sign(a2 * a3);
    Rational tau = sigma * a4 / a2;
    c.c = tau * tau;
    c.tag = sigma > 0 ? OptimalTag::G2pG3pG4c : OptimalTag::mG2pG3pG4c;
    c.branch = sigma > 0 ? "a1 = 0, a2^2 a3 != 0, a2 a3 > 0" : "a1 = 0, a2^2 a3 != 0, a2 a3 < 0";
    c.printed_representative = sigma > 0 ? "Γ2+Γ3+√cΓ4" : "−Γ2+Γ3+√cΓ4";
    if (tau < 0)
      throw OutsideOptimalList("element " + to_string(a2) + "Γ2+" + to_string(a3) + "Γ3+" + to_string(a4) +
                                       "Γ4 needs a negative square-root coefficient (a3 a4 < 0)",
                                   "a1 = 0, a2 a3 != 0, a3 a4 < 0");
    Rational r3 = sigma * a3 / a2;
    auto e1 = set_eps1_from_cube(c, r3);
    double e1d = std::exp(c.epsilons[0]);
    c.scale = sigma / (e1d * a2.get_d());
    if (e1) c.exact_scale = Rational(sigma) / (*e1 * a2);
    Rational root_c;
    double sqrt_c = std::sqrt(c.c->get_d());
    if (exact_sqrt(*c.c, root_c)) sqrt_c = root_c.get_d();
    c.representative = {0, static_cast<double>(sigma), 1, sqrt_c};
    c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
    return c;
  }
  if (a2 == 0 && a3 != 0 && a4 != 0) {
    int sigma = sign(a3 * a4);
    c.tag = sigma > 0 ? OptimalTag::G3pG4 : OptimalTag::G3mG4;
    c.branch = sigma > 0 ? "a1 = a2 = 0, a3 a4 > 0" : "a1 = a2 = 0, a3 a4 < 0";
    c.printed_representative = sigma > 0 ? "Γ3+Γ4" : "Γ3−Γ4";
    Rational r3 = sigma * a3 / a4;
    auto e1 = set_eps1_from_cube(c, r3);
    double e1d = std::exp(c.epsilons[0]);
    c.scale = e1d * e1d / a3.get_d();
    if (e1) c.exact_scale = *e1 * *e1 / a3;
    c.representative = {0, 0, 1, static_cast<double>(sigma)};
    c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
    return c;
  }
  if (a2 == 0 && a4 == 0) {
    c.tag = OptimalTag::G3;
    c.branch = a3 > 0 ? "a1 = a2 = a4 = 0, a3 > 0" : "a1 = a2 = a4 = 0, a3 < 0";
    c.printed_representative = a3 > 0 ? "Γ3" : "−Γ3";
    finish_exact(Rational(1) / a3, tag_direction(c.tag));
    c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
    return c;
  }
  // a3 == 0 from here on.
  if (a4 == 0) {
    c.tag = OptimalTag::G2;
    c.branch = a2 > 0 ? "a1 = a3 = a4 = 0, a2 > 0" : "a1 = a3 = a4 = 0, a2 < 0";
    c.printed_representative = a2 > 0 ? "Γ2" : "−Γ2";
    finish_exact(Rational(1) / a2, tag_direction(c.tag));
    c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
    return c;
  }
  if (a2 == 0) {
    c.tag = OptimalTag::G4;
    c.branch = a4 > 0 ? "a1 = a2 = a3 = 0, a4 > 0" : "a1 = a2 = a3 = 0, a4 < 0";
    c.printed_representative = a4 > 0 ? "Γ4" : "−Γ4";
    finish_exact(Rational(1) / a4, tag_direction(c.tag));
    c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
    return c;
  }
  // a2 a4 != 0, a1 = a3 = 0: the ratio a4 / a2 is preserved by every adjoint map and scaling.
  if (abs(a2) != abs(a4))
    throw OutsideOptimalList("element " + to_string(a2) + "Γ2+" + to_string(a4) +
                                     "Γ4 has orbit invariant a4/a2 = " + to_string(a4 / a2) + " outside {1, -1}",
                                 "a1 = a3 = 0, |a2| != |a4|");
  int sigma = sign(a2 * a4);
  c.tag = sigma > 0 ? OptimalTag::G2pG4 : OptimalTag::G2mG4;
  if (a2 > 0) {
    c.branch = a4 > 0 ? "a1 = a3 = 0, a2 > 0, a4 > 0" : "a1 = a3 = 0, a2 > 0, a4 < 0";
    c.printed_representative = a4 > 0 ? "Γ2+Γ4" : "Γ2−Γ4";
  } else if (a4 > 0) {
    c.branch = "a1 = a3 = 0, a2 < 0, a4 > 0";
    c.printed_representative = "−Γ2+Γ4";
  } else {
    c.branch = "a1 = a3 = 0, a2 < 0, a4 < 0";
    c.printed_representative = "Γ2−Γ4";
    c.note = "listed representative Γ2−Γ4 is not equivalent to −Γ2−Γ4; classified as Γ2+Γ4 (scaling by −1)";
  }
  finish_exact(Rational(1) / a2, tag_direction(c.tag));
  c.orbit_residual = orbit_residual(a, c.epsilons, c.scale, c.representative);
  return c;
}

}  // namespace kpbbm

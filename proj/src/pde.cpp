#include "kpbbm/pde.hpp"

#include "kpbbm/jet.hpp"

namespace kpbbm {

namespace {

const Expr kX = sym("x"), kY = sym("y"), kT = sym("t");

Expr d(const Expr& e, const char* v, int n = 1) { return differentiate(e, v, n); }

// Coefficients (c_alpha, c_beta) of d/dx, d/dy, d/dt acting on F(alpha, beta).
std::array<std::array<Rational, 2>, 3> chain_coefficients(Reduction r) {
  auto [al, be] = similarity_variables(r);
  std::array<std::array<Rational, 2>, 3> c;
  const char* names[3] = {"x", "y", "t"};
  for (int i = 0; i < 3; ++i) {
    c[static_cast<std::size_t>(i)][0] = d(al, names[i]).value();
    c[static_cast<std::size_t>(i)][1] = d(be, names[i]).value();
  }
  return c;
}

}  // namespace

void Params::validate() const {
  if (a == 0) throw std::invalid_argument("nonlinear coefficient a must be nonzero");
}

std::string Params::str() const {
  return "a=" + to_string(a) + " b=" + to_string(b) + " k=" + to_string(k);
}

Expr residual(const Expr& u, const Params& p) {
  Expr ux = d(u, "x"), uxx = d(ux, "x");
  Expr uxt = d(ux, "t");
  Expr A(p.a);
  return sum({uxt, uxx, Expr(2) * A * ux * ux, Expr(2) * A * u * uxx, Expr(p.b) * d(d(uxx, "x"), "t"),
              Expr(p.k) * d(u, "y", 2)});
}

Expr jet_form(const Params& p) {
  Expr A(p.a);
  return sum({jet("xt"), jet("xx"), Expr(2) * A * pow(jet("x"), 2), Expr(2) * A * sym("u") * jet("xx"),
              Expr(p.b) * jet("xxxt"), Expr(p.k) * jet("yy")});
}

const char* to_string(Reduction r) {
  switch (r) {
    case Reduction::R1: return "R1";
    case Reduction::R2: return "R2";
    case Reduction::R3: return "R3";
  }
  return "?";
}

Reduction parse_reduction(std::string_view s) {
  if (s == "R1" || s == "r1" || s == "sr1") return Reduction::R1;
  if (s == "R2" || s == "r2" || s == "sr2") return Reduction::R2;
  if (s == "R3" || s == "r3" || s == "sr3") return Reduction::R3;
  throw std::invalid_argument("unknown reduction '" + std::string(s) + "'");
}

std::array<Expr, 2> similarity_variables(Reduction r) {
  switch (r) {
    case Reduction::R1: return {kX - kY, kY - kT};
    case Reduction::R2: return {kX - kY, kX - kT};
    case Reduction::R3: return {kX - kT, kY - kT};
  }
  throw std::logic_error("bad reduction");
}

Expr reduced_residual(const Expr& F, const Params& p, Reduction r) {
  auto c = chain_coefficients(r);
  auto D = [&](const Expr& e, int dir) {
    return Expr(c[static_cast<std::size_t>(dir)][0]) * d(e, "alpha") + Expr(c[static_cast<std::size_t>(dir)][1]) * d(e, "beta");
  };
  enum { X = 0, Y = 1, T = 2 };
  Expr Fx = D(F, X), Fxx = D(Fx, X);
  Expr F2xx = D(D(F * F, X), X);
  return sum({D(Fx, T), Fxx, Expr(p.a) * F2xx, Expr(p.b) * D(D(Fxx, X), T), Expr(p.k) * D(D(F, Y), Y)});
}

Expr printed_reduced_residual(const Expr& F, const Params& p, Reduction r) {
  Expr a(p.a), b(p.b), k(p.k);
  auto Fd = [&](int na, int nb) { return d(d(F, "alpha", na), "beta", nb); };
  Expr F2 = F * F;
  auto F2d = [&](int na, int nb) { return d(d(F2, "alpha", na), "beta", nb); };
  switch (r) {
    case Reduction::R1:
      return sum({-Fd(1, 1), Fd(2, 0), a * F2d(2, 0), -b * Fd(3, 1), k * (Fd(2, 0) - Expr(2) * Fd(1, 1) + Fd(0, 2))});
    case Reduction::R2:
      return sum({(Expr(1) + k) * Fd(2, 0), Fd(1, 1), a * F2d(2, 0), Expr(2) * a * F2d(1, 1), a * F2d(0, 2), -b * Fd(3, 1),
                  Expr(-3) * b * Fd(2, 2), Expr(-3) * b * Fd(1, 3), -b * Fd(0, 4)});
    case Reduction::R3:
      return sum({k * Fd(0, 2), -Fd(1, 1), a * F2d(2, 0), -b * Fd(4, 0), -b * Fd(3, 1)});
  }
  throw std::logic_error("bad reduction");
}

Expr lift(const Expr& F, Reduction r) {
  auto [al, be] = similarity_variables(r);
  return substitute(F, {{"alpha", al}, {"beta", be}});
}

Expr traveling_residual(const Expr& f, const Params& p, const Rational& lambda, const Rational& omega) {
  Expr lin(1 - omega + p.k * lambda * lambda);
  return lin * f + Expr(p.a) * f * f - Expr(p.b * omega) * d(f, "z", 2);
}

ResidualReport check_solution(const Expr& u, const Params& p, std::uint64_t seed) {
  ResidualReport r{residual(u, p), {}};
  r.zero = zero_test(r.residual, seed);
  return r;
}

}  // namespace kpbbm

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpbbm/expr.hpp"
#include "kpbbm/linalg.hpp"
#include "kpbbm/pde.hpp"
#include "kpbbm/poly.hpp"
#include "kpbbm/zero_test.hpp"

namespace kpbbm {

struct DegenerateBalance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResonantIndex : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RecursionIncomplete : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// General: phi(x, y, t) with jets phi_x, phi_yt, ...; coefficients u_j(x, y, t).
// Kruskal: phi = x + psi(y, t), coefficients u_j(y, t), jets psi_y, psi_tt, ...
enum class Gauge { General, Kruskal };

// u = phi^alpha sum_j u_j phi^j. Coefficients are expressions in the jets of the
// manifold function; a coefficient left arbitrary at a resonance is the bare
// symbol U<j> (with jets U<j>_y, ...).
struct SingularExpansion {
  int alpha{-2};
  std::vector<Expr> coefficients;
  Expr manifold;
};

std::string series_coefficient_name(int j);  // "U<j>"

struct LeadingOrder {
  int alpha{0};
  Expr u0;  // in phi_x, phi_y, phi_t, ...
};
// Tries u = U0 phi^alpha for alpha = -1..-4 and keeps the exponent whose most
// singular coefficient has a nonzero root in U0.
LeadingOrder leading_order(const Params& p);

struct ResonancePolynomial {
  RVec coeffs;        // low to high in j, after removing factor
  Expr poly;          // in the symbol "j"
  Expr factor;        // b phi_x^3 phi_t
  std::vector<Rational> roots;  // with multiplicity, ascending
};
// Coefficient of u_j in the phi^(j-6) balance, with u_0 substituted, as a
// polynomial in j (interpolated at j = 1..5, confirmed at j = 6, 7).
ResonancePolynomial resonance_polynomial(const Params& p);

// Coefficient of phi^(j-6) after substituting u = sum_{m<=j} U<m> phi^(m-2) into
// the equation, with all U<m> symbolic.
Expr series_balance(int j, const Params& p, Gauge g);

// The printed recursion: (j+1)(j-4)(j-5)(j-6) b u_j phi_x^3 phi_t + [bracket],
// general gauge, U<m> symbolic.
Expr printed_recursion(int j, const Params& p);

struct RecursionComparison {
  Expr derived_linear;   // coefficient of U<j> with u_0 substituted
  Expr printed_linear;
  Expr derived_rest;     // everything without U<j>
  Expr printed_rest;
  Expr difference;       // derived_rest - printed_rest
  bool linear_agrees{false};
  bool rest_agrees{false};
};
RecursionComparison compare_recursion(int j, const Params& p);

enum class RecursionMode { Solve, Constraint };
// Kruskal gauge. Solve: u_j (ResonantIndex at 4, 5, 6). Constraint: the part of the
// balance free of u_j, whose vanishing is the compatibility condition at a resonance.
Expr recursion_step(int j, const SingularExpansion& expansion, const Params& p,
                    RecursionMode mode = RecursionMode::Solve);

// u_0..u_upto in the Kruskal gauge, resonant coefficients left arbitrary.
SingularExpansion kruskal_expansion(const Params& p, int upto);

struct CompatibilityReport {
  int j{0};
  bool satisfied{false};
  Expr condition;
  ZeroReport zero;
};
// j in {4, 5, 6}; other indices throw std::invalid_argument.
CompatibilityReport compatibility_check(int j, const SingularExpansion& expansion, const Params& p);
CompatibilityReport compatibility_check(int j, const Params& p);

// Balances phi^m of the equation with u = sum_j u_j phi^(j-2) (Kruskal gauge),
// keyed by m.
std::map<int, Expr> truncated_residual(const SingularExpansion& expansion, const Params& p);

}  // namespace kpbbm

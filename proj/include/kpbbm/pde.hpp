#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "kpbbm/expr.hpp"
#include "kpbbm/zero_test.hpp"

namespace kpbbm {

// Coefficients of (u_t + u_x + a (u^2)_x + b u_xxt)_x + k u_yy = 0.
struct Params {
  Rational a{1}, b{1}, k{1};

  // Throws std::invalid_argument when a == 0.
  void validate() const;
  std::string str() const;
};

// u_xt + u_xx + 2a u_x^2 + 2a u u_xx + b u_xxxt + k u_yy for u in (x, y, t).
Expr residual(const Expr& u, const Params& p);

// The same operator on jet coordinates u, u_x, ... (see jet.hpp).
Expr jet_form(const Params& p);

enum class Reduction { R1, R2, R3 };
const char* to_string(Reduction r);
Reduction parse_reduction(std::string_view s);

// Similarity variables (alpha, beta) as expressions in x, y, t:
// R1 (x - y, y - t), R2 (x - y, x - t), R3 (x - t, y - t).
std::array<Expr, 2> similarity_variables(Reduction r);

// The reduced equation for u = F(alpha, beta), derived by the chain rule from
// the directional coefficients of d/dx, d/dy, d/dt in (alpha, beta).
Expr reduced_residual(const Expr& F, const Params& p, Reduction r);

// The reduced equations in the form they are usually printed; kept separately
// so tests can confirm the chain-rule derivation agrees with them.
Expr printed_reduced_residual(const Expr& F, const Params& p, Reduction r);

// Lifts F(alpha, beta) to u(x, y, t).
Expr lift(const Expr& F, Reduction r);

// (1 - omega + k lambda^2) f + a f^2 - b omega f'' for f in z.
Expr traveling_residual(const Expr& f, const Params& p, const Rational& lambda, const Rational& omega);

struct ResidualReport {
  Expr residual;
  ZeroReport zero;
};

// Residual of u together with its zero-test verdict and numeric evidence.
ResidualReport check_solution(const Expr& u, const Params& p, std::uint64_t seed = 20240611);

}  // namespace kpbbm

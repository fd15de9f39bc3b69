#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kpbbm/expr.hpp"
#include "kpbbm/linalg.hpp"
#include "kpbbm/pde.hpp"

namespace kpbbm {

struct InvalidLambda : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ComplexWidth : std::domain_error {
  using std::domain_error::domain_error;
};
struct BalanceViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ComplexBeta : std::domain_error {
  using std::domain_error::domain_error;
};
struct DegenerateDispersion : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Family { SR1, SR2, SR3, HB, TANH };
const char* to_string(Family f);
Family parse_family(std::string_view s);

// u = background + amplitude * sech^2(kappa * (px x + py y + pt t) + shift).
struct SolutionSpec {
  Family family{Family::TANH};
  Params params;
  std::map<std::string, Rational> free;
  Expr expression;
  Expr amplitude;
  Expr kappa;
  std::array<Expr, 3> direction;
  Expr shift;
  Rational background{0};
  bool printed{false};  // literal published formula rather than the verified one
  std::vector<std::pair<std::string, Expr>> conditions;  // algebraic side conditions, each should be 0
};

// sech^2 travelling wave with phase direction (px, py, pt) on background u1.
// Zero solution when the dispersion relation constant vanishes.
SolutionSpec sech2_wave(const Params& p, const std::array<Rational, 3>& direction, const Rational& u1 = 0);

// Similarity-reduction solitons. The verified forms solve the equation; the
// printed ones are kept for discrepancy reports.
SolutionSpec build_sr_solution(Family family, const Rational& lambda, const Params& p);
SolutionSpec build_printed_sr_solution(Family family, const Rational& lambda, const Params& p);
std::array<Rational, 3> sr_direction(Family family, const Rational& lambda);

struct HBSolution {
  Expr beta_plus, beta_minus;
  Rational beta_squared;
  SolutionSpec plus, minus;
};
// Homogeneous balance with f = ln(phi), phi = 1 + exp(alpha x + beta y + alpha t + theta0).
HBSolution hb_solve(const Rational& alpha, const Rational& u1, const Rational& theta0, const Params& p);

struct TanhRoot {
  Rational d0, d1, omega;
};
struct TanhSystem {
  int balance{2};
  std::vector<Expr> equations;     // coefficients of Y^0..Y^4 in d0, d1, omega
  std::vector<TanhRoot> exact;     // nontrivial rational solutions (d0 != 0)
  std::vector<std::array<double, 3>> numeric;  // distinct least-squares roots from random starts
  bool cross_check{false};         // every numeric root matches an exact one to 1e-10
};
TanhSystem tanh_system(const Rational& lambda, const Params& p, unsigned starts = 64, std::uint64_t seed = 7);
SolutionSpec tanh_solve(const Rational& lambda, const Params& p);
// lim_{b -> inf} of the tanh amplitude.
Rational tanh_amplitude_limit(const Rational& lambda, const Params& p);

enum class BalanceKind { Tanh, HB };
// Pole/degree balance between the nonlinearity u^n (n = 2 for the equation) and
// the highest derivative term.
int balance_order(BalanceKind kind, int nonlinearity_power = 2);

struct WaveDiagnostics {
  Expr amplitude, width_scale, velocity;
  double amplitude_value{0}, width_value{0}, velocity_value{0};
};
WaveDiagnostics diagnostics(const SolutionSpec& s);

}  // namespace kpbbm

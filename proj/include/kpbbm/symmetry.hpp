#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kpbbm/jet.hpp"
#include "kpbbm/linalg.hpp"
#include "kpbbm/pde.hpp"
#include "kpbbm/poly.hpp"

namespace kpbbm {

// Raised when k = 0: u_yy cannot be eliminated. Carries the off-shell residual.
struct KZero : std::runtime_error {
  KZero(const std::string& what, Expr off_shell) : std::runtime_error(what), off_shell(std::move(off_shell)) {}
  Expr off_shell;
};

// eta^xt + eta^xx + 4a u_x eta^x + 2a u_xx eta + 2a u eta^xx + b eta^xxxt + k eta^yy.
Expr symmetry_condition_off_shell(const VectorField& v, const Params& p);
// The same with u_yy eliminated through the equation; throws KZero when k = 0.
Expr symmetry_condition(const VectorField& v, const Params& p);

// Polynomial ansatz of total degree <= degree in (x, y, t, u) for each of xi, gamma, tau, eta.
class SymmetryAnsatz {
 public:
  explicit SymmetryAnsatz(int degree);
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(4 * monomials_.size()); }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  // Coordinates of a polynomial field of degree <= degree in this ansatz.
  RVec coordinates(const VectorField& v) const;
  VectorField field(const RVec& coords) const;

 private:
  int degree_;
  std::vector<Monomial> monomials_;
};

struct DeterminingSystem {
  int unknowns{0};
  int equations{0};  // distinct jet/coordinate monomials collected
  int rank{0};
  std::vector<VectorField> basis;
};

// Substitutes the ansatz into the on-shell symmetry condition, collects the
// coefficient of every monomial in x, y, t and the jet coordinates and returns a
// basis of the rational solution space.
DeterminingSystem solve_determining(const Params& p, const SymmetryAnsatz& ansatz);

// Characteristic Q = eta - xi u_x - gamma u_y - tau u_t evaluated on u(x, y, t).
Expr characteristic(const VectorField& v, const Expr& u);

}  // namespace kpbbm

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpbbm/expr.hpp"
#include "kpbbm/jet.hpp"
#include "kpbbm/linalg.hpp"
#include "kpbbm/pde.hpp"
#include "kpbbm/poly.hpp"

namespace kpbbm {

// [v, w] = v(w) - w(v) for point vector fields in (x, y, t, u).
VectorField commutator_fields(const VectorField& v, const VectorField& w);

// Coordinates of v in the given basis, if v lies in its rational span.
std::optional<RVec> decompose(const VectorField& v, const std::vector<VectorField>& basis);

// c(i, j, k): [e_i, e_j] = sum_k c(i, j, k) e_k, indices from 0.
class StructureConstants {
 public:
  explicit StructureConstants(int dim) : dim_(dim), c_(static_cast<std::size_t>(dim * dim * dim)) {}
  int dim() const { return dim_; }
  Rational& at(int i, int j, int k) { return c_[index(i, j, k)]; }
  const Rational& at(int i, int j, int k) const { return c_[index(i, j, k)]; }
  RVec bracket(const RVec& x, const RVec& y) const;
  bool antisymmetric() const;
  // Largest |Jacobiator| entry; zero for a Lie algebra.
  Rational jacobi_defect() const;

 private:
  std::size_t index(int i, int j, int k) const { return static_cast<std::size_t>((i * dim_ + j) * dim_ + k); }
  int dim_;
  std::vector<Rational> c_;
};

struct NotClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structure constants of the span of the fields; throws NotClosed otherwise.
StructureConstants structure_from_fields(const std::vector<VectorField>& basis);

// x d/dx + y d/dy - 2t d/dt + (u + 1/(2a)) d/du, d/dx, d/dt, d/dy.
// This is the published basis. Its commutators are the ones tabulated, but the first
// field is not a symmetry of the equation (see kpbbm_symmetry_generators).
std::vector<VectorField> kpbbm_generators(const Params& p);
// Basis that actually solves the determining equations:
// -y/2 d/dy - t d/dt + (u + 1/(2a)) d/du, d/dx, d/dt, d/dy.
std::vector<VectorField> kpbbm_symmetry_generators(const Params& p);
StructureConstants kpbbm_algebra();

struct DerivedSeries {
  std::vector<int> dims;
  bool solvable{false};
};
DerivedSeries derived_series(const StructureConstants& sc);

using ExprMatrix = std::vector<std::vector<Expr>>;

struct UnsupportedAdjoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix of Ad_{exp(eps e_i)} acting on coordinate rows: row j holds the
// coordinates of Ad e_j. Computed as exp(-eps ad_i) by a terminating series when
// ad_i is nilpotent and by rational diagonalization otherwise.
ExprMatrix adjoint_matrix(const StructureConstants& sc, int i, const Expr& eps);
// A_1 A_2 ... A_n with symbols eps1..epsn.
ExprMatrix global_adjoint(const StructureConstants& sc);
ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b);
std::vector<std::vector<double>> evaluate(const ExprMatrix& m, const NumericBindings& at);
std::vector<Expr> apply_row(const std::vector<Expr>& row, const ExprMatrix& m);
std::vector<double> apply_row(const std::vector<double>& row, const std::vector<std::vector<double>>& m);

// The adjoint transformation of the kpbbm algebra with e^{eps1} = r rational:
// (a1, -eps2 a1 + r a2, 2 eps3 a1 + a3 / r^2, -eps4 a1 + r a4).
RVec adjoint_action(const RVec& a, const Rational& exp_eps1, const Rational& eps2, const Rational& eps3,
                    const Rational& eps4);
std::array<double, 4> adjoint_action(const std::array<double, 4>& a, const std::array<double, 4>& eps);

struct InvariantAnalysis {
  std::vector<std::string> variables;  // a1..an, minus any fixed coordinate
  std::vector<Poly> polynomial_basis;  // all invariant polynomials up to the degree bound
  std::vector<Poly> ring_generators;   // not polynomial in lower-degree invariants
  std::vector<Poly> basic;             // functionally independent subset
};

// Polynomial invariants of the adjoint action up to max_degree. When fixed_a1 is
// set, the first coordinate is frozen to that value and dropped.
InvariantAnalysis invariants(const StructureConstants& sc, std::optional<Rational> fixed_a1 = std::nullopt,
                             int max_degree = 4);

enum class OptimalTag { G1, G2, G3, G4, G2pG4, G2mG4, G3pG4, G3mG4, G2pG3pG4c, mG2pG3pG4c };
const char* to_string(OptimalTag tag);
std::array<Rational, 4> tag_direction(OptimalTag tag);  // with sqrt(c) factor omitted

struct ZeroElement : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised for elements in strata that the printed optimal list does not cover.
struct OutsideOptimalList : std::runtime_error {
  OutsideOptimalList(const std::string& what, std::string stratum)
      : std::runtime_error(what), stratum(std::move(stratum)) {}
  std::string stratum;
};

struct Classification {
  RVec input;
  OptimalTag tag{OptimalTag::G1};
  std::optional<Rational> c;           // only for the two c-families
  std::string branch;                  // decision-tree branch taken
  std::string printed_representative;  // representative as listed for that branch
  std::string note;                    // nonempty when listed and derived representatives differ
  double scale{1};                     // representative = scale * (input . A(eps))
  std::optional<Rational> exact_scale;
  std::array<double, 4> epsilons{};
  std::array<std::optional<Rational>, 4> exact_epsilons;
  std::array<double, 4> representative{};
  double orbit_residual{0};
};

Classification classify(const RVec& a);

// Numeric check: max |scale * (a . A(eps)) - representative|.
double orbit_residual(const RVec& a, const std::array<double, 4>& eps, double scale,
                      const std::array<double, 4>& representative);

}  // namespace kpbbm

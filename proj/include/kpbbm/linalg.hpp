#pragma once

#include <map>
#include <optional>
#include <vector>

#include "kpbbm/rational.hpp"

namespace kpbbm {

using RVec = std::vector<Rational>;
using RMat = std::vector<RVec>;
using SparseRow = std::map<int, Rational>;

// Incrementally maintained reduced row echelon form over the rationals.
// Rows are sparse, which suits the very sparse determining systems.
class Echelon {
 public:
  explicit Echelon(int ncols) : ncols_(ncols) {}

  // Returns true if the row was independent of the rows added so far.
  bool add(SparseRow row);
  bool add(const RVec& row);
  int rank() const { return static_cast<int>(rows_.size()); }
  int cols() const { return ncols_; }
  // Basis of {v : A v = 0}; one vector per free column, free entry 1.
  std::vector<RVec> nullspace() const;
  // Reduces a row against the current basis; zero result means it lies in the row space.
  SparseRow reduce(SparseRow row) const;
  const std::map<int, SparseRow>& rows() const { return rows_; }

 private:
  int ncols_;
  std::map<int, SparseRow> rows_;  // pivot column -> row with 1 at pivot
};

int rank(const RMat& m);
std::vector<RVec> nullspace(const RMat& m, int ncols);
// Solves A x = b; nullopt if inconsistent. Free variables are set to 0.
std::optional<RVec> solve(const RMat& a, const RVec& b);
RMat multiply(const RMat& a, const RMat& b);
RMat identity(int n);
// Inverse of a square matrix; nullopt if singular.
std::optional<RMat> inverse(const RMat& a);

// Rational roots with multiplicities of sum_i coeffs[i] z^i (coeffs low to high).
std::vector<std::pair<Rational, int>> rational_roots(RVec coeffs);

}  // namespace kpbbm

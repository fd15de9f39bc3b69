#pragma once

#include <string>
#include <vector>

#include "kpbbm/expr.hpp"

namespace kpbbm {

// Flattens an expression DAG into a straight-line program over doubles for
// repeated evaluation with a fixed variable order.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, std::vector<std::string> variables);
  double operator()(const double* values) const;
  double operator()(const std::vector<double>& values) const { return (*this)(values.data()); }
  const std::vector<std::string>& variables() const { return vars_; }

 private:
  struct Op {
    Kind kind;
    int first;   // index into args_ for n-ary, operand slot otherwise
    int count;
    long exponent;
    double constant;
  };
  std::vector<std::string> vars_;
  std::vector<Op> ops_;
  std::vector<int> args_;
  mutable std::vector<double> slots_;
};

}  // namespace kpbbm

#include "kpbbm/compiled.hpp"

#include <cmath>
#include <unordered_map>

namespace kpbbm {

CompiledExpr::CompiledExpr(const Expr& e, std::vector<std::string> variables) : vars_(std::move(variables)) {
  std::unordered_map<const void*, int> slot_of;
  std::unordered_map<std::string, int> var_index;
  for (std::size_t i = 0; i < vars_.size(); ++i) var_index[vars_[i]] = static_cast<int>(i);

  auto emit = [&](auto&& self, const Expr& x) -> int {
    if (auto it = slot_of.find(x.id()); it != slot_of.end()) return it->second;
    Op op{x.kind(), 0, 0, 0, 0.0};
    switch (x.kind()) {
      case Kind::Rational: op.constant = x.value().get_d(); break;
      case Kind::Symbol: {
        auto it = var_index.find(x.name());
        if (it == var_index.end()) throw UnboundSymbol(x.name());
        op.first = it->second;
        break;
      }
      case Kind::Sum:
      case Kind::Product: {
        std::vector<int> kids;
        for (const auto& o : x.operands()) kids.push_back(self(self, o));
        op.first = static_cast<int>(args_.size());
        op.count = static_cast<int>(kids.size());
        args_.insert(args_.end(), kids.begin(), kids.end());
        break;
      }
      case Kind::Pow:
        op.first = self(self, x.base());
        op.exponent = x.exponent();
        break;
      default: op.first = self(self, x.arg());
    }
    ops_.push_back(op);
    int slot = static_cast<int>(ops_.size()) - 1;
    slot_of[x.id()] = slot;
    return slot;
  };
  emit(emit, e);
  slots_.resize(ops_.size());
}

double CompiledExpr::operator()(const double* v) const {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    double r = 0;
    switch (op.kind) {
      case Kind::Rational: r = op.constant; break;
      case Kind::Symbol: r = v[op.first]; break;
      case Kind::Sum:
        for (int j = 0; j < op.count; ++j) r += slots_[args_[op.first + j]];
        break;
      case Kind::Product:
        r = 1;
        for (int j = 0; j < op.count; ++j) r *= slots_[args_[op.first + j]];
        break;
      case Kind::Pow: {
        double b = slots_[op.first];
        if (b == 0.0 && op.exponent < 0) throw DomainError("pole: zero base with negative exponent");
        r = std::pow(b, static_cast<double>(op.exponent));
        break;
      }
      case Kind::Exp: r = std::exp(slots_[op.first]); break;
      case Kind::Tanh: r = std::tanh(slots_[op.first]); break;
      case Kind::Sech: r = 1.0 / std::cosh(slots_[op.first]); break;
      case Kind::Cosh: r = std::cosh(slots_[op.first]); break;
      case Kind::Sqrt:
        if (slots_[op.first] < 0) throw DomainError("square root of a negative number");
        r = std::sqrt(slots_[op.first]);
        break;
    }
    slots_[i] = r;
  }
  return slots_.back();
}

}  // namespace kpbbm

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kpbbm/expr.hpp"
#include "kpbbm/poly.hpp"

namespace kpbbm {

enum class Direction { X = 0, Y = 1, T = 2 };
constexpr std::array<Direction, 3> kDirections{Direction::X, Direction::Y, Direction::T};
char letter(Direction d);
const std::string& coordinate(Direction d);  // "x", "y", "t"

constexpr int kMaxJetOrder = 6;

struct OrderOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MultiIndex {
  int x{0}, y{0}, t{0};
  int order() const { return x + y + t; }
  int operator[](Direction d) const { return d == Direction::X ? x : (d == Direction::Y ? y : t); }
  MultiIndex operator+(Direction d) const;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex multi_index(std::string_view letters);
// "u", "u_x", "u_xxt": letters always in x, y, t order.
std::string jet_name(const std::string& fn, const MultiIndex& m);
// Accepts any letter order (u_tx -> u, {x:1, t:1}).
std::optional<std::pair<std::string, MultiIndex>> parse_jet_name(std::string_view name);

Expr jet(const MultiIndex& m, const std::string& fn = "u");
Expr jet(std::string_view letters, const std::string& fn = "u");

// D_d on expressions over x, y, t and the jets of fn; other symbols are constants.
Expr total_derivative(const Expr& e, Direction d, const std::string& fn = "u");

// Point-symmetry generator xi d/dx + gamma d/dy + tau d/dt + eta d/du.
struct VectorField {
  Expr xi, gamma, tau, eta;

  const Expr& component(Direction d) const { return d == Direction::X ? xi : (d == Direction::Y ? gamma : tau); }
  // Throws std::invalid_argument if a component involves jet coordinates.
  void validate() const;
  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.xi == b.xi && a.gamma == b.gamma && a.tau == b.tau && a.eta == b.eta;
  }
};

enum class ProlongIndex { X, XX, Y, YY, XT, XXXT };
std::vector<Direction> prolong_path(ProlongIndex i);
const char* to_string(ProlongIndex i);

Expr prolongation_coefficient(const VectorField& v, ProlongIndex index);
Expr prolongation_coefficient(const VectorField& v, const std::vector<Direction>& path);

// eta^{J+d} = D_d eta^J - sum_k u_{J+k} D_d xi^k, iterated along path. Generic in
// the value type so the symmetry solver can run it on polynomials.
template <class V, class Deriv, class Jet>
V prolong(const std::array<V, 4>& components, const std::vector<Direction>& path, Deriv&& D, Jet&& jet_of) {
  V acc = components[3];
  MultiIndex j{};
  for (Direction d : path) {
    V next = D(acc, d);
    for (Direction k : kDirections) {
      V dk = D(components[static_cast<int>(k)], d);
      next = next - jet_of(j + k) * dk;
    }
    acc = next;
    j = j + d;
  }
  return acc;
}

// Total derivatives on Laurent polynomials whose variables are independent
// coordinates or jets of named functions with declared dependencies.
class PolyJetSpace {
 public:
  // deps maps function name -> directions it depends on.
  PolyJetSpace(std::vector<std::pair<std::string, std::vector<Direction>>> deps, bool explicit_coordinates);

  Poly D(const Poly& p, Direction d) const;
  VarId jet_var(const std::string& fn, const MultiIndex& m) const;
  Poly jet(const std::string& fn, const MultiIndex& m) const { return Poly::var(jet_var(fn, m)); }

 private:
  struct Image {
    bool one{false};
    bool zero{true};
    VarId var{0};
  };
  Image image(VarId v, Direction d) const;

  std::vector<std::pair<std::string, std::array<bool, 3>>> deps_;
  bool coords_;
  mutable std::unordered_map<std::uint64_t, Image> cache_;
};

}  // namespace kpbbm

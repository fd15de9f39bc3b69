#include "kpbbm/jet.hpp"

#include <algorithm>

namespace kpbbm {

char letter(Direction d) { return d == Direction::X ? 'x' : (d == Direction::Y ? 'y' : 't'); }

const std::string& coordinate(Direction d) {
  static const std::array<std::string, 3> names{"x", "y", "t"};
  return names[static_cast<int>(d)];
}

MultiIndex MultiIndex::operator+(Direction d) const {
  MultiIndex m = *this;
  if (d == Direction::X) ++m.x;
  if (d == Direction::Y) ++m.y;
  if (d == Direction::T) ++m.t;
  return m;
}

MultiIndex multi_index(std::string_view letters) {
  MultiIndex m;
  for (char c : letters) {
    if (c == 'x') ++m.x;
    else if (c == 'y') ++m.y;
    else if (c == 't') ++m.t;
    else throw std::invalid_argument("bad derivative letter '" + std::string(1, c) + "'");
  }
  return m;
}

std::string jet_name(const std::string& fn, const MultiIndex& m) {
  if (m.order() == 0) return fn;
  return fn + "_" + std::string(static_cast<std::size_t>(m.x), 'x') + std::string(static_cast<std::size_t>(m.y), 'y') +
         std::string(static_cast<std::size_t>(m.t), 't');
}

std::optional<std::pair<std::string, MultiIndex>> parse_jet_name(std::string_view name) {
  auto us = name.rfind('_');
  if (us == std::string_view::npos) return std::make_pair(std::string(name), MultiIndex{});
  std::string_view suffix = name.substr(us + 1);
  if (suffix.empty() || us == 0) return std::nullopt;
  for (char c : suffix)
    if (c != 'x' && c != 'y' && c != 't') return std::nullopt;
  return std::make_pair(std::string(name.substr(0, us)), multi_index(suffix));
}

Expr jet(const MultiIndex& m, const std::string& fn) { return Expr::symbol(jet_name(fn, m)); }
Expr jet(std::string_view letters, const std::string& fn) { return jet(multi_index(letters), fn); }

Expr total_derivative(const Expr& e, Direction d, const std::string& fn) {
  std::vector<Expr> terms{differentiate(e, coordinate(d))};
  for (const auto& s : free_symbols(e)) {
    auto parsed = parse_jet_name(s);
    if (!parsed || parsed->first != fn) continue;
    Expr ds = differentiate(e, s);
    if (ds.is_zero()) continue;
    if (parsed->second.order() >= kMaxJetOrder)
      throw OrderOverflow("total derivative of " + s + " exceeds jet order " + std::to_string(kMaxJetOrder));
    terms.push_back(jet(parsed->second + d, fn) * ds);
  }
  return sum(std::move(terms));
}

void VectorField::validate() const {
  for (const Expr* c : {&xi, &gamma, &tau, &eta})
    for (const auto& s : free_symbols(*c)) {
      auto parsed = parse_jet_name(s);
      if (parsed && parsed->first == "u" && parsed->second.order() > 0)
        throw std::invalid_argument("vector field component depends on jet coordinate " + s);
    }
}

std::vector<Direction> prolong_path(ProlongIndex i) {
  using D = Direction;
  switch (i) {
    case ProlongIndex::X: return {D::X};
    case ProlongIndex::XX: return {D::X, D::X};
    case ProlongIndex::Y: return {D::Y};
    case ProlongIndex::YY: return {D::Y, D::Y};
    case ProlongIndex::XT: return {D::X, D::T};
    case ProlongIndex::XXXT: return {D::X, D::X, D::X, D::T};
  }
  return {};
}

const char* to_string(ProlongIndex i) {
  switch (i) {
    case ProlongIndex::X: return "x";
    case ProlongIndex::XX: return "xx";
    case ProlongIndex::Y: return "y";
    case ProlongIndex::YY: return "yy";
    case ProlongIndex::XT: return "xt";
    case ProlongIndex::XXXT: return "xxxt";
  }
  return "?";
}

Expr prolongation_coefficient(const VectorField& v, const std::vector<Direction>& path) {
  v.validate();
  std::array<Expr, 4> comps{v.xi, v.gamma, v.tau, v.eta};
  return prolong(
      comps, path, [](const Expr& e, Direction d) { return total_derivative(e, d); },
      [](const MultiIndex& m) { return jet(m); });
}

Expr prolongation_coefficient(const VectorField& v, ProlongIndex index) {
  return prolongation_coefficient(v, prolong_path(index));
}

PolyJetSpace::PolyJetSpace(std::vector<std::pair<std::string, std::vector<Direction>>> deps, bool explicit_coordinates)
    : coords_(explicit_coordinates) {
  for (auto& [fn, ds] : deps) {
    std::array<bool, 3> mask{false, false, false};
    for (Direction d : ds) mask[static_cast<int>(d)] = true;
    deps_.emplace_back(fn, mask);
  }
}

VarId PolyJetSpace::jet_var(const std::string& fn, const MultiIndex& m) const { return intern(jet_name(fn, m)); }

PolyJetSpace::Image PolyJetSpace::image(VarId v, Direction d) const {
  std::uint64_t key = (static_cast<std::uint64_t>(v) << 2) | static_cast<std::uint64_t>(d);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  Image img;
  const std::string& name = var_name(v);
  if (coords_ && name == coordinate(d)) {
    img.zero = false;
    img.one = true;
  } else if (auto parsed = parse_jet_name(name)) {
    for (const auto& [fn, mask] : deps_)
      if (fn == parsed->first && mask[static_cast<int>(d)]) {
        img.zero = false;
        img.var = intern(jet_name(fn, parsed->second + d));
      }
  }
  cache_.emplace(key, img);
  return img;
}

Poly PolyJetSpace::D(const Poly& p, Direction d) const {
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
      auto [v, e] = m.factors[i];
      Image img = image(v, d);
      if (img.zero) continue;
      Monomial nm;
      nm.factors = m.factors;
      if (e == 1) {
        nm.factors.erase(nm.factors.begin() + static_cast<long>(i));
      } else {
        nm.factors[i].second = e - 1;
      }
      if (!img.one) nm = nm * make_monomial({{img.var, 1}});
      out += Poly::term(c * e, nm);
    }
  }
  return out;
}

}  // namespace kpbbm

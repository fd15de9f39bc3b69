#include <doctest.h>

#include <cmath>

#include "kpbbm/jet.hpp"
#include "kpbbm/zero_test.hpp"

using namespace kpbbm;

namespace {

Expr x = sym("x"), y = sym("y"), t = sym("t"), u = sym("u");

VectorField gamma1(const Rational& a) { return {x, y, Expr(-2) * t, u + Expr(Rational(1) / (2 * a))}; }

// Point transformation to first order in eps applied to the graph of f; returns
// d u_hat / d x_hat_d by the chain rule through the Jacobian of (x, y, t) -> hat.
double transformed_derivative(const VectorField& v, const Expr& f, Direction d, double eps, const NumericBindings& at) {
  Bindings on_graph{{"u", f}};
  std::array<double, 9> J{};
  std::array<double, 3> g{};
  for (int i = 0; i < 3; ++i) {
    Direction di = kDirections[static_cast<std::size_t>(i)];
    Expr comp_i = substitute(v.component(di), on_graph);
    for (int j = 0; j < 3; ++j) {
      const std::string& cj = coordinate(kDirections[static_cast<std::size_t>(j)]);
      double base = i == j ? 1.0 : 0.0;
      J[static_cast<std::size_t>(3 * i + j)] = base + eps * eval_numeric(differentiate(comp_i, cj), at);
    }
  }
  Expr eta = substitute(v.eta, on_graph);
  for (int j = 0; j < 3; ++j) {
    const std::string& cj = coordinate(kDirections[static_cast<std::size_t>(j)]);
    g[static_cast<std::size_t>(j)] = eval_numeric(differentiate(f, cj), at) + eps * eval_numeric(differentiate(eta, cj), at);
  }
  // Solve J^T h = g with J[i][j] = d hat_i / d coord_j.
  auto det3 = [](const std::array<double, 9>& m) {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
  };
  std::array<double, 9> JT{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) JT[static_cast<std::size_t>(3 * i + j)] = J[static_cast<std::size_t>(3 * j + i)];
  double D = det3(JT);
  int col = static_cast<int>(d);
  std::array<double, 9> M = JT;
  for (int r = 0; r < 3; ++r) M[static_cast<std::size_t>(3 * r + col)] = g[static_cast<std::size_t>(r)];
  return det3(M) / D;
}

double first_order_prediction(const VectorField& v, const Expr& f, Direction d, double eps, const NumericBindings& at) {
  Expr coeff = prolongation_coefficient(v, std::vector<Direction>{d});
  Bindings jets{{"u", f}};
  for (Direction k : kDirections) jets[jet_name("u", MultiIndex{} + k)] = differentiate(f, coordinate(k));
  return eval_numeric(differentiate(f, coordinate(d)), at) + eps * eval_numeric(substitute(coeff, jets), at);
}

}  // namespace

TEST_CASE("jet names are canonical") {
  CHECK(jet_name("u", multi_index("txt")) == "u_xtt");
  auto p = parse_jet_name("u_tx");
  REQUIRE(p);
  CHECK(p->first == "u");
  CHECK(p->second.x == 1);
  CHECK(p->second.t == 1);
  CHECK_FALSE(parse_jet_name("theta_0"));
  CHECK(jet("xt") == jet("tx"));
}

TEST_CASE("total derivative examples") {
  CHECK(total_derivative(u, Direction::X) == jet("x"));
  CHECK(total_derivative(u * jet("x"), Direction::X) == pow(jet("x"), 2) + u * jet("xx"));
  CHECK(total_derivative(x * jet("t"), Direction::T) == x * jet("tt"));
  Expr e = pow(u, 2) * jet("y") + x * t * jet("x");
  CHECK(total_derivative(total_derivative(e, Direction::X), Direction::Y) ==
        total_derivative(total_derivative(e, Direction::Y), Direction::X));
  CHECK_THROWS_AS(total_derivative(jet("xxxxxx"), Direction::T), OrderOverflow);
  CHECK_NOTHROW(total_derivative(jet("xxxxx"), Direction::T));
}

TEST_CASE("prolongation coefficients") {
  VectorField g2{Expr(1), Expr(0), Expr(0), Expr(0)};
  CHECK(prolongation_coefficient(g2, ProlongIndex::X) == Expr(0));
  VectorField g1 = gamma1(1);
  CHECK(prolongation_coefficient(g1, ProlongIndex::X) == Expr(0));
  CHECK(prolongation_coefficient(g1, ProlongIndex::XT) == Expr(2) * jet("xt"));
  // Scaling weights with x, y weight 1, t weight -2, u weight 1: u_xx, u_yy -> -1, u_xxxt -> 0.
  CHECK(prolongation_coefficient(g1, ProlongIndex::XX) == -jet("xx"));
  CHECK(prolongation_coefficient(g1, ProlongIndex::YY) == -jet("yy"));
  CHECK(prolongation_coefficient(g1, ProlongIndex::XXXT) == Expr(0));
  CHECK(prolongation_coefficient(g1, ProlongIndex::Y) == Expr(0));

  // eta^xxx via the same recursion appears inside eta^xxxt; check the cubic-in-u field against a direct expansion.
  VectorField cubic{Expr(0), Expr(0), Expr(0), pow(u, 3)};
  Expr e3 = prolongation_coefficient(cubic, std::vector<Direction>{Direction::X, Direction::X, Direction::X});
  Expr direct = Expr(3) * pow(u, 2) * jet("xxx") + Expr(18) * u * jet("x") * jet("xx") + Expr(6) * pow(jet("x"), 3);
  CHECK(e3 == direct);

  VectorField bad{jet("x"), Expr(0), Expr(0), Expr(0)};
  CHECK_THROWS_AS(prolongation_coefficient(bad, ProlongIndex::X), std::invalid_argument);
}

TEST_CASE("constant vector fields have zero prolongation") {
  for (int i = 0; i < 5; ++i) {
    VectorField v{rat(i + 1), rat(-i), rat(2 * i - 3), rat(i, 3)};
    for (auto idx : {ProlongIndex::X, ProlongIndex::XX, ProlongIndex::Y, ProlongIndex::YY, ProlongIndex::XT, ProlongIndex::XXXT})
      CHECK(prolongation_coefficient(v, idx) == Expr(0));
  }
}

TEST_CASE("first prolongation matches the transformed derivative to second order") {
  Expr f = tanh(x + rat(1, 2) * y - rat(1, 3) * t) + rat(1, 5) * pow(x, 2) * y;
  std::vector<VectorField> fields{gamma1(1),
                                  {pow(x, 2), x * y, t * u, u * x},
                                  {y * u, t, pow(u, 2), x - t * u}};
  NumericBindings at{{"x", 0.3}, {"y", -0.4}, {"t", 0.7}};
  for (const auto& v : fields)
    for (Direction d : kDirections) {
      double eps = 1e-3;
      double e1 = std::abs(transformed_derivative(v, f, d, eps, at) - first_order_prediction(v, f, d, eps, at));
      double e2 = std::abs(transformed_derivative(v, f, d, eps / 2, at) - first_order_prediction(v, f, d, eps / 2, at));
      // Second-order error: halving eps divides it by about 4.
      CHECK(e1 < 1e-4);
      CHECK(e2 == doctest::Approx(e1 / 4).epsilon(0.05));
    }
}

TEST_CASE("poly jet space total derivative") {
  PolyJetSpace js({{"u", {Direction::X, Direction::Y, Direction::T}}, {"psi", {Direction::Y, Direction::T}}}, true);
  Poly p = Poly::var("u") * js.jet("u", multi_index("x")) + Poly::var("x") * js.jet("psi", multi_index("y"));
  Poly dx = js.D(p, Direction::X);
  CHECK(dx == js.jet("u", multi_index("x")).pow(2) + Poly::var("u") * js.jet("u", multi_index("xx")) + js.jet("psi", multi_index("y")));
  Poly dt = js.D(Poly::var("psi"), Direction::T);
  CHECK(dt == js.jet("psi", multi_index("t")));
  CHECK(js.D(Poly::var("psi"), Direction::X).is_zero());
}

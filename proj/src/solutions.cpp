#include "kpbbm/solutions.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kpbbm/poly.hpp"

namespace kpbbm {

namespace {

Expr x_() { return sym("x"); }
Expr y_() { return sym("y"); }
Expr t_() { return sym("t"); }

Expr phase(const std::array<Expr, 3>& d) { return d[0] * x_() + d[1] * y_() + d[2] * t_(); }

SolutionSpec sech2_from(const Params& p, Family f, const Rational& amplitude, const Rational& kappa2,
                        const std::array<Rational, 3>& dir, const Rational& u1) {
  SolutionSpec s;
  s.family = f;
  s.params = p;
  s.background = u1;
  s.direction = {Expr(dir[0]), Expr(dir[1]), Expr(dir[2])};
  s.shift = Expr(0);
  if (amplitude == 0) {
    s.amplitude = Expr(0);
    s.kappa = Expr(0);
    s.expression = Expr(u1);
    return s;
  }
  if (kappa2 <= 0) throw ComplexWidth("sech argument would be complex: kappa^2 = " + kappa2.get_str());
  s.amplitude = Expr(amplitude);
  s.kappa = sqrt(Expr(kappa2));
  s.expression = Expr(u1) + s.amplitude * pow(sech(s.kappa * phase(s.direction)), 2);
  return s;
}

void require_sr_family(Family f) {
  if (f != Family::SR1 && f != Family::SR2 && f != Family::SR3)
    throw std::invalid_argument(std::string("not a similarity-reduction family: ") + to_string(f));
}

// Univariate polynomial in v as coefficients low to high.
RVec univariate(const Poly& p, VarId v) {
  RVec c(static_cast<std::size_t>(std::max(0, p.max_degree(v)) + 1), Rational(0));
  for (const auto& [m, q] : p.terms()) {
    if (m.factors.size() > 1 || (m.factors.size() == 1 && m.factors[0].first != v))
      throw std::logic_error("expected a univariate polynomial");
    c[static_cast<std::size_t>(m.degree(v))] += q;
  }
  return c;
}

Poly det3(const std::array<std::array<Poly, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct TanhFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::vector<Poly> eqs;
  std::vector<std::array<Poly, 3>> grads;
  std::array<VarId, 3> vars;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(eqs.size()); }
  std::map<VarId, double> point(const Eigen::VectorXd& v) const {
    return {{vars[0], v[0]}, {vars[1], v[1]}, {vars[2], v[2]}};
  }
  int operator()(const Eigen::VectorXd& v, Eigen::VectorXd& f) const {
    auto pt = point(v);
    for (std::size_t i = 0; i < eqs.size(); ++i) f[static_cast<Eigen::Index>(i)] = eqs[i].eval(pt);
    return 0;
  }
  int df(const Eigen::VectorXd& v, Eigen::MatrixXd& j) const {
    auto pt = point(v);
    for (std::size_t i = 0; i < eqs.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k)
        j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = grads[i][k].eval(pt);
    return 0;
  }
};

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::SR1: return "SR1";
    case Family::SR2: return "SR2";
    case Family::SR3: return "SR3";
    case Family::HB: return "HB";
    case Family::TANH: return "TANH";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Family f : {Family::SR1, Family::SR2, Family::SR3, Family::HB, Family::TANH})
    if (u == to_string(f)) return f;
  throw std::invalid_argument("unknown solution family '" + std::string(s) + "'");
}

SolutionSpec sech2_wave(const Params& p, const std::array<Rational, 3>& d, const Rational& u1) {
  p.validate();
  if (p.b == 0) throw std::invalid_argument("b = 0: no sech^2 wave");
  const Rational &px = d[0], &py = d[1], &pt = d[2];
  if (px * pt == 0) throw InvalidLambda("phase direction has vanishing x or t component");
  Rational C = px * pt + (1 + 2 * p.a * u1) * px * px + p.k * py * py;
  Rational kappa2 = -C / (4 * p.b * px * px * px * pt);
  Rational amp = -3 * C / (2 * p.a * px * px);
  return sech2_from(p, Family::TANH, amp, kappa2, d, u1);
}

std::array<Rational, 3> sr_direction(Family f, const Rational& l) {
  require_sr_family(f);
  if (f == Family::SR1) return {1, l - 1, -l};
  if (f == Family::SR2) return {1 + l, -1, -l};
  return {1, l, -(l + 1)};
}

SolutionSpec build_sr_solution(Family f, const Rational& lambda, const Params& p) {
  require_sr_family(f);
  if ((f == Family::SR2 || f == Family::SR3) && lambda == -1) throw InvalidLambda("lambda = -1 is excluded");
  SolutionSpec s;
  try {
    s = sech2_wave(p, sr_direction(f, lambda), 0);
  } catch (const InvalidLambda&) {
    throw InvalidLambda("lambda = " + lambda.get_str() + " makes the phase degenerate for " + to_string(f));
  }
  s.family = f;
  s.free = {{"lambda", lambda}};
  return s;
}

SolutionSpec build_printed_sr_solution(Family f, const Rational& l, const Params& p) {
  require_sr_family(f);
  p.validate();
  const Rational &a = p.a, &b = p.b, &k = p.k;
  if ((f == Family::SR2 || f == Family::SR3) && l == -1) throw InvalidLambda("lambda = -1 is excluded");
  if ((f == Family::SR1 || f == Family::SR2) && l == 0) throw InvalidLambda("lambda = 0 divides by zero");
  if (b == 0) throw std::invalid_argument("b = 0: no sech^2 wave");
  Rational amp, kappa2;
  switch (f) {
    case Family::SR1:
      amp = 3 * (l - 1) * (k * l - k - 1) / (2 * a);
      kappa2 = (l - 1) * (k * l - k - 1) / (4 * b * l);
      break;
    case Family::SR2: {
      Rational r = 2 + k + l - l * l;
      amp = -3 * r / (2 * a * (1 + l) * (1 + l));
      kappa2 = r / (4 * b * l * (1 + l) * (1 + l) * (1 + l));
      break;
    }
    default:
      amp = 3 * (k * l * l - l) / (2 * a);
      kappa2 = (k * l * l - l) / (4 * b * (l + 1));
  }
  SolutionSpec s = sech2_from(p, f, amp, kappa2, sr_direction(f, l), 0);
  s.free = {{"lambda", l}};
  s.printed = true;
  return s;
}

HBSolution hb_solve(const Rational& alpha, const Rational& u1, const Rational& theta0, const Params& p) {
  p.validate();
  if (p.a != 6 * p.b) throw BalanceViolation("f = ln(phi) balances only when a = 6b (a = " + p.a.get_str() + ", b = " + p.b.get_str() + ")");
  if (p.k == 0) throw std::invalid_argument("k = 0: beta is undetermined");
  const Rational &b = p.b, &k = p.k;
  Rational a2 = alpha * alpha;
  Rational rad = -(2 * a2 + 12 * b * a2 * u1 + b * a2 * a2) / k;
  if (rad < 0) throw ComplexBeta("beta^2 = " + rad.get_str() + " < 0");
  HBSolution out;
  out.beta_squared = rad;
  out.beta_plus = sqrt(Expr(rad));
  out.beta_minus = -out.beta_plus;
  auto build = [&](const Expr& beta) {
    SolutionSpec s;
    s.family = Family::HB;
    s.params = p;
    s.free = {{"alpha", alpha}, {"u1", u1}, {"theta0", theta0}};
    s.background = u1;
    Expr al(alpha);
    s.direction = {al, beta, al};
    s.shift = Expr(theta0 / 2);
    s.kappa = rat(1, 2);
    s.amplitude = Expr(a2 / 4);
    Expr theta = phase(s.direction) + Expr(theta0);
    s.expression = Expr(a2) * pow(Expr(2) + Expr(2) * cosh(theta), -1) + Expr(u1);
    // Algebraic conditions with constant u1 (u1_x = u1_xx = 0).
    Expr A(alpha), B(b), K(k), U(u1);
    Expr base = Expr(2) * pow(A, 4) + Expr(12) * B * pow(A, 4) * U + B * pow(A, 6) + K * pow(A, 2) * pow(beta, 2);
    s.conditions = {{"alpha^4 balance", base},
                    {"alpha^4 balance, 6x", Expr(6) * base},
                    {"alpha^4 balance, 7x", Expr(7) * base},
                    {"alpha^4 balance, repeated", base},
                    {"background residual", residual(U, p)}};
    return s;
  };
  out.plus = build(out.beta_plus);
  out.minus = build(out.beta_minus);
  return out;
}

TanhSystem tanh_system(const Rational& lambda, const Params& p, unsigned starts, std::uint64_t seed) {
  p.validate();
  TanhSystem sys;
  sys.balance = balance_order(BalanceKind::Tanh);
  VarId Y = intern("tanh_Y"), D0 = intern("d0"), D1 = intern("d1"), W = intern("omega");
  Poly y = Poly::var(Y), d0 = Poly::var(D0), d1 = Poly::var(D1), w = Poly::var(W), one(1);
  Poly S = d0 * (one - y) * (one + d1 * y);
  Poly Sy = S.derivative(Y), Syy = Sy.derivative(Y);
  Poly E = (one - w + Poly(p.k * lambda * lambda)) * S + Poly(p.a) * S * S + Poly(2 * p.b) * w * y * (one - y * y) * Sy -
           Poly(p.b) * w * (one - y * y).pow(2) * Syy;
  std::vector<Poly> eqs;
  for (int i = 0; i <= 4; ++i) {
    Poly c;
    for (const auto& [m, q] : E.terms())
      if (m.degree(Y) == i) c += Poly::term(q, make_monomial({{D0, m.degree(D0)}, {D1, m.degree(D1)}, {W, m.degree(W)}}));
    eqs.push_back(c);
    sys.equations.push_back(c.to_expr());
  }

  // Each equation is d0 (alpha_i(d1) + omega beta_i(d1) + d0 gamma_i(d1)).
  std::vector<std::array<Poly, 3>> M;
  for (const auto& e : eqs) {
    std::array<Poly, 3> row;
    for (const auto& [m, q] : e.terms()) {
      int e0 = m.degree(D0), ew = m.degree(W);
      Poly rest = Poly::term(q, make_monomial({{D1, m.degree(D1)}}));
      if (e0 == 1 && ew == 0) row[0] += rest;
      else if (e0 == 1 && ew == 1) row[1] += rest;
      else if (e0 == 2 && ew == 0) row[2] += rest;
      else throw std::logic_error("tanh system is not of the expected shape");
    }
    M.push_back(row);
  }
  std::vector<Poly> minors;
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = i + 1; j < M.size(); ++j)
      for (std::size_t k = j + 1; k < M.size(); ++k) {
        Poly m = det3({M[i], M[j], M[k]});
        if (!m.is_zero()) minors.push_back(m);
      }
  if (minors.empty()) throw std::logic_error("tanh system is degenerate for every d1");
  std::vector<Rational> candidates;
  RVec first = univariate(minors.front(), D1);
  for (const auto& [r, mult] : rational_roots(first)) candidates.push_back(r);
  if (first[0] == 0) candidates.push_back(Rational(0));
  for (const Rational& c1 : candidates) {
    std::map<VarId, Rational> at{{D1, c1}};
    bool common = std::all_of(minors.begin(), minors.end(), [&](const Poly& m) { return m.partial_eval(at).is_zero(); });
    if (!common) continue;
    RMat A;
    RVec rhs;
    for (const auto& row : M) {
      A.push_back({row[1].partial_eval(at).constant_term(), row[2].partial_eval(at).constant_term()});
      rhs.push_back(-row[0].partial_eval(at).constant_term());
    }
    if (rank(A) < 2) continue;  // a family in (omega, d0); not produced for this equation
    auto sol = solve(A, rhs);
    if (!sol || (*sol)[1] == 0) continue;
    sys.exact.push_back({(*sol)[1], c1, (*sol)[0]});
  }

  // Independent numeric cross-check.
  TanhFunctor fn;
  fn.vars = {D0, D1, W};
  for (const auto& e : eqs) {
    fn.eqs.push_back(e);
    fn.grads.push_back({e.derivative(D0), e.derivative(D1), e.derivative(W)});
  }
  std::mt19937_64 rng(seed);
  // Roots can be far from the origin; draw magnitudes log-uniformly in [0.1, 1000].
  std::uniform_real_distribution<double> mag(-1.0, 3.0), sgn(-1.0, 1.0);
  auto draw = [&] { return std::copysign(std::pow(10.0, mag(rng)), sgn(rng)); };
  for (unsigned s = 0; s < starts; ++s) {
    Eigen::VectorXd v(3);
    v << draw(), draw(), draw();
    Eigen::LevenbergMarquardt<TanhFunctor> lm(fn);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 4000;
    lm.minimize(v);
    Eigen::VectorXd f(fn.values());
    fn(v, f);
    if (!v.allFinite() || f.norm() > 1e-11 || std::abs(v[0]) < 1e-6) continue;
    std::array<double, 3> r{v[0], v[1], v[2]};
    bool seen = std::any_of(sys.numeric.begin(), sys.numeric.end(), [&](const std::array<double, 3>& q) {
      return std::abs(q[0] - r[0]) + std::abs(q[1] - r[1]) + std::abs(q[2] - r[2]) < 1e-7;
    });
    if (!seen) sys.numeric.push_back(r);
  }
  auto close = [](const std::array<double, 3>& q, const TanhRoot& e) {
    return std::abs(q[0] - e.d0.get_d()) <= 1e-10 * (1 + std::abs(e.d0.get_d())) &&
           std::abs(q[1] - e.d1.get_d()) <= 1e-10 * (1 + std::abs(e.d1.get_d())) &&
           std::abs(q[2] - e.omega.get_d()) <= 1e-10 * (1 + std::abs(e.omega.get_d()));
  };
  bool numeric_in_exact = std::all_of(sys.numeric.begin(), sys.numeric.end(), [&](const auto& q) {
    return std::any_of(sys.exact.begin(), sys.exact.end(), [&](const TanhRoot& e) { return close(q, e); });
  });
  bool exact_found = std::all_of(sys.exact.begin(), sys.exact.end(), [&](const TanhRoot& e) {
    return std::any_of(sys.numeric.begin(), sys.numeric.end(), [&](const auto& q) { return close(q, e); });
  });
  sys.cross_check = numeric_in_exact && exact_found;
  return sys;
}

SolutionSpec tanh_solve(const Rational& lambda, const Params& p) {
  p.validate();
  if (4 * p.b + 1 == 0) throw DegenerateDispersion("b = -1/4: omega is undefined");
  if (p.b == 0) throw DegenerateDispersion("b = 0: no nontrivial tanh solution");
  TanhSystem sys = tanh_system(lambda, p);
  auto it = std::find_if(sys.exact.begin(), sys.exact.end(), [](const TanhRoot& r) { return r.d1 == 1; });
  if (it == sys.exact.end()) throw std::logic_error("tanh system has no root with d1 = 1");
  SolutionSpec s;
  s.family = Family::TANH;
  s.params = p;
  s.free = {{"lambda", lambda}, {"omega", it->omega}};
  s.direction = {Expr(1), Expr(-lambda), Expr(-it->omega)};
  s.kappa = Expr(1);
  s.shift = Expr(0);
  s.amplitude = Expr(it->d0);
  Expr z = phase(s.direction);
  // d0 (1 - Y)(1 + Y) = d0 sech^2 z
  s.expression = s.amplitude * pow(sech(z), 2);
  s.conditions = {{"traveling", traveling_residual(s.amplitude * pow(sech(sym("z")), 2), p, lambda, it->omega)},
                  {"cross-check", Expr(sys.cross_check ? 0 : 1)}};
  return s;
}

Rational tanh_amplitude_limit(const Rational& lambda, const Params& p) {
  p.validate();
  // -6 b (1 + k l^2) / (a (1 + 4b)) -> -6 (1 + k l^2) / (4a)
  return Rational(-3) * (1 + p.k * lambda * lambda) / (2 * p.a);
}

int balance_order(BalanceKind kind, int n) {
  if (n < 2) throw std::invalid_argument("nonlinearity power must be at least 2");
  for (int J = 1; J <= 16; ++J) {
    int nonlinear = 0, dispersive = 0;
    if (kind == BalanceKind::Tanh) {
      // S = Y^J in (1 - w + k l^2) S + a S^n + 2 b w Y (1 - Y^2) S' - b w (1 - Y^2)^2 S''
      VarId Y = intern("tanh_Y");
      Poly y = Poly::var(Y), S = Poly::var(Y, J), one(1);
      Poly disp = y * (one - y * y) * S.derivative(Y) - (one - y * y).pow(2) * S.derivative(Y).derivative(Y);
      nonlinear = S.pow(static_cast<unsigned>(n)).max_degree(Y);
      dispersive = disp.max_degree(Y);
    } else {
      // u = d^p f(phi)/dx^p carries phi_x^p; each x or t derivative adds one (phi_t ~ phi_x).
      // u^(n-1) u_xx against b u_xxxt.
      nonlinear = (n - 1) * J + (J + 2);
      dispersive = J + 4;
    }
    if (nonlinear == dispersive) return J;
    if (nonlinear > dispersive) break;
  }
  throw std::invalid_argument("no integer balance for nonlinearity power " + std::to_string(n));
}

WaveDiagnostics diagnostics(const SolutionSpec& s) {
  WaveDiagnostics d;
  d.amplitude = s.amplitude;
  d.velocity = -s.direction[2] * pow(s.direction[0], -1);
  d.amplitude_value = eval_numeric(d.amplitude, {});
  d.velocity_value = eval_numeric(d.velocity, {});
  if (s.kappa.is_zero()) {
    d.width_scale = Expr(0);
    d.width_value = std::numeric_limits<double>::infinity();
  } else {
    d.width_scale = pow(s.kappa * s.direction[0], -1);
    d.width_value = eval_numeric(d.width_scale, {});
  }
  return d;
}

}  // namespace kpbbm

// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "kpbbm/liealg.hpp"
#include "kpbbm/numerics.hpp"
#include "kpbbm/painleve.hpp"
#include "kpbbm/poly.hpp"
#include "kpbbm/solutions.hpp"
#include "kpbbm/symmetry.hpp"
#include "kpbbm/zero_test.hpp"

using namespace kpbbm;

namespace {

struct Outcome {
  bool pass{true};
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational nonzero_rational(std::mt19937_64& rng) {
  Rational q(0);
  while (q == 0) q = random_rational(rng, 7, 4);
  return q;
}

void painleve(Outcome& o) {
  auto t0 = Clock::now();
  Params p{1, 1, 1};
  ResonancePolynomial rp = resonance_polynomial(p);
  o.require(rp.roots == std::vector<Rational>{-1, 4, 5, 6}, "resonances {-1,4,5,6}");
  o.detail << "resonances {";
  for (std::size_t i = 0; i < rp.roots.size(); ++i) o.detail << (i ? "," : "") << to_string(rp.roots[i]);
  o.detail << "}; ";
  for (int j : {4, 5, 6}) {
    CompatibilityReport c = compatibility_check(j, p);
    bool witnessed = !c.satisfied && c.zero.verdict == ZeroVerdict::Nonzero && !c.zero.witness.empty() &&
                     std::abs(c.zero.witness_value) > kNumericZeroTol;
    o.require(witnessed, "j=" + std::to_string(j) + " violated with witness");
    o.detail << "j=" << j << " " << (c.satisfied ? "Satisfied" : "Violated") << " (witness value " << c.zero.witness_value
             << "); ";
  }
  double secs = seconds_since(t0);
  o.require(secs < 60, "runtime < 60 s");
  o.detail << "runtime " << secs << " s";
}

int span_rank(const std::vector<VectorField>& a, const std::vector<VectorField>& b, const SymmetryAnsatz& ans) {
  RMat m;
  for (const auto& v : a) m.push_back(ans.coordinates(v));
  for (const auto& v : b) m.push_back(ans.coordinates(v));
  return rank(m);
}

void symmetries(Outcome& o) {
  Params p{1, 1, 1};
  SymmetryAnsatz ans(1);
  DeterminingSystem sys = solve_determining(p, ans);
  o.require(sys.basis.size() == 4, "4-dimensional basis");
  bool all_zero = true;
  for (const auto& v : sys.basis) all_zero = all_zero && is_identically_zero(symmetry_condition(v, p));
  o.require(all_zero, "each basis element satisfies the symmetry condition");
  auto listed = kpbbm_generators(p);
  int listed_rank = span_rank(listed, {}, ans), combined = span_rank(sys.basis, listed, ans);
  o.require(listed_rank == 4 && combined == 4, "span equals the listed Γ1..Γ4");
  int verified = span_rank(sys.basis, kpbbm_symmetry_generators(p), ans);
  o.detail << "basis dim " << sys.basis.size() << ", conditions " << (all_zero ? "all zero" : "NOT all zero")
           << "; rank(basis + listed Γ1..Γ4) = " << combined << ", rank(basis + verified generators) = " << verified;
  if (!o.pass) {
    Expr residual_g1 = symmetry_condition(listed[0], p);
    o.detail << "; listed Γ1 = x∂x + y∂y − 2t∂t + (u+1/(2a))∂u leaves on-shell residual with "
             << node_count(residual_g1)
             << " nodes (3u_xt + u_xx + 2a u_x² + 2a u u_xx + b u_xxxt); the solved span replaces it by "
                "−½y∂y − t∂t + (u+1/(2a))∂u";
  }
}

void algebra(Outcome& o) {
  StructureConstants sc = kpbbm_algebra();
  int expected_first_row[4] = {0, -1, 2, -1};  // [Γ1,Γj] = c_j Γj, other brackets vanish
  bool table = true;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        int target = 0;
        if (i == 0 && j == k) target = expected_first_row[j];
        if (j == 0 && i == k) target = -expected_first_row[i];
        table = table && sc.at(i, j, k) == target;
      }
  o.require(table, "commutator table");
  Expr eps = sym("eps"), z(0), one(1);
  std::array<ExprMatrix, 4> A{
      ExprMatrix{{one, z, z, z}, {z, exp(eps), z, z}, {z, z, exp(Expr(-2) * eps), z}, {z, z, z, exp(eps)}},
      ExprMatrix{{one, -eps, z, z}, {z, one, z, z}, {z, z, one, z}, {z, z, z, one}},
      ExprMatrix{{one, z, Expr(2) * eps, z}, {z, one, z, z}, {z, z, one, z}, {z, z, z, one}},
      ExprMatrix{{one, z, z, -eps}, {z, one, z, z}, {z, z, one, z}, {z, z, z, one}}};
  bool adj = true;
  for (int i = 0; i < 4; ++i) adj = adj && adjoint_matrix(sc, i, eps) == A[static_cast<std::size_t>(i)];
  o.require(adj, "adjoint matrices A1..A4");
  Expr e1 = sym("eps1"), e2 = sym("eps2"), e3 = sym("eps3"), e4 = sym("eps4");
  ExprMatrix G{{one, -e2, Expr(2) * e3, -e4}, {z, exp(e1), z, z}, {z, z, exp(Expr(-2) * e1), z}, {z, z, z, exp(e1)}};
  o.require(global_adjoint(sc) == G, "global adjoint product");
  DerivedSeries ds = derived_series(sc);
  o.require(ds.dims == std::vector<int>{4, 3, 0} && ds.solvable, "derived series [4,3,0], solvable");
  o.detail << "table " << (table ? "matches" : "differs") << "; A1..A4 " << (adj ? "match" : "differ")
           << "; product matrix " << (global_adjoint(sc) == G ? "matches" : "differs") << "; derived series [";
  for (std::size_t i = 0; i < ds.dims.size(); ++i) o.detail << (i ? "," : "") << ds.dims[i];
  o.detail << "] " << (ds.solvable ? "solvable" : "not solvable");
}

void invariants_check(Outcome& o) {
  StructureConstants sc = kpbbm_algebra();
  auto full = invariants(sc);
  auto slice = invariants(sc, Rational(0));
  Poly a1 = Poly::var("a1"), a2 = Poly::var("a2"), a3 = Poly::var("a3"), a4 = Poly::var("a4");
  o.require(full.basic.size() == 1 && full.basic[0] == a1, "full invariant a1");
  std::set<std::string> got, want{(a2.pow(2) * a3).str(), (a4.pow(2) * a3).str()};
  for (const auto& q : slice.basic) got.insert(q.str());
  o.require(got == want, "sliced invariants {a2²a3, a4²a3}");
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1);
  double worst = 0;
  for (int orbit = 0; orbit < 100; ++orbit) {
    std::array<double, 4> a{U(rng), U(rng), U(rng), U(rng)}, e{U(rng), U(rng), U(rng), U(rng)};
    auto img = adjoint_action(a, e);
    worst = std::max(worst, std::abs(img[0] - a[0]));
    std::array<double, 4> s{0, a[1], a[2], a[3]};
    auto is = adjoint_action(s, e);
    worst = std::max(worst, std::abs(is[1] * is[1] * is[2] - s[1] * s[1] * s[2]));
    worst = std::max(worst, std::abs(is[3] * is[3] * is[2] - s[3] * s[3] * s[2]));
  }
  o.require(worst <= 1e-12, "orbit checks constant to 1e-12");
  o.detail << "full {" << full.basic[0].str() << "}, sliced {";
  bool first = true;
  for (const auto& s : got) {
    o.detail << (first ? "" : ", ") << s;
    first = false;
  }
  o.detail << "}; max orbit drift over 100 orbits " << worst;
}

void optimal_system(Outcome& o) {
  std::mt19937_64 rng(77);
  int mapped = 0, gaps = 0, zero = 0;
  double worst = 0;
  std::map<std::string, int> gap_strata;
  for (int n = 0; n < 1000; ++n) {
    RVec a{random_rational(rng, 3, 3), random_rational(rng, 3, 3), random_rational(rng, 3, 3), random_rational(rng, 3, 3)};
    try {
      Classification c = classify(a);
      worst = std::max(worst, c.orbit_residual);
      ++mapped;
    } catch (const ZeroElement&) {
      ++zero;
    } catch (const OutsideOptimalList& e) {
      ++gaps;
      ++gap_strata[e.stratum];
    }
  }
  o.require(gaps == 0, "every nonzero element maps to the 10-member list");
  o.require(worst <= 1e-10, "orbit round-trip residual <= 1e-10");
  struct Worked {
    RVec a;
    std::string representative;
  };
  std::vector<Worked> worked{{{1, 5, -3, 2}, "Γ1"}, {{0, 1, 1, 1}, "Γ2+Γ3+√cΓ4"}, {{0, 0, 1, 1}, "Γ3+Γ4"}, {{0, -2, 0, 0}, "−Γ2"}};
  bool cases = true;
  for (const auto& w : worked) {
    Classification c = classify(w.a);
    cases = cases && c.printed_representative == w.representative && c.orbit_residual == 0;
  }
  Classification case1 = classify({1, 5, -3, 2});
  cases = cases && case1.exact_epsilons[0] == Rational(0) && case1.exact_epsilons[1] == Rational(5) &&
          case1.exact_epsilons[2] == Rational(3, 2) && case1.exact_epsilons[3] == Rational(2);
  o.require(cases, "worked cases (a1 != 0; a2, a3 > 0; a2 = 0 with a3, a4 > 0; only a2 < 0) reproduce the listed representatives");
  o.detail << "1000 random elements: " << mapped << " mapped (max residual " << worst << "), " << zero << " zero, " << gaps
           << " outside the list";
  for (const auto& [stratum, count] : gap_strata) o.detail << " [" << stratum << ": " << count << "]";
  o.detail << "; worked cases " << (cases ? "reproduced" : "differ");
  if (gaps > 0)
    o.detail << "; these strata are adjoint orbits the listed ten representatives do not reach (a3 a4 < 0 needs a negative "
                "√c coefficient; a1 = a3 = 0 keeps a4/a2 fixed)";
}

bool residual_vanishes(const SolutionSpec& s, std::string& verdict) {
  ZeroReport z = zero_test(residual(s.expression, s.params));
  verdict = to_string(z.verdict);
  return z.zero();
}

void solutions(Outcome& o) {
  Params fig1{1, 1, 1}, fig4{-1, 1, 1};
  struct Item {
    std::string name;
    SolutionSpec verified, printed;
  };
  HBSolution hb = hb_solve(1, -1, 0, Params{6, 1, 1});
  std::vector<Item> items{
      {"SR1 λ=3", build_sr_solution(Family::SR1, 3, fig1), build_printed_sr_solution(Family::SR1, 3, fig1)},
      {"SR2 λ=2", build_sr_solution(Family::SR2, 2, fig1), build_printed_sr_solution(Family::SR2, 2, fig1)},
      {"SR3 λ=2", build_sr_solution(Family::SR3, 2, fig1), build_printed_sr_solution(Family::SR3, 2, fig1)},
      {"HB", hb.plus, hb.plus},
      {"tanh", tanh_solve(1, fig4), tanh_solve(1, fig4)}};
  bool verified_ok = true, printed_ok = true;
  for (const auto& it : items) {
    std::string vv, pv;
    bool v = residual_vanishes(it.verified, vv), pr = residual_vanishes(it.printed, pv);
    verified_ok = verified_ok && v;
    printed_ok = printed_ok && pr;
    o.detail << it.name << ": derived " << vv << ", published " << pv << "; ";
  }
  o.require(verified_ok, "derived closed forms have zero residual");
  o.require(printed_ok, "published closed forms have zero residual");
  SolutionSpec sr3 = build_sr_solution(Family::SR3, 2, fig1);
  SolutionSpec sr3p = build_printed_sr_solution(Family::SR3, 2, fig1);
  o.require(sr3.amplitude == Expr(3), "SR3 amplitude = 3 at (k,λ,a) = (1,2,1)");
  SolutionSpec t = tanh_solve(1, fig4);
  WaveDiagnostics dt = diagnostics(t);
  o.require(t.amplitude == Expr(Rational(12, 5)) && dt.velocity == Expr(Rational(2, 5)), "tanh amplitude 12/5, ω = 2/5");
  o.require(hb.beta_plus == Expr(3) && hb.beta_minus == Expr(-3), "HB β = ±3");
  o.detail << "SR3 amplitude derived " << to_string(sr3.amplitude) << ", published " << to_string(sr3p.amplitude)
           << "; tanh amplitude " << to_string(t.amplitude) << ", ω " << to_string(dt.velocity) << "; HB β = "
           << to_string(hb.beta_plus) << ", " << to_string(hb.beta_minus);
}

void solvers(Outcome& o) {
  std::mt19937_64 rng(11);
  int checked = 0;
  bool exact = true;
  while (checked < 20) {
    Params p{nonzero_rational(rng), nonzero_rational(rng), random_rational(rng, 5, 3)};
    if (4 * p.b + 1 == 0) continue;
    Rational l = random_rational(rng, 5, 3);
    TanhSystem sys = tanh_system(l, p);
    Rational omega = (1 + p.k * l * l) / (1 + 4 * p.b);
    bool ok = sys.exact.size() == 1 && sys.exact[0].d1 == 1 && sys.exact[0].omega == omega &&
              sys.exact[0].d0 == -6 * p.b * omega / p.a && sys.cross_check;
    exact = exact && ok;
    ++checked;
  }
  o.require(exact, "tanh roots exact for 20 random parameter sets");
  int jt = balance_order(BalanceKind::Tanh), ph = balance_order(BalanceKind::HB);
  int jt3 = balance_order(BalanceKind::Tanh, 3), ph3 = balance_order(BalanceKind::HB, 3);
  o.require(jt == 2 && ph == 2, "J = 2 and p = 2");
  o.require(jt3 == 1 && ph3 == 1, "cubic negative control gives 1");
  o.detail << checked << " random sets solved exactly with numeric cross-check; J=" << jt << ", p=" << ph
           << "; cubic control J=" << jt3 << ", p=" << ph3;
}

void numerics(Outcome& o) {
  auto t0 = Clock::now();
  Params fig4{-1, 1, 1};
  SolutionSpec s = tanh_solve(1, fig4);
  double order = convergence_order(s.expression, fig4, SampleWindow{}, 0.05);
  o.require(std::abs(order - 2.0) <= 0.2, "convergence order 2.0 ± 0.2");
  auto grid = [&](double t) { return sample_periodized(s.expression, 128, 128, 30, 30, t, 1, 0, 2); };
  auto hist = integrate_history(grid(0), SimParams::from(fig4), 10, 0.01, 11);
  double err = max_abs_difference(hist.back().grid, grid(10));
  double speed = measure_speed(hist);
  o.require(err <= 1e-3, "soliton error <= 1e-3 at t = 10");
  o.require(std::abs(speed - 0.4) <= 0.004, "speed 0.4 ± 1%");
  double secs = seconds_since(t0);
  o.require(secs < 300, "under 5 minutes");
  o.detail << "order " << order << "; soliton max error " << err << " at t=10 (128² periodic, steps " << hist.back().steps
           << "); speed " << speed << "; " << secs << " s";
}

void properties(Outcome& o) {
  std::mt19937_64 rng(5);
  bool amp = true, width = true, phase = true;
  for (Family f : {Family::SR1, Family::SR2, Family::SR3}) {
    Rational l = f == Family::SR1 ? Rational(3) : Rational(2);
    Params base{1, 1, 2};
    SolutionSpec s0 = build_sr_solution(f, l, base);
    for (int i = 0; i < 10; ++i) {
      Rational a = nonzero_rational(rng);
      Rational b = random_rational(rng, 7, 4);
      if (b <= 0) b = -b + 1;
      SolutionSpec sa = build_sr_solution(f, l, Params{a, base.b, base.k});
      SolutionSpec sb = build_sr_solution(f, l, Params{base.a, b, base.k});
      amp = amp && sa.amplitude * Expr(a) == s0.amplitude * Expr(base.a);
      width = width && zero_test(sb.kappa * sqrt(Expr(b)) - s0.kappa * sqrt(Expr(base.b))).zero();
      phase = phase && sa.direction == s0.direction && sb.direction == s0.direction;
    }
  }
  Params p{-1, 1, 1};
  bool monotone = true;
  double prev_amp = -1e300, prev_v = 1e300;
  for (int i = 1; i <= 20; ++i) {
    p.b = Rational(i, 4);
    WaveDiagnostics d = diagnostics(tanh_solve(1, p));
    monotone = monotone && d.amplitude_value > prev_amp && d.velocity_value < prev_v;
    prev_amp = d.amplitude_value;
    prev_v = d.velocity_value;
  }
  o.require(amp, "amplitude · a constant");
  o.require(width, "sech coefficient · √b constant");
  o.require(monotone, "tanh amplitude up, velocity down over 20 b values");
  o.require(phase, "SR phase independent of a and b");
  o.detail << "amplitude ∝ 1/a " << (amp ? "exact" : "fails") << "; width ∝ √b (coefficient ∝ 1/√b) "
           << (width ? "exact" : "fails") << "; tanh monotone in b " << (monotone ? "yes" : "no") << "; phase "
           << (phase ? "independent" : "depends") << " of a, b";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  std::vector<Criterion> criteria{{1, "Painlevé", painleve},         {2, "Symmetries", symmetries},
                                  {3, "Algebra tables", algebra},      {4, "Invariants", invariants_check},
                                  {5, "Optimal system", optimal_system}, {6, "Solutions", solutions},
                                  {7, "Solvers", solvers},             {8, "Numerics", numerics},
                                  {9, "Property suites", properties}};
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail.str() << std::endl;
  }
  std::cout << (9 - failed) << "/9 criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}

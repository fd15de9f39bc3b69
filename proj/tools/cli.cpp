#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kpbbm/compiled.hpp"
#include "kpbbm/liealg.hpp"
#include "kpbbm/numerics.hpp"
#include "kpbbm/painleve.hpp"
#include "kpbbm/pde.hpp"
#include "kpbbm/solutions.hpp"
#include "kpbbm/symmetry.hpp"
#include "kpbbm/zero_test.hpp"

namespace kpbbm::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20240611;

// A JSON result and whether every check that has to hold did.
struct Report {
  json body;
  bool verified{true};
};

struct ParamOptions {
  std::string a{"1"}, b{"1"}, k{"1"};
  Params get() const {
    Params p{parse_rational(a), parse_rational(b), parse_rational(k)};
    p.validate();
    return p;
  }
};

void add_params(CLI::App* sub, ParamOptions& po) {
  sub->add_option("--a", po.a, "nonlinearity coefficient a (p/q)")->capture_default_str();
  sub->add_option("--b", po.b, "dispersion coefficient b (p/q)")->capture_default_str();
  sub->add_option("--k", po.k, "transverse coefficient k (p/q)")->capture_default_str();
}

std::string str(const Expr& e) { return to_string(e); }
std::string str(const Rational& q) { return to_string(q); }

json params_json(const Params& p) { return {{"a", str(p.a)}, {"b", str(p.b)}, {"k", str(p.k)}}; }

json zero_json(const ZeroReport& z) {
  json j{{"verdict", to_string(z.verdict)}, {"points", z.points}, {"max_abs", z.max_abs}};
  if (!z.zero()) {
    json w = json::object();
    for (const auto& [name, v] : z.witness) w[name] = v;
    j["witness"] = w;
    j["witness_value"] = z.witness_value;
  }
  return j;
}

json field_json(const VectorField& v) {
  return {{"xi", str(v.xi)}, {"gamma", str(v.gamma)}, {"tau", str(v.tau)}, {"eta", str(v.eta)}};
}

std::string combination(const RVec& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    Rational q = c[i];
    bool neg = q < 0;
    if (neg) q = -q;
    if (!s.empty()) s += neg ? " - " : " + ";
    else if (neg) s += "-";
    if (q != 1) s += str(q) + " ";
    s += "Γ" + std::to_string(i + 1);
  }
  return s.empty() ? "0" : s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void emit(const json& j, std::ostream& out, const std::string& path) {
  std::string text = j.dump(2) + "\n";
  if (path.empty()) out << text;
  else write_text(path, text);
}

void emit_text(const std::string& text, std::ostream& out, const std::string& path) {
  if (path.empty()) out << text;
  else write_text(path, text);
}

// ---- painleve

Report painleve_report(const Params& p) {
  Report r;
  LeadingOrder lo = leading_order(p);
  ResonancePolynomial rp = resonance_polynomial(p);
  json roots = json::array();
  for (const Rational& q : rp.roots) roots.push_back(str(q));
  json recursion = json::array();
  for (int j = 1; j <= 6; ++j) {
    RecursionComparison c = compare_recursion(j, p);
    recursion.push_back({{"j", j}, {"linear_agrees", c.linear_agrees}, {"rest_agrees", c.rest_agrees}});
  }
  json compat = json::array();
  for (int j : {4, 5, 6}) {
    CompatibilityReport c = compatibility_check(j, p);
    compat.push_back({{"j", j},
                      {"verdict", c.satisfied ? "Satisfied" : "Violated"},
                      {"zero_test", zero_json(c.zero)},
                      {"condition_nodes", node_count(c.condition)}});
  }
  r.body = {{"params", params_json(p)},
            {"gauge", "Kruskal phi = x + psi(y, t)"},
            {"leading_order", {{"alpha", lo.alpha}, {"u0", str(lo.u0)}}},
            {"resonance_polynomial", str(rp.poly)},
            {"resonance_factor", str(rp.factor)},
            {"resonances", roots},
            {"recursion_vs_printed", recursion},
            {"compatibility", compat}};
  return r;
}

// ---- symmetries

Report symmetries_report(const Params& p, int degree, std::uint64_t seed) {
  Report r;
  SymmetryAnsatz ans(degree);
  DeterminingSystem sys = solve_determining(p, ans);
  auto span_rank = [&](const std::vector<VectorField>& a, const std::vector<VectorField>& b) {
    RMat m;
    for (const auto& v : a) m.push_back(ans.coordinates(v));
    for (const auto& v : b) m.push_back(ans.coordinates(v));
    return rank(m);
  };
  bool on_shell = true;
  auto condition = [&](const VectorField& v) {
    try {
      return zero_test(symmetry_condition(v, p), seed);
    } catch (const KZero& e) {
      on_shell = false;
      return zero_test(e.off_shell, seed);
    }
  };
  auto check = [&](const VectorField& v) { return zero_json(condition(v)); };
  json basis = json::array();
  for (const auto& v : sys.basis) {
    ZeroReport z = condition(v);
    r.verified = r.verified && z.zero();
    basis.push_back({{"field", field_json(v)}, {"condition", zero_json(z)}});
  }
  auto listed = [&](const std::vector<VectorField>& gens) {
    json arr = json::array();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      json item{{"name", "Γ" + std::to_string(i + 1)}, {"field", field_json(gens[i])}, {"condition", check(gens[i])}};
      Expr off = symmetry_condition_off_shell(gens[i], p);
      if (!is_identically_zero(off)) item["off_shell_residual"] = str(off);
      arr.push_back(item);
    }
    return arr;
  };
  auto printed = kpbbm_generators(p);
  auto verified = kpbbm_symmetry_generators(p);
  r.body = {{"params", params_json(p)},
            {"degree", degree},
            {"unknowns", sys.unknowns},
            {"equations", sys.equations},
            {"rank", sys.rank},
            {"dimension", sys.basis.size()},
            {"on_shell", on_shell},
            {"basis", basis},
            {"rank_with_verified_generators", span_rank(sys.basis, verified)},
            {"rank_with_printed_generators", span_rank(sys.basis, printed)},
            {"verified_generators", listed(verified)},
            {"printed_generators", listed(printed)}};
  return r;
}

// ---- algebra

json structure_json(const StructureConstants& sc) {
  json table = json::array();
  for (int i = 0; i < sc.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < sc.dim(); ++j) {
      RVec c(static_cast<std::size_t>(sc.dim()));
      for (int k = 0; k < sc.dim(); ++k) c[static_cast<std::size_t>(k)] = sc.at(i, j, k);
      row.push_back(combination(c));
    }
    table.push_back(row);
  }
  DerivedSeries ds = derived_series(sc);
  return {{"commutators", table}, {"derived_series", ds.dims}, {"verdict", ds.solvable ? "solvable" : "not solvable"}};
}

json matrix_json(const ExprMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& e : row) r.push_back(str(e));
    rows.push_back(r);
  }
  return rows;
}

json invariants_json(const InvariantAnalysis& ia) {
  json basic = json::array();
  for (const auto& q : ia.basic) basic.push_back(q.str());
  json gens = json::array();
  for (const auto& q : ia.ring_generators) gens.push_back(q.str());
  return {{"variables", ia.variables}, {"ring_generators", gens}, {"basic", basic}};
}

Report algebra_report(const Params& p) {
  Report r;
  StructureConstants sc = kpbbm_algebra();
  json adj = json::array();
  for (int i = 0; i < sc.dim(); ++i)
    adj.push_back({{"generator", "Γ" + std::to_string(i + 1)}, {"matrix", matrix_json(adjoint_matrix(sc, i, sym("epsilon")))}});
  r.body = {{"listed_basis", structure_json(sc)},
            {"adjoint", adj},
            {"global_adjoint", matrix_json(global_adjoint(sc))},
            {"invariants", invariants_json(invariants(sc))},
            {"invariants_a1_zero", invariants_json(invariants(sc, Rational(0)))},
            {"verified_basis", structure_json(structure_from_fields(kpbbm_symmetry_generators(p)))},
            {"verified_basis_params", params_json(p)}};
  return r;
}

// ---- classify

RVec parse_element(const std::string& text) {
  RVec v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(parse_rational(part));
  if (v.size() != 4) throw std::invalid_argument("element needs four comma-separated rationals, got '" + text + "'");
  return v;
}

json classification_json(const RVec& a) {
  json in = json::array();
  for (const auto& q : a) in.push_back(str(q));
  try {
    Classification c = classify(a);
    json eps = json::array();
    for (std::size_t i = 0; i < 4; ++i)
      eps.push_back(c.exact_epsilons[i] ? json(str(*c.exact_epsilons[i])) : json(c.epsilons[i]));
    json j{{"input", in},
           {"tag", to_string(c.tag)},
           {"c", c.c ? json(str(*c.c)) : json(nullptr)},
           {"branch", c.branch},
           {"printed_representative", c.printed_representative},
           {"representative", c.representative},
           {"scale", c.exact_scale ? json(str(*c.exact_scale)) : json(c.scale)},
           {"epsilons", eps},
           {"orbit_residual", c.orbit_residual}};
    if (!c.note.empty()) j["note"] = c.note;
    return j;
  } catch (const OutsideOptimalList& e) {
    return {{"input", in}, {"tag", nullptr}, {"stratum", e.stratum}, {"error", e.what()}};
  }
}

// ---- solutions

struct SolutionOptions {
  ParamOptions po;
  std::string family{"tanh"}, lambda{"1"}, alpha{"1"}, u1{"0"}, theta0{"0"}, branch{"plus"};
  bool printed{false};
};

void add_solution_options(CLI::App* sub, SolutionOptions& so) {
  add_params(sub, so.po);
  sub->add_option("--family", so.family, "sr1 | sr2 | sr3 | hb | tanh")->capture_default_str();
  sub->add_option("--lambda", so.lambda, "reduction / wave parameter lambda")->capture_default_str();
  sub->add_option("--alpha", so.alpha, "hb: exponent coefficient alpha")->capture_default_str();
  sub->add_option("--u1", so.u1, "hb: background u1")->capture_default_str();
  sub->add_option("--theta0", so.theta0, "hb: phase shift theta0")->capture_default_str();
  sub->add_option("--branch", so.branch, "hb: plus | minus root of beta")->capture_default_str();
  sub->add_flag("--printed", so.printed, "sr families: use the formula as published instead of the verified one");
}

SolutionSpec build_solution(const SolutionOptions& so) {
  Params p = so.po.get();
  Family f = parse_family(so.family);
  switch (f) {
    case Family::HB: {
      HBSolution h = hb_solve(parse_rational(so.alpha), parse_rational(so.u1), parse_rational(so.theta0), p);
      if (so.branch == "plus") return h.plus;
      if (so.branch == "minus") return h.minus;
      throw std::invalid_argument("--branch must be plus or minus");
    }
    case Family::TANH:
      return tanh_solve(parse_rational(so.lambda), p);
    default:
      return so.printed ? build_printed_sr_solution(f, parse_rational(so.lambda), p)
                        : build_sr_solution(f, parse_rational(so.lambda), p);
  }
}

Report solution_report(const SolutionSpec& s, std::uint64_t seed) {
  Report r;
  ZeroReport z = zero_test(residual(s.expression, s.params), seed);
  r.verified = z.zero();
  json conds = json::array();
  for (const auto& [name, e] : s.conditions) {
    ZeroReport cz = zero_test(e, seed);
    if (!cz.zero()) r.verified = false;
    conds.push_back({{"name", name}, {"value", str(e)}, {"verdict", to_string(cz.verdict)}});
  }
  r.body = {{"family", to_string(s.family)}, {"params", params_json(s.params)}, {"printed", s.printed}};
  json free = json::object();
  for (const auto& [k, v] : s.free) free[k] = str(v);
  r.body["free"] = free;
  r.body["expression"] = str(s.expression);
  try {
    WaveDiagnostics d = diagnostics(s);
    r.body["amplitude"] = {{"exact", str(d.amplitude)}, {"value", d.amplitude_value}};
    r.body["width"] = {{"exact", str(d.width_scale)}, {"value", d.width_value}};
    r.body["velocity"] = {{"exact", str(d.velocity)}, {"value", d.velocity_value}};
  } catch (const std::exception& e) {
    r.body["diagnostics_error"] = e.what();
  }
  r.body["conditions"] = conds;
  r.body["residual_verdict"] = to_string(z.verdict);
  r.body["residual"] = zero_json(z);
  return r;
}

struct ProfileOptions {
  double t{0}, y{0}, xmin{-20}, xmax{20};
  int n{1000};
};

std::string profile_csv(const SolutionSpec& s, const ProfileOptions& o) {
  if (o.n < 2 || !(o.xmax > o.xmin)) throw std::invalid_argument("profile needs n >= 2 and xmax > xmin");
  CompiledExpr f(s.expression, {"x", "y", "t"});
  std::ostringstream os;
  os.precision(12);
  os << "x,u\n";
  for (int i = 0; i < o.n; ++i) {
    double x = o.xmin + (o.xmax - o.xmin) * i / (o.n - 1);
    double v[3] = {x, o.y, o.t};
    os << x << ',' << f(v) << '\n';
  }
  return os.str();
}

// ---- tanh and hb

Report tanh_report(const Rational& lambda, const Params& p, unsigned starts, std::uint64_t seed) {
  Report r;
  TanhSystem ts = tanh_system(lambda, p, starts, seed);
  json eqs = json::array();
  for (const auto& e : ts.equations) eqs.push_back(str(e));
  json exact = json::array();
  for (const auto& root : ts.exact) exact.push_back({{"d0", str(root.d0)}, {"d1", str(root.d1)}, {"omega", str(root.omega)}});
  SolutionSpec s = tanh_solve(lambda, p);
  Report sol = solution_report(s, seed);
  r.verified = sol.verified && ts.cross_check;
  r.body = {{"params", params_json(p)},
            {"lambda", str(lambda)},
            {"balance", balance_order(BalanceKind::Tanh)},
            {"equations_Y0_to_Y4", eqs},
            {"exact_roots", exact},
            {"numeric_roots", ts.numeric},
            {"cross_check", ts.cross_check},
            {"amplitude_limit_b_to_infinity", str(tanh_amplitude_limit(lambda, p))},
            {"solution", sol.body}};
  return r;
}

Report hb_report(const SolutionOptions& so, std::uint64_t seed) {
  Report r;
  Params p = so.po.get();
  HBSolution h = hb_solve(parse_rational(so.alpha), parse_rational(so.u1), parse_rational(so.theta0), p);
  Report plus = solution_report(h.plus, seed), minus = solution_report(h.minus, seed);
  r.verified = plus.verified && minus.verified;
  r.body = {{"params", params_json(p)},
            {"balance", balance_order(BalanceKind::HB)},
            {"beta_squared", str(h.beta_squared)},
            {"beta_plus", str(h.beta_plus)},
            {"beta_minus", str(h.beta_minus)},
            {"plus", plus.body},
            {"minus", minus.body}};
  return r;
}

// ---- simulate

struct SimOptions {
  SolutionOptions so;
  int n{128};
  double length{30}, t_end{10}, dt{0.01}, tolerance{1e-3};
  int snapshots{11};
  std::string output_dir;
};

Report simulate_report(const SimOptions& o, std::ostream& err) {
  Report r;
  SolutionSpec s = build_solution(o.so);
  std::array<Rational, 3> dir = s.family == Family::TANH ? std::array<Rational, 3>{1, -parse_rational(o.so.lambda), 0}
                                                         : sr_direction(s.family, parse_rational(o.so.lambda));
  if (s.family == Family::HB || s.family == Family::SR2 || dir[0] != 1 || dir[1].get_den() != 1)
    throw std::invalid_argument("simulate needs a wave of the form f(x + m y - c t) with integer m (tanh, sr1, sr3 with integer lambda)");
  WaveDiagnostics d = diagnostics(s);
  auto grid_at = [&](double t) { return sample_periodized(s.expression, o.n, o.n, o.length, o.length, t, 1, 0, 2); };
  std::vector<SimState> hist = integrate_history(grid_at(0), SimParams::from(s.params), o.t_end, o.dt, o.snapshots);
  double error = max_abs_difference(hist.back().grid, grid_at(o.t_end));
  double speed = hist.size() >= 5 ? measure_speed(hist) : std::nan("");
  r.verified = error <= o.tolerance;
  r.body = {{"family", to_string(s.family)},
            {"params", params_json(s.params)},
            {"lambda", o.so.lambda},
            {"grid", {{"nx", o.n}, {"ny", o.n}, {"lx", o.length}, {"ly", o.length}}},
            {"boundary", "periodic; the wave is periodized in x, sum over shifts n*lx for |n| <= 2"},
            {"projection", "x-mean (xi = 0) modes and the x-Nyquist column are held fixed"},
            {"t_end", o.t_end},
            {"dt_requested", o.dt},
            {"dt_used", hist.back().dt},
            {"stability_bound", hist.back().stability_bound},
            {"steps", hist.back().steps},
            {"max_error_vs_exact", error},
            {"tolerance", o.tolerance},
            {"measured_speed", speed},
            {"expected_speed", d.velocity_value}};
  if (!o.output_dir.empty()) {
    fs::path dir_path(o.output_dir);
    json files = json::array();
    for (std::size_t i = 0; i < hist.size(); ++i) {
      std::ostringstream os;
      write_csv(os, hist[i]);
      std::string name = "snapshot_" + std::to_string(i) + ".csv";
      write_text(dir_path / name, os.str());
      files.push_back({{"file", name}, {"time", hist[i].time}});
    }
    json manifest = r.body;
    manifest["snapshots"] = files;
    write_text(dir_path / "manifest.json", manifest.dump(2) + "\n");
    err << "wrote " << hist.size() << " snapshots to " << dir_path.string() << "\n";
  }
  return r;
}

// ---- reproduce

int reproduce(const std::string& out_dir, std::uint64_t seed, bool skip_simulation, std::ostream& out, std::ostream& err) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  json summary = json::object();
  bool all_ok = true;
  auto save = [&](const std::string& name, const Report& r, bool required = true) {
    write_text(dir / (name + ".json"), r.body.dump(2) + "\n");
    std::string status = r.verified ? "ok" : (required ? "verification failed" : "residuals do not all vanish (reported only)");
    summary[name] = status;
    if (required) all_ok = all_ok && r.verified;
    err << name << ": " << status << "\n";
  };
  Params unit{1, 1, 1}, fig4{-1, 1, 1};

  save("painleve", painleve_report(unit));
  save("symmetries", symmetries_report(unit, 1, seed));
  save("algebra", algebra_report(unit));

  Report cls;
  cls.body = json::array();
  for (const RVec& a : std::vector<RVec>{{1, 5, -3, 2}, {0, -2, 0, 0}, {0, 0, 1, 1}, {0, 1, 1, 1}, {0, -3, 2, 1}})
    cls.body.push_back(classification_json(a));
  save("classify", cls);

  Report sols;
  sols.body = json::array();
  auto add_solution = [&](const SolutionSpec& s) {
    Report r = solution_report(s, seed);
    sols.verified = sols.verified && r.verified;
    sols.body.push_back(r.body);
  };
  add_solution(build_sr_solution(Family::SR1, 3, unit));
  add_solution(build_sr_solution(Family::SR2, 2, unit));
  add_solution(build_sr_solution(Family::SR3, 2, unit));
  HBSolution fig2 = hb_solve(1, -1, 0, Params{6, 1, 1});
  add_solution(fig2.plus);
  add_solution(fig2.minus);
  add_solution(tanh_solve(1, fig4));
  save("solutions", sols);

  Report printed;
  printed.body = json::array();
  for (Family f : {Family::SR1, Family::SR2, Family::SR3}) {
    Rational l = f == Family::SR1 ? Rational(3) : Rational(2);
    Report r = solution_report(build_printed_sr_solution(f, l, unit), seed);
    printed.verified = printed.verified && r.verified;
    printed.body.push_back(r.body);
  }
  save("printed_solutions", printed, false);

  save("tanh", tanh_report(1, fig4, 64, seed));
  SolutionOptions hb_opts;
  hb_opts.po = {"6", "1", "1"};
  hb_opts.u1 = "-1";
  save("hb", hb_report(hb_opts, seed));

  ProfileOptions prof;
  write_text(dir / "fig1_sr3_profile.csv", profile_csv(build_sr_solution(Family::SR3, 2, unit), prof));
  write_text(dir / "fig2_hb_profile.csv", profile_csv(fig2.plus, prof));
  write_text(dir / "fig3_tanh_profile.csv", profile_csv(tanh_solve(1, fig4), prof));
  for (double t : {0.0, 5.0, 10.0}) {
    ProfileOptions pt = prof;
    pt.t = t;
    write_text(dir / ("fig4_tanh_t" + std::to_string(static_cast<int>(t)) + ".csv"), profile_csv(tanh_solve(1, fig4), pt));
  }

  if (!skip_simulation) {
    SimOptions so;
    so.so.po = {"-1", "1", "1"};
    save("simulate", simulate_report(so, err));
  }
  summary["seed"] = seed;
  write_text(dir / "report.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return all_ok ? kOk : kVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KP-BBM analysis toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file mirroring the command line flags");
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  app.add_option("--seed", seed, "seed for randomized zero tests and multistart solvers")->capture_default_str();
  app.add_option("--output", output, "write the result to this file instead of stdout");

  ParamOptions painleve_po;
  auto* painleve = app.add_subcommand("painleve", "leading order, resonances and compatibility conditions");
  add_params(painleve, painleve_po);

  ParamOptions sym_po;
  int degree = 1;
  auto* symmetries = app.add_subcommand("symmetries", "solve the determining equations for point symmetries");
  add_params(symmetries, sym_po);
  symmetries->add_option("--degree", degree, "polynomial degree of the ansatz")->capture_default_str()->check(CLI::Range(1, 3));

  ParamOptions alg_po;
  auto* algebra = app.add_subcommand("algebra", "commutator table, adjoint matrices, derived series, invariants");
  add_params(algebra, alg_po);

  std::vector<std::string> elements;
  std::string csv_path;
  auto* classify_cmd = app.add_subcommand("classify", "map elements a1 G1 + ... + a4 G4 to the optimal system");
  classify_cmd->add_option("--element", elements, "four rationals a1,a2,a3,a4 (repeatable)");
  classify_cmd->add_option("--csv", csv_path, "file with one element per line")->check(CLI::ExistingFile);

  auto* solution = app.add_subcommand("solution", "closed-form solutions");
  solution->require_subcommand(1);
  SolutionOptions build_opts, profile_opts;
  ProfileOptions prof;
  auto* build = solution->add_subcommand("build", "expression, diagnostics and residual verdict as JSON");
  add_solution_options(build, build_opts);
  auto* profile = solution->add_subcommand("profile", "u along x at fixed y and t as CSV");
  add_solution_options(profile, profile_opts);
  profile->add_option("--t", prof.t, "time")->capture_default_str();
  profile->add_option("--y", prof.y, "y")->capture_default_str();
  profile->add_option("--xmin", prof.xmin, "left end")->capture_default_str();
  profile->add_option("--xmax", prof.xmax, "right end")->capture_default_str();
  profile->add_option("--n", prof.n, "number of points")->capture_default_str();

  ParamOptions tanh_po;
  std::string tanh_lambda = "1";
  unsigned starts = 64;
  auto* tanh_cmd = app.add_subcommand("tanh", "tanh-method algebraic system and its roots");
  add_params(tanh_cmd, tanh_po);
  tanh_cmd->add_option("--lambda", tanh_lambda, "wave parameter lambda")->capture_default_str();
  tanh_cmd->add_option("--starts", starts, "random starts of the numeric cross-check")->capture_default_str();

  SolutionOptions hb_opts;
  auto* hb = app.add_subcommand("hb", "homogeneous balance solution and its conditions");
  add_params(hb, hb_opts.po);
  hb->add_option("--alpha", hb_opts.alpha, "exponent coefficient alpha")->capture_default_str();
  hb->add_option("--u1", hb_opts.u1, "background u1")->capture_default_str();
  hb->add_option("--theta0", hb_opts.theta0, "phase shift theta0")->capture_default_str();

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "pseudo-spectral run started from an exact wave");
  add_params(simulate, sim.so.po);
  simulate->add_option("--family", sim.so.family, "tanh | sr1 | sr3")->capture_default_str();
  simulate->add_option("--lambda", sim.so.lambda, "wave parameter (integer)")->capture_default_str();
  simulate->add_option("--n", sim.n, "grid points per side")->capture_default_str();
  simulate->add_option("--length", sim.length, "side of the square periodic domain")->capture_default_str();
  simulate->add_option("--t-end", sim.t_end, "final time")->capture_default_str();
  simulate->add_option("--dt", sim.dt, "largest time step")->capture_default_str();
  simulate->add_option("--snapshots", sim.snapshots, "number of stored states including t = 0")->capture_default_str();
  simulate->add_option("--tolerance", sim.tolerance, "max error against the exact translate")->capture_default_str();
  simulate->add_option("--output-dir", sim.output_dir, "directory for CSV snapshots and manifest.json");

  std::string out_dir = "reproduce";
  bool skip_simulation = false;
  auto* repro = app.add_subcommand("reproduce", "regenerate every report and figure data set");
  repro->add_option("--output-dir", out_dir, "destination directory")->capture_default_str();
  repro->add_flag("--skip-simulation", skip_simulation, "omit the time integration run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  auto finish = [&](const Report& r) {
    emit(r.body, out, output);
    return r.verified ? kOk : kVerificationFailed;
  };

  try {
    if (*painleve) return finish(painleve_report(painleve_po.get()));
    if (*symmetries) return finish(symmetries_report(sym_po.get(), degree, seed));
    if (*algebra) return finish(algebra_report(alg_po.get()));
    if (*classify_cmd) {
      std::vector<std::string> items = elements;
      if (!csv_path.empty()) {
        std::ifstream f(csv_path);
        std::string line;
        while (std::getline(f, line))
          if (!line.empty() && line[0] != '#') items.push_back(line);
      }
      if (items.empty()) throw std::invalid_argument("classify needs --element or --csv");
      if (items.size() == 1) {
        json j = classification_json(parse_element(items[0]));
        emit(j, out, output);
        return j.contains("error") ? kInvalid : kOk;
      }
      json arr = json::array();
      for (const auto& s : items) arr.push_back(classification_json(parse_element(s)));
      emit(arr, out, output);
      return kOk;
    }
    if (*build) return finish(solution_report(build_solution(build_opts), seed));
    if (*profile) {
      emit_text(profile_csv(build_solution(profile_opts), prof), out, output);
      return kOk;
    }
    if (*tanh_cmd) return finish(tanh_report(parse_rational(tanh_lambda), tanh_po.get(), starts, seed));
    if (*hb) return finish(hb_report(hb_opts, seed));
    if (*simulate) return finish(simulate_report(sim, err));
    if (*repro) return reproduce(out_dir, seed, skip_simulation, out, err);
  } catch (const Instability& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace kpbbm::cli

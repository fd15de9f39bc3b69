#include "kpbbm/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>

#include "kpbbm/compiled.hpp"

namespace kpbbm {

namespace {

using cplx = std::complex<double>;

constexpr double kSingularTol = 1e-8;
constexpr double kBlowup = 1e6;
constexpr double kRk4Stability = 2.8;  // RK4 reaches about 2.83 on the imaginary axis

class Spectral {
 public:
  Spectral(const Grid2D& g, const SimParams& p)
      : nx_(g.nx), ny_(g.ny), nh_(g.nx / 2 + 1), a_(p.a), real_(g.values.size()),
        spec_(static_cast<std::size_t>(ny_) * static_cast<std::size_t>(nh_)), inv_symbol_(spec_.size()),
        xi2_(spec_.size()), keta2_(spec_.size()) {
    if (nx_ % 2 != 0) throw std::invalid_argument("spectral grid needs an even nx");
    forward_ = fftw_plan_dft_r2c_2d(ny_, nx_, real_.data(), reinterpret_cast<fftw_complex*>(spec_.data()), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(ny_, nx_, reinterpret_cast<fftw_complex*>(spec_.data()), real_.data(), FFTW_ESTIMATE);
    const double tau = 2 * std::numbers::pi;
    for (int j = 0; j < ny_; ++j) {
      double eta = tau * (j <= ny_ / 2 ? j : j - ny_) / g.ly;
      for (int i = 0; i < nh_; ++i) {
        double xi = tau * i / g.lx;
        std::size_t m = static_cast<std::size_t>(j) * static_cast<std::size_t>(nh_) + static_cast<std::size_t>(i);
        xi2_[m] = xi * xi;
        keta2_[m] = p.k * eta * eta;
        if (i == 0 || i == nx_ / 2) continue;  // frozen modes
        double s = 1 - p.b * xi * xi;
        if (std::abs(s) < kSingularTol)
          throw SingularSymbol("1 - b xi^2 vanishes at resolved xi = " + std::to_string(xi));
        inv_symbol_[m] = 1.0 / cplx(0, xi * s);
      }
    }
  }
  ~Spectral() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  std::vector<cplx> to_spectral(const std::vector<double>& u) {
    std::copy(u.begin(), u.end(), real_.begin());
    fftw_execute(forward_);
    return spec_;
  }
  std::vector<double> to_physical(const std::vector<cplx>& U) {
    spec_ = U;  // c2r overwrites its input
    fftw_execute(backward_);
    double n = static_cast<double>(nx_) * ny_;
    std::vector<double> u(real_.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = real_[i] / n;
    return u;
  }

  std::vector<cplx> rhs(const std::vector<cplx>& U) {
    std::vector<double> u = to_physical(U);
    for (double& v : u) v *= v;
    std::vector<cplx> W = to_spectral(u);
    std::vector<cplx> d(U.size());
    for (std::size_t m = 0; m < U.size(); ++m)
      if (inv_symbol_[m] != cplx(0)) d[m] = (xi2_[m] * (U[m] + a_ * W[m]) + keta2_[m] * U[m]) * inv_symbol_[m];
    return d;
  }

  std::vector<cplx> step(const std::vector<cplx>& U, double dt) {
    auto axpy = [&U](const std::vector<cplx>& k, double s) {
      std::vector<cplx> r(U.size());
      for (std::size_t i = 0; i < U.size(); ++i) r[i] = U[i] + s * k[i];
      return r;
    };
    auto k1 = rhs(U);
    auto k2 = rhs(axpy(k1, dt / 2));
    auto k3 = rhs(axpy(k2, dt / 2));
    auto k4 = rhs(axpy(k3, dt));
    std::vector<cplx> out(U.size());
    for (std::size_t i = 0; i < U.size(); ++i) out[i] = U[i] + dt / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }

  // Largest rate of the equation linearised about a state of amplitude umax.
  double max_rate(double umax) const {
    double r = 0;
    for (std::size_t m = 0; m < inv_symbol_.size(); ++m)
      if (inv_symbol_[m] != cplx(0))
        r = std::max(r, (xi2_[m] * (1 + 2 * std::abs(a_) * umax) + std::abs(keta2_[m])) * std::abs(inv_symbol_[m]));
    return r;
  }

  double norm(const std::vector<cplx>& U) const {
    double s = 0;
    for (const auto& c : U) s += std::norm(c);
    return std::sqrt(s) / (static_cast<double>(nx_) * ny_);
  }

 private:
  int nx_, ny_, nh_;
  double a_;
  std::vector<double> real_;
  std::vector<cplx> spec_;
  std::vector<cplx> inv_symbol_;
  std::vector<double> xi2_, keta2_;
  fftw_plan forward_{}, backward_{};
};

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_grid(const Grid2D& g) {
  if (g.nx < 16 || g.ny < 16 || g.values.size() != static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny))
    throw std::invalid_argument("malformed grid");
}

}  // namespace

Grid2D::Grid2D(int nx_, int ny_, double lx_, double ly_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_), values(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0.0) {
  if (nx_ < 16 || ny_ < 16) throw std::invalid_argument("grid needs at least 16 points per direction");
  if (lx_ <= 0 || ly_ <= 0) throw std::invalid_argument("domain lengths must be positive");
}

Grid2D sample(const Expr& u, int nx, int ny, double lx, double ly, double t) {
  return sample_periodized(u, nx, ny, lx, ly, t, 0, 0, 0);
}

Grid2D sample_periodized(const Expr& u, int nx, int ny, double lx, double ly, double t, int sx, int sy, int reach) {
  Grid2D g(nx, ny, lx, ly);
  CompiledExpr f(u, {"x", "y", "t"});
  if (sx == 0 && sy == 0) reach = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double s = 0;
      for (int n = -reach; n <= reach; ++n) {
        double v[3] = {g.x(i) + n * lx * sx, g.y(j) + n * ly * sy, t};
        s += f(v);
      }
      g.at(i, j) = s;
    }
  return g;
}

ResidualNorms grid_residual(const Expr& u, const Params& p, const SampleWindow& w, double h) {
  if (h <= 0 || w.nx <= 0 || w.ny <= 0) throw std::invalid_argument("bad sampling window");
  CompiledExpr U(u, {"x", "y", "t"}), Ut(differentiate(u, "t"), {"x", "y", "t"});
  const double a = p.a.get_d(), b = p.b.get_d(), k = p.k.get_d();
  ResidualNorms r;
  double sum2 = 0;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      double x = w.x0 + (i + 0.5) * (w.x1 - w.x0) / w.nx;
      double y = w.y0 + (j + 0.5) * (w.y1 - w.y0) / w.ny;
      auto ev = [&](const CompiledExpr& f, double dx, double dy) {
        double v[3] = {x + dx, y + dy, w.t};
        return f(v);
      };
      double u0 = ev(U, 0, 0), up = ev(U, h, 0), um = ev(U, -h, 0), uyp = ev(U, 0, h), uym = ev(U, 0, -h);
      double tp = ev(Ut, h, 0), tm = ev(Ut, -h, 0), tp2 = ev(Ut, 2 * h, 0), tm2 = ev(Ut, -2 * h, 0);
      double ux = (up - um) / (2 * h);
      double uxx = (up - 2 * u0 + um) / (h * h);
      double uyy = (uyp - 2 * u0 + uym) / (h * h);
      double uxt = (tp - tm) / (2 * h);
      double uxxxt = (tp2 - 2 * tp + 2 * tm - tm2) / (2 * h * h * h);
      double res = uxt + uxx + 2 * a * ux * ux + 2 * a * u0 * uxx + b * uxxxt + k * uyy;
      r.max_abs = std::max(r.max_abs, std::abs(res));
      sum2 += res * res;
    }
  r.l2 = std::sqrt(sum2 / (static_cast<double>(w.nx) * w.ny));
  return r;
}

ResidualNorms pointwise_residual(const Expr& u, const Params& p, const SampleWindow& w) {
  if (w.nx <= 0 || w.ny <= 0) throw std::invalid_argument("bad sampling window");
  CompiledExpr R(residual(u, p), {"x", "y", "t"});
  ResidualNorms r;
  double sum2 = 0;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      double v[3] = {w.x0 + (i + 0.5) * (w.x1 - w.x0) / w.nx, w.y0 + (j + 0.5) * (w.y1 - w.y0) / w.ny, w.t};
      double res = R(v);
      r.max_abs = std::max(r.max_abs, std::abs(res));
      sum2 += res * res;
    }
  r.l2 = std::sqrt(sum2 / (static_cast<double>(w.nx) * w.ny));
  return r;
}

double convergence_order(const Expr& u, const Params& p, const SampleWindow& w, double h) {
  double r1 = grid_residual(u, p, w, h).max_abs, r2 = grid_residual(u, p, w, h / 2).max_abs;
  return std::log2(r1 / r2);
}

double stability_bound(const Grid2D& g, const SimParams& p) {
  check_grid(g);
  auto sp = std::make_unique<Spectral>(g, p);
  double rate = sp->max_rate(max_abs(g.values));
  return rate > 0 ? kRk4Stability / rate : std::numeric_limits<double>::infinity();
}

Grid2D rk4_step(const Grid2D& g, const SimParams& p, double dt) {
  check_grid(g);
  auto sp = std::make_unique<Spectral>(g, p);
  Grid2D out = g;
  out.values = sp->to_physical(sp->step(sp->to_spectral(g.values), dt));
  return out;
}

std::vector<SimState> integrate_history(const Grid2D& initial, const SimParams& p, double t_end, double dt, int snapshots) {
  check_grid(initial);
  if (dt <= 0 || t_end < 0) throw std::invalid_argument("dt must be positive and t_end non-negative");
  if (snapshots < 2) throw std::invalid_argument("need at least two snapshots");
  auto sp = std::make_unique<Spectral>(initial, p);
  double bound = sp->max_rate(max_abs(initial.values));
  bound = bound > 0 ? kRk4Stability / bound : std::numeric_limits<double>::infinity();
  double step = std::min(dt, 0.9 * bound);
  int intervals = snapshots - 1;
  double span = t_end / intervals;
  long per = span > 0 ? static_cast<long>(std::ceil(span / step - 1e-12)) : 0;
  double h = per > 0 ? span / static_cast<double>(per) : 0;

  std::vector<cplx> U = sp->to_spectral(initial.values);
  double norm0 = sp->norm(U);
  std::vector<SimState> out;
  SimState s;
  s.grid = initial;
  s.params = p;
  s.dt = h;
  s.stability_bound = bound;
  out.push_back(s);
  long steps = 0;
  for (int k = 1; k <= intervals; ++k) {
    for (long n = 0; n < per; ++n) {
      U = sp->step(U, h);
      ++steps;
      double nr = sp->norm(U);
      if (!std::isfinite(nr) || nr > kBlowup * std::max(1.0, norm0))
        throw Instability("solution norm " + std::to_string(nr) + " at t = " + std::to_string(steps * h));
    }
    s.grid.values = sp->to_physical(U);
    s.time = span * k;
    s.steps = steps;
    out.push_back(s);
  }
  return out;
}

SimState integrate(const Grid2D& initial, const SimParams& p, double t_end, double dt) {
  return integrate_history(initial, p, t_end, dt, 2).back();
}

double peak_position(const Grid2D& g, int row) {
  check_grid(g);
  if (row < 0 || row >= g.ny) throw std::invalid_argument("row out of range");
  // Dominant extremum measured from the row median, so depressions are tracked too.
  std::vector<double> line(static_cast<std::size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i) line[static_cast<std::size_t>(i)] = g.at(i, row);
  std::vector<double> sorted = line;
  std::nth_element(sorted.begin(), sorted.begin() + g.nx / 2, sorted.end());
  double base = sorted[static_cast<std::size_t>(g.nx / 2)];
  int best = 0;
  for (int i = 1; i < g.nx; ++i)
    if (std::abs(line[static_cast<std::size_t>(i)] - base) > std::abs(line[static_cast<std::size_t>(best)] - base)) best = i;
  double height = std::abs(line[static_cast<std::size_t>(best)] - base);
  if (height <= 1e-12 * (1 + std::abs(base))) throw NoPeak("field is flat along the row");
  double fm = g.at((best - 1 + g.nx) % g.nx, row), f0 = g.at(best, row), fp = g.at((best + 1) % g.nx, row);
  double den = fm - 2 * f0 + fp;
  double delta = den != 0 ? 0.5 * (fm - fp) / den : 0.0;
  return g.x(best) + delta * g.dx();
}

double measure_speed(const std::vector<SimState>& history, int row) {
  if (history.size() < 5) throw std::invalid_argument("speed needs at least five snapshots");
  const Grid2D& g0 = history.front().grid;
  if (row < 0) row = g0.ny / 2;
  std::vector<double> ts, xs;
  double prev = 0;
  for (std::size_t n = 0; n < history.size(); ++n) {
    double x = peak_position(history[n].grid, row);
    if (n > 0) {
      double lx = history[n].grid.lx;
      while (x - prev > lx / 2) x -= lx;
      while (x - prev <= -lx / 2) x += lx;
    }
    prev = x;
    ts.push_back(history[n].time);
    xs.push_back(x);
  }
  double tm = 0, xm = 0;
  for (std::size_t n = 0; n < ts.size(); ++n) {
    tm += ts[n];
    xm += xs[n];
  }
  tm /= static_cast<double>(ts.size());
  xm /= static_cast<double>(ts.size());
  double num = 0, den = 0;
  for (std::size_t n = 0; n < ts.size(); ++n) {
    num += (ts[n] - tm) * (xs[n] - xm);
    den += (ts[n] - tm) * (ts[n] - tm);
  }
  if (den == 0) throw std::invalid_argument("snapshots share one time");
  return num / den;
}

double max_abs_difference(const Grid2D& a, const Grid2D& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("grid shapes differ");
  double m = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double x_mean(const Grid2D& g, int row) {
  double s = 0;
  for (int i = 0; i < g.nx; ++i) s += g.at(i, row);
  return s / g.nx;
}

void write_csv(std::ostream& out, const SimState& s) {
  out << "x,y,u\n";
  out.precision(12);
  for (int j = 0; j < s.grid.ny; ++j)
    for (int i = 0; i < s.grid.nx; ++i) out << s.grid.x(i) << ',' << s.grid.y(j) << ',' << s.grid.at(i, j) << '\n';
}

}  // namespace kpbbm

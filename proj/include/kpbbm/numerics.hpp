#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "kpbbm/expr.hpp"
#include "kpbbm/pde.hpp"

namespace kpbbm {

struct SingularSymbol : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Instability : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoPeak : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// At least 16 points per direction. Periodic grid on [-lx/2, lx/2) x [-ly/2, ly/2); values[j * nx + i] at (x_i, y_j).
struct Grid2D {
  int nx{0}, ny{0};
  double lx{0}, ly{0};
  std::vector<double> values;

  Grid2D() = default;
  Grid2D(int nx, int ny, double lx, double ly);
  double x(int i) const { return -lx / 2 + lx * i / nx; }
  double y(int j) const { return -ly / 2 + ly * j / ny; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)]; }
  double dx() const { return lx / nx; }
};

// Samples u(x, y, t) on the grid.
Grid2D sample(const Expr& u, int nx, int ny, double lx, double ly, double t);
// Samples sum_n u(x + n lx * sx, y + n ly * sy, t) for n in [-reach, reach]; makes
// an oblique line wave periodic when its direction fits the box.
Grid2D sample_periodized(const Expr& u, int nx, int ny, double lx, double ly, double t, int sx, int sy, int reach = 2);

struct ResidualNorms {
  double max_abs{0};
  double l2{0};  // root mean square over the sample points
};

// Points x0 + (i + 1/2)(x1 - x0)/nx etc. at time t.
struct SampleWindow {
  double x0{-20}, x1{20}, y0{-20}, y1{20}, t{0};
  int nx{200}, ny{200};
};

// The equation evaluated with 2nd-order central differences of spacing h in x and
// y; the time derivative is taken exactly from the closed form before differencing.
ResidualNorms grid_residual(const Expr& u, const Params& p, const SampleWindow& w, double h);
// The symbolic residual evaluated in double precision at the window points.
ResidualNorms pointwise_residual(const Expr& u, const Params& p, const SampleWindow& w);
// log2 of the residual ratio between h and h/2.
double convergence_order(const Expr& u, const Params& p, const SampleWindow& w, double h);

struct SimParams {
  double a{1}, b{1}, k{1};
  static SimParams from(const Params& p) { return {p.a.get_d(), p.b.get_d(), p.k.get_d()}; }
};

struct SimState {
  Grid2D grid;
  double time{0};
  SimParams params;
  double dt{0};                // step actually used
  double stability_bound{0};   // 2.8 / max |linearised symbol|
  long steps{0};
};

// Pseudo-spectral method of lines for the equation in the form
// i xi (1 - b xi^2) u^_t = xi^2 (u^ + a (u^2)^) + k eta^2 u^, RK4 in time.
// Modes with xi = 0 (and the x-Nyquist column) have zero time derivative.
// The step is min(dt, 0.9 * stability_bound), rounded so steps land on t_end.
SimState integrate(const Grid2D& initial, const SimParams& p, double t_end, double dt);
// Same, keeping snapshots at `snapshots` equally spaced times including 0 and t_end.
std::vector<SimState> integrate_history(const Grid2D& initial, const SimParams& p, double t_end, double dt, int snapshots);
// One RK4 step of size dt with no step-size control (for order checks).
Grid2D rk4_step(const Grid2D& g, const SimParams& p, double dt);
double stability_bound(const Grid2D& g, const SimParams& p);

// Peak position along x on row j (sub-grid by a 3-point quadratic fit), unwrapped
// across the periodic boundary, and the least-squares slope against time.
double measure_speed(const std::vector<SimState>& history, int row = -1);
double peak_position(const Grid2D& g, int row);

double max_abs_difference(const Grid2D& a, const Grid2D& b);
double x_mean(const Grid2D& g, int row);

void write_csv(std::ostream& out, const SimState& s);

}  // namespace kpbbm

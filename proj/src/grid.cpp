// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fermix/errors.hpp"

namespace fermix {

void TrapParams::validate() const {
  if (!(omega > 0.0)) throw ConfigError("trap: omega must be positive");
  if (!(barrier_width > 0.0)) throw ConfigError("trap: barrier width must be positive");
  if (!(barrier_height >= 0.0)) throw ConfigError("trap: barrier height must be nonnegative");
  if (!(mass > 0.0)) throw ConfigError("trap: mass must be positive");
}

GridSpec build_grid(int n_points, double x_min, double x_max) {
  if (n_points < 2) throw ConfigError("grid: need at least 2 points, got " + std::to_string(n_points));
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw ConfigError("grid: require finite x_min < x_max");

  using std::numbers::pi;
  GridSpec g;
  g.n_points = n_points;
  g.x_min = x_min;
  g.x_max = x_max;
  const int intervals = n_points + 1;
  const double L = x_max - x_min;
  g.weight = L / intervals;
  g.points.resize(n_points);
  for (int j = 1; j <= n_points; ++j) g.points(j - 1) = x_min + j * g.weight;

  // Colbert-Miller closed form for the particle-in-a-box DVR.
  const double pref = pi * pi / (4.0 * L * L);
  const double diag_const = (2.0 * intervals * intervals + 1.0) / 3.0;
  g.kinetic.resize(n_points, n_points);
  for (int i = 1; i <= n_points; ++i) {
    for (int j = 1; j <= n_points; ++j) {
      double t;
      if (i == j) {
        const double s = std::sin(pi * i / intervals);
        t = pref * (diag_const - 1.0 / (s * s));
      } else {
        const double sm = std::sin(pi * (i - j) / (2.0 * intervals));
        const double sp = std::sin(pi * (i + j) / (2.0 * intervals));
        const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
        t = pref * sign * (1.0 / (sm * sm) - 1.0 / (sp * sp));
      }
      g.kinetic(i - 1, j - 1) = t;
    }
  }
  // Symmetrize away rounding asymmetry.
  g.kinetic = 0.5 * (g.kinetic + g.kinetic.transpose()).eval();
  return g;
}

double potential_at(double x, const TrapParams& trap) {
  const double w = trap.barrier_width;
  const double harmonic = 0.5 * trap.mass * trap.omega * trap.omega * x * x;
  const double barrier = trap.barrier_height / (w * std::sqrt(2.0 * std::numbers::pi)) *
                         std::exp(-x * x / (2.0 * w * w));
  return harmonic + barrier;
}

Eigen::VectorXd potential_on_grid(const GridSpec& grid, const TrapParams& trap) {
  Eigen::VectorXd v(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) v(j) = potential_at(grid.points(j), trap);
  return v;
}

Eigen::MatrixXd one_body_hamiltonian(const GridSpec& grid, const TrapParams& trap) {
  trap.validate();
  Eigen::MatrixXd h = grid.kinetic / trap.mass;
  h.diagonal() += potential_on_grid(grid, trap);
  return h;
}

Eigen::VectorXd dvr_interpolation_row(const GridSpec& grid, double x) {
  using std::numbers::pi;
  const int n = grid.n_points;
  const int intervals = n + 1;
  if (x <= grid.x_min || x >= grid.x_max) return Eigen::VectorXd::Zero(n);
  // f(x) = sum_m c_m sin(m pi (x - a)/L), c_m = 2/(n+1) sum_j f_j sin(m pi j/(n+1)).
  const double u = pi * (x - grid.x_min) / grid.length();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  for (int m = 1; m <= n; ++m) {
    const double sx = std::sin(m * u);
    for (int j = 1; j <= n; ++j) row(j - 1) += sx * std::sin(pi * m * j / intervals);
  }
  row *= 2.0 / intervals;
  return row;
}

}  // namespace fermix

// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file grid.hpp
 * @brief Sine discrete-variable representation on a hard-wall box.
 *
 * Nodes x_j = x_min + j L/(n+1), j = 1..n, uniform quadrature weight
 * dx = L/(n+1). Grid functions are stored as values at the nodes and are
 * normalized with that weight: dx * sum |f_j|^2 = 1.
 */

#pragma once

#include <Eigen/Dense>

namespace fermix {

struct GridSpec {
  int n_points = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  Eigen::VectorXd points;
  double weight = 0.0;      ///< dx
  Eigen::MatrixXd kinetic;  ///< -1/2 d^2/dx^2 for unit mass

  double length() const { return x_max - x_min; }
};

struct TrapParams {
  double omega = 0.1;
  double barrier_height = 2.0;  ///< V0
  double barrier_width = 1.0;   ///< w
  double mass = 1.0;

  /// Throws ConfigError unless omega > 0, w > 0, V0 >= 0, mass > 0.
  void validate() const;
};

GridSpec build_grid(int n_points = 400, double x_min = -40.0, double x_max = 40.0);

/// Harmonic trap plus central Gaussian barrier V0/(w sqrt(2 pi)) exp(-x^2/2w^2).
double potential_at(double x, const TrapParams& trap);

Eigen::VectorXd potential_on_grid(const GridSpec& grid, const TrapParams& trap);

/// kinetic/mass + diag(V).
Eigen::MatrixXd one_body_hamiltonian(const GridSpec& grid, const TrapParams& trap);

/// Values of all sine-DVR cardinal functions at an arbitrary x in the box,
/// scaled so that f(x) = sum_j f_j * row(j) for any grid function f.
/// Interpolation is exact for functions in the span of the box eigenstates.
Eigen::VectorXd dvr_interpolation_row(const GridSpec& grid, double x);

}  // namespace fermix

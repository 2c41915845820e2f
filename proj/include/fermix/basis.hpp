// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "fermix/grid.hpp"

namespace fermix {

/**
 * Lowest M eigenfunctions of the one-body double-well Hamiltonian on the
 * DVR grid, together with the contact-interaction tensor per unit coupling.
 *
 * Orbitals are real, weight-normalized (dx * sum phi_i phi_j = delta_ij)
 * and sign-fixed so the largest-magnitude grid value is positive. The
 * contact interaction is diagonal on the DVR grid, giving
 *   W[i][j][k][l] = dx * sum_x phi_i phi_j phi_k phi_l.
 * W is stored as an (M*M) x (M*M) matrix indexed by (i*M + j, k*M + l).
 */
struct OrbitalBasis {
  int size = 0;
  Eigen::VectorXd points;
  double dx = 0.0;
  Eigen::MatrixXd orbitals;  ///< n_points x M
  Eigen::VectorXd energies;  ///< ascending
  Eigen::MatrixXd W;

  double interaction(int i, int j, int k, int l) const {
    return W(i * size + j, k * size + l);
  }
  int n_points() const { return static_cast<int>(points.size()); }
};

/// Throws NumericalError when the eigen-residual exceeds 1e-8 (reported).
OrbitalBasis solve_one_body(const GridSpec& grid, const TrapParams& trap, int M);

/// Values of every orbital at an arbitrary position, by sine-DVR interpolation.
Eigen::VectorXd orbital_values_at(const OrbitalBasis& basis, const GridSpec& grid, double x);

/// |zeta(1/2)|.
double zeta_half_abs();

/**
 * Effective 1D interspecies coupling from a 3D scattering length,
 *   g = 2 hbar^2 a_s / (mu a_perp^2) * (1 - |zeta(1/2)| a_s / (sqrt(2) a_perp))^-1.
 * Defaults hbar = 1 and mu = M/2 = 1/2 are the rescaled units used throughout.
 * Throws ResonanceError when the bracket is within 1e-9 of zero.
 */
double coupling_from_3d(double a_s, double a_perp, double reduced_mass = 0.5, double hbar = 1.0);

}  // namespace fermix

// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/basis.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <string>

#include "fermix/errors.hpp"

namespace fermix {

OrbitalBasis solve_one_body(const GridSpec& grid, const TrapParams& trap, int M) {
  if (M < 1 || M > grid.n_points)
    throw ConfigError("basis: need 1 <= M <= n_points, got M=" + std::to_string(M));

  const Eigen::MatrixXd h = one_body_hamiltonian(grid, trap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("basis: one-body eigensolver failed");

  OrbitalBasis b;
  b.size = M;
  b.points = grid.points;
  b.dx = grid.weight;
  b.energies = es.eigenvalues().head(M);
  b.orbitals = es.eigenvectors().leftCols(M) / std::sqrt(grid.weight);

  // The trap is even, so on a box centred at 0 every nondegenerate orbital has
  // definite parity; project it out exactly (the eigensolver leaves ~1e-13).
  if (std::abs(grid.x_min + grid.x_max) <= 1e-12 * grid.length()) {
    for (int i = 0; i < M; ++i) {
      Eigen::VectorXd phi = b.orbitals.col(i);
      const Eigen::VectorXd mirrored = phi.reverse();
      const double parity = phi.dot(mirrored) >= 0.0 ? 1.0 : -1.0;
      phi = 0.5 * (phi + parity * mirrored);
      b.orbitals.col(i) = phi / (phi.norm() * std::sqrt(grid.weight));
    }
  }

  for (int i = 0; i < M; ++i) {
    Eigen::Index imax = 0;
    b.orbitals.col(i).cwiseAbs().maxCoeff(&imax);
    if (b.orbitals(imax, i) < 0.0) b.orbitals.col(i) *= -1.0;
  }

  const double residual =
      ((h * b.orbitals) - b.orbitals * b.energies.asDiagonal()).colwise().norm().maxCoeff() *
      std::sqrt(grid.weight);
  if (residual > 1e-8) throw NumericalError("basis: eigenpair residual too large", residual);

  // Pair products P(x, i*M+j) = phi_i(x) phi_j(x); W = dx P^T P.
  const int n = grid.n_points;
  Eigen::MatrixXd pairs(n, M * M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) pairs.col(i * M + j) = b.orbitals.col(i).cwiseProduct(b.orbitals.col(j));
  b.W = grid.weight * (pairs.transpose() * pairs);
  // Exact (ij) <-> (kl) symmetry; i<->j and k<->l hold by construction of the columns.
  b.W = 0.5 * (b.W + b.W.transpose()).eval();
  return b;
}

Eigen::VectorXd orbital_values_at(const OrbitalBasis& basis, const GridSpec& grid, double x) {
  return basis.orbitals.transpose() * dvr_interpolation_row(grid, x);
}

double zeta_half_abs() { return std::abs(boost::math::zeta(0.5)); }

double coupling_from_3d(double a_s, double a_perp, double reduced_mass, double hbar) {
  if (!(a_perp > 0.0)) throw ConfigError("coupling: a_perp must be positive");
  if (!(reduced_mass > 0.0)) throw ConfigError("coupling: reduced mass must be positive");
  const double bracket = 1.0 - zeta_half_abs() * a_s / (std::sqrt(2.0) * a_perp);
  if (std::abs(bracket) < 1e-9)
    throw ResonanceError("coupling: confinement-induced resonance (a_s/a_perp = " +
                         std::to_string(a_s / a_perp) + ")");
  return 2.0 * hbar * hbar * a_s / (reduced_mass * a_perp * a_perp) / bracket;
}

}  // namespace fermix

// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fermix/basis.hpp"
#include "fermix/grid.hpp"
#include "fermix/propagation.hpp"

namespace fermix {

/// One Slater determinant per species; orbitals are weight-normalized
/// columns on the grid (dx * phi^H phi = 1).
struct HFState {
  Eigen::MatrixXcd orbitals_a;
  Eigen::MatrixXcd orbitals_b;
  double time = 0.0;

  int n_a() const { return static_cast<int>(orbitals_a.cols()); }
  int n_b() const { return static_cast<int>(orbitals_b.cols()); }
};

struct HFOptions {
  double tau = 20.0;         ///< initial imaginary-time step
  double tau_min = 1e-3;     ///< below this the SCF is declared oscillating
  int max_iterations = 5000;
  double energy_tol = 1e-10;
  double residual_tol = 1e-6;
  /// When set, orbitals are restricted to the span of these one-body orbitals.
  const OrbitalBasis* subspace = nullptr;
};

struct HFReport {
  double energy = 0.0;
  int iterations = 0;
  std::vector<double> energy_trace;
};

/// Species density sum_j |phi_j(x)|^2 (integrates to N with weight dx).
Eigen::VectorXd hf_density(const Eigen::MatrixXcd& orbitals);

/// sum_sigma sum_j <phi_j|h|phi_j> + g dx sum_x rho_A rho_B.
double hf_energy(const HFState& state, const GridSpec& grid, const TrapParams& trap, double g);

/// max |dx * Phi^H Phi - 1| over both species.
double hf_orthonormality_error(const HFState& state, double dx);

/**
 * Self-consistent ground state by imaginary-time evolution of
 *   d phi^A / d tau = -(h + g rho_B) phi^A,   d phi^B / d tau = -(h + g rho_A) phi^B
 * with exact exponentials of the frozen mean-field operator and per-species
 * Gram-Schmidt after every step. Species are updated alternately.
 *
 * Initial orbitals are the one-body eigenstates; the A orbitals are shifted
 * by -seed * f(x) and the B orbitals by +seed * f(x), f(x) = x exp(-x^2/2),
 * so a nonzero seed tilts the species towards opposite wells.
 * Throws NumericalError (energy trace in the message) when the SCF
 * oscillates or does not converge.
 */
HFState hf_ground(const GridSpec& grid, const TrapParams& trap, double g, int n_a, int n_b,
                  double seed_asymmetry = 0.0, const HFOptions& opts = {},
                  HFReport* report = nullptr);

using HFObserver = std::function<void(const HFState&)>;

/**
 * Time-dependent HF by symmetric splitting: half step of the local
 * potential V + g rho_other (exact phase rotation, densities unchanged),
 * full kinetic step (exact, via discrete sine transform), half potential
 * step with the updated densities. Each species evolves under a Hermitian
 * one-body operator, so orthonormality is preserved to rounding; a drift
 * above 1e-4 aborts with NumericalError.
 */
void hf_propagate(const HFState& initial, const GridSpec& grid, const TrapParams& trap, double g,
                  const PropagationConfig& cfg, const HFObserver& observe);

std::vector<HFState> hf_propagate(const HFState& initial, const GridSpec& grid,
                                  const TrapParams& trap, double g, const PropagationConfig& cfg);

}  // namespace fermix

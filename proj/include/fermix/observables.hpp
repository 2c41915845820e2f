// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file observables.hpp
 * @brief Reduced density matrices, correlation maps and scalar diagnostics.
 *
 * Densities are grid functions normalized to the particle number:
 * dx * sum_x rho(x) = N.
 */

#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fermix/basis.hpp"
#include "fermix/fock.hpp"
#include "fermix/hf_solver.hpp"

namespace fermix {

/**
 * rho(x, x') = <Psi^+(x') Psi(x)> = modes * gamma * modes^H, with
 * weight-orthonormal modes (dx * modes^H modes = 1). For CI the modes are the
 * fixed orbitals and gamma[q][p] = <a+_p a_q>; for HF the modes are the
 * occupied orbitals and gamma is the identity.
 */
struct OneBodyRDM {
  Species species = Species::A;
  int n_particles = 0;
  double dx = 0.0;
  Eigen::MatrixXcd modes;
  Eigen::MatrixXcd gamma;

  Eigen::MatrixXcd on_grid() const;
  Eigen::VectorXd density() const;
  /// Eigenvalues of gamma, descending.
  Eigen::VectorXd natural_populations() const;
  double trace() const;
};

OneBodyRDM one_body_rdm(const CIState& state, Species s, const OrbitalBasis& basis);
OneBodyRDM one_body_rdm(const HFState& state, Species s, double dx);

/// <a+_p a_q> in the fixed orbital basis (M x M, Hermitian).
Eigen::MatrixXcd orbital_rdm(const CIState& state, Species s);

/// Density on the grid without forming the full matrix.
Eigen::VectorXd density(const CIState& state, Species s, const OrbitalBasis& basis);
Eigen::VectorXd density(const HFState& state, Species s);

enum class MapKind { G1, G2Intra, G2Inter };

std::string_view to_string(MapKind k);

/**
 * Values on grid x grid. Entries where either density falls below
 * floor * max density are NaN. `defined` is false for an intraspecies g2
 * of a species with fewer than two particles (values then all zero).
 * For g1, `values` holds |g1| and `phase` the complex map.
 */
struct CorrelationMap {
  MapKind kind = MapKind::G1;
  double time = 0.0;
  bool defined = true;
  Eigen::MatrixXd values;
  Eigen::MatrixXcd phase;
};

inline constexpr double kDensityFloor = 1e-8;

/// g1(x, x') = rho(x, x') / sqrt(rho(x) rho(x')).
CorrelationMap g1_map(const OneBodyRDM& rdm, double floor = kDensityFloor);

/**
 * Diagonal two-body density rho2(x, x') = <Psi+_s(x) Psi+_t(x') Psi_t(x') Psi_s(x)>
 * for species s at x and t at x'. Integrates to N(N-1) for s == t and
 * N_A N_B otherwise. The intraspecies diagonal is identically zero.
 */
Eigen::MatrixXd two_body_density(const CIState& state, Species s, Species t,
                                 const OrbitalBasis& basis);

/// g2 = rho2(x, x') / (rho_s(x) rho_t(x')), masked like g1.
CorrelationMap g2_map(const CIState& state, Species s, Species t, const OrbitalBasis& basis,
                      double floor = kDensityFloor);

/// [sum rho_A rho_B]^2 / (sum rho_A^2 sum rho_B^2). Throws AnalysisError
/// when either density vanishes identically or is negative.
double overlap_lambda(const Eigen::VectorXd& rho_a, const Eigen::VectorXd& rho_b);

/// Local maxima inside [x_lo, x_hi] whose topographic prominence (restricted
/// to the region) exceeds prominence * region maximum.
int count_filaments(const Eigen::VectorXd& density, const Eigen::VectorXd& points, double x_lo,
                    double x_hi, double prominence = 0.05);

/// Angular frequency of the dominant oscillation of a uniformly sampled
/// series: mean removed, Hann window, zero padding, parabolic peak
/// interpolation. The zero-frequency lobe is skipped. Throws AnalysisError
/// when the record covers fewer than `min_periods` periods of the expected
/// mode (of the detected one when `expected` is 0) or no peak rises above
/// the noise floor.
double breathing_frequency(const std::vector<double>& times, const std::vector<double>& values,
                           double expected = 0.0, double min_periods = 3.0);

/// (1 / 2N) dx sum |rho - rho_ref| per time.
std::vector<double> density_deviation(const std::vector<Eigen::VectorXd>& rho,
                                      const std::vector<Eigen::VectorXd>& rho_ref, double dx,
                                      int n_particles);

/// <x^2> per particle.
double second_moment(const Eigen::VectorXd& rho, const Eigen::VectorXd& points);

}  // namespace fermix

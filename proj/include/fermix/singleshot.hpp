// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file singleshot.hpp
 * @brief Simulated in-situ absorption images of a CI state.
 *
 * Positions are drawn one at a time from the current one-body density by
 * rejection sampling on the grid nodes; after each draw the field operator
 * at that position is applied to a private copy of the state, which is then
 * renormalized. Images are the drawn positions convolved with a Gaussian
 * point-spread function.
 */

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fermix/basis.hpp"
#include "fermix/fock.hpp"
#include "fermix/grid.hpp"

namespace fermix {

enum class SpeciesOrder { AThenB, BThenA };

std::string_view to_string(SpeciesOrder o);

struct ShotConfig {
  double psf_width = 1.0;
  Eigen::VectorXd image_grid;  ///< empty: the simulation grid
  SpeciesOrder species_order = SpeciesOrder::AThenB;
  std::uint64_t rng_seed = 0;
  int n_shots = 1;
  long max_proposals = 1000000;

  /// Throws ConfigError unless psf_width > 0, n_shots >= 1 and the image
  /// grid (when given) is increasing and covers the simulation box.
  void validate(const GridSpec& grid) const;
  Eigen::VectorXd resolved_image_grid(const GridSpec& grid) const;
};

struct ShotImage {
  std::vector<double> positions_a;
  std::vector<double> positions_b;
  Eigen::VectorXd intensity_a;
  Eigen::VectorXd intensity_b;
  double time = 0.0;
};

/// Psi_s(x)|psi> renormalized. Throws InvalidPositionError when the norm
/// before renormalization is below 1e-14.
CIState annihilate_at(const CIState& state, Species s, double x, const OrbitalBasis& basis,
                      const GridSpec& grid);

/// sum_i G(x~ - x_i) with a unit-area Gaussian of width w.
Eigen::VectorXd psf_image(const std::vector<double>& positions, const Eigen::VectorXd& image_grid,
                          double width);

/// One image. `shot_index` selects the random stream: identical
/// (rng_seed, shot_index) pairs give identical images.
ShotImage sample_shot(const CIState& state, const ShotConfig& cfg, const OrbitalBasis& basis,
                      const GridSpec& grid, std::uint64_t shot_index = 0);

struct ShotAverage {
  int n_shots = 0;
  Eigen::VectorXd mean_a, mean_b;
  Eigen::VectorXd variance_a, variance_b;  ///< sample variance per image node
  Eigen::VectorXd target_a, target_b;      ///< N * (PSF convolved with rho / N)
};

/// Shots 0..n_shots-1 of the configured stream. Per-shot images are handed
/// to `keep` in shot order when it is non-null.
ShotAverage average_shots(const CIState& state, const ShotConfig& cfg, const OrbitalBasis& basis,
                          const GridSpec& grid, std::vector<ShotImage>* keep = nullptr);

/// Image expected from the density: sum_j dx rho_j G(x~ - x_j).
Eigen::VectorXd averaged_image_target(const Eigen::VectorXd& rho, const GridSpec& grid,
                                      const Eigen::VectorXd& image_grid, double width);

/// Trapezoid rule on a nonuniform grid.
double trapezoid(const Eigen::VectorXd& y, const Eigen::VectorXd& x);

}  // namespace fermix

// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/singleshot.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fermix/errors.hpp"
#include "fermix/observables.hpp"

namespace fermix {
namespace {

constexpr double kMinNorm = 1e-14;

CIState collapse(const CIState& state, Species s, const Eigen::VectorXd& amp, double x) {
  CIState out = annihilate_combination(state, s, amp);
  const double nrm = out.norm();
  if (!(nrm >= kMinNorm))
    throw InvalidPositionError("annihilate_at: no weight of species " + std::string(to_string(s)) +
                                   " at x = " + std::to_string(x),
                               nrm);
  out.coeff /= nrm;
  return out;
}

}  // namespace

std::string_view to_string(SpeciesOrder o) {
  return o == SpeciesOrder::AThenB ? "A-then-B" : "B-then-A";
}

void ShotConfig::validate(const GridSpec& grid) const {
  if (!(psf_width > 0.0)) throw ConfigError("shots: psf_width must be positive");
  if (n_shots < 1) throw ConfigError("shots: n_shots must be >= 1");
  if (max_proposals < 1) throw ConfigError("shots: max_proposals must be >= 1");
  if (image_grid.size() > 0) {
    for (Eigen::Index i = 1; i < image_grid.size(); ++i)
      if (!(image_grid(i) > image_grid(i - 1))) throw ConfigError("shots: image grid must increase");
    if (image_grid(0) > grid.points(0) || image_grid(image_grid.size() - 1) < grid.points(grid.n_points - 1))
      throw ConfigError("shots: image grid must cover the simulation box");
  }
}

Eigen::VectorXd ShotConfig::resolved_image_grid(const GridSpec& grid) const {
  return image_grid.size() > 0 ? image_grid : grid.points;
}

CIState annihilate_at(const CIState& state, Species s, double x, const OrbitalBasis& basis,
                      const GridSpec& grid) {
  if (state.n(s) < 1) throw ConfigError("annihilate_at: species is empty");
  return collapse(state, s, orbital_values_at(basis, grid, x), x);
}

Eigen::VectorXd psf_image(const std::vector<double>& positions, const Eigen::VectorXd& image_grid,
                          double width) {
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * width);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(image_grid.size());
  for (double x : positions)
    out.array() += norm * (-(image_grid.array() - x).square() / (2.0 * width * width)).exp();
  return out;
}

Eigen::VectorXd averaged_image_target(const Eigen::VectorXd& rho, const GridSpec& grid,
                                      const Eigen::VectorXd& image_grid, double width) {
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * width);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(image_grid.size());
  for (int j = 0; j < grid.n_points; ++j) {
    if (rho(j) == 0.0) continue;
    out.array() += grid.weight * rho(j) * norm *
                   (-(image_grid.array() - grid.points(j)).square() / (2.0 * width * width)).exp();
  }
  return out;
}

double trapezoid(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i) s += 0.5 * (x(i) - x(i - 1)) * (y(i) + y(i - 1));
  return s;
}

ShotImage sample_shot(const CIState& state, const ShotConfig& cfg, const OrbitalBasis& basis,
                      const GridSpec& grid, std::uint64_t shot_index) {
  cfg.validate(grid);
  if (basis.n_points() != grid.n_points) throw ConfigError("sample_shot: basis does not match grid");
  if (std::abs(state.norm() - 1.0) > 1e-8) throw ConfigError("sample_shot: state is not normalized");

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed),
                    static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                    static_cast<std::uint32_t>(shot_index),
                    static_cast<std::uint32_t>(shot_index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> pick(0, grid.n_points - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ShotImage img;
  img.time = state.time;
  CIState psi = state;
  const Species order[2] = {
      cfg.species_order == SpeciesOrder::AThenB ? Species::A : Species::B,
      cfg.species_order == SpeciesOrder::AThenB ? Species::B : Species::A};
  for (Species s : order) {
    std::vector<double>& pos = s == Species::A ? img.positions_a : img.positions_b;
    const int count = psi.n(s);
    for (int k = 0; k < count; ++k) {
      const Eigen::VectorXd rho = density(psi, s, basis);
      const double top = rho.maxCoeff();
      if (!(top > 0.0)) throw SamplingError("sample_shot: conditional density vanishes");
      int node = -1;
      for (long trial = 0; trial < cfg.max_proposals; ++trial) {
        const int j = pick(rng);
        const double q = top * unit(rng);
        if (rho(j) > q) {
          node = j;
          break;
        }
      }
      if (node < 0)
        throw SamplingError("sample_shot: proposal budget exhausted after " +
                            std::to_string(cfg.max_proposals) + " draws");
      const double x = grid.points(node);
      pos.push_back(x);
      // The very last particle leaves the vacuum; nothing to condition on.
      if (psi.n(s) > 1 || psi.n(s == Species::A ? Species::B : Species::A) > 0)
        psi = collapse(psi, s, basis.orbitals.row(node).transpose(), x);
    }
  }
  const Eigen::VectorXd image_grid = cfg.resolved_image_grid(grid);
  img.intensity_a = psf_image(img.positions_a, image_grid, cfg.psf_width);
  img.intensity_b = psf_image(img.positions_b, image_grid, cfg.psf_width);
  return img;
}

ShotAverage average_shots(const CIState& state, const ShotConfig& cfg, const OrbitalBasis& basis,
                          const GridSpec& grid, std::vector<ShotImage>* keep) {
  cfg.validate(grid);
  const int n = cfg.n_shots;
  std::vector<ShotImage> shots(n);
  std::string failure;
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    try {
      shots[k] = sample_shot(state, cfg, basis, grid, static_cast<std::uint64_t>(k));
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed) failure = e.what();
        failed = true;
      }
    }
  }
  if (failed) throw SamplingError("average_shots: " + failure);

  const Eigen::VectorXd image_grid = cfg.resolved_image_grid(grid);
  const Eigen::Index m = image_grid.size();
  ShotAverage avg;
  avg.n_shots = n;
  avg.mean_a = Eigen::VectorXd::Zero(m);
  avg.mean_b = Eigen::VectorXd::Zero(m);
  // Fixed summation order keeps results independent of the thread count.
  for (const ShotImage& s : shots) {
    avg.mean_a += s.intensity_a;
    avg.mean_b += s.intensity_b;
  }
  avg.mean_a /= n;
  avg.mean_b /= n;
  avg.variance_a = Eigen::VectorXd::Zero(m);
  avg.variance_b = Eigen::VectorXd::Zero(m);
  if (n > 1) {
    for (const ShotImage& s : shots) {
      avg.variance_a += (s.intensity_a - avg.mean_a).cwiseAbs2();
      avg.variance_b += (s.intensity_b - avg.mean_b).cwiseAbs2();
    }
    avg.variance_a /= (n - 1);
    avg.variance_b /= (n - 1);
  }
  avg.target_a = averaged_image_target(density(state, Species::A, basis), grid, image_grid, cfg.psf_width);
  avg.target_b = averaged_image_target(density(state, Species::B, basis), grid, image_grid, cfg.psf_width);
  if (keep) *keep = std::move(shots);
  return avg;
}

}  // namespace fermix

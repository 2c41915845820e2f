// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Run configuration: JSON file with nested sections plus
 * `dotted.key=value` overrides.
 *
 * Keys absent from the file keep their defaults; unknown keys are rejected.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fermix/grid.hpp"
#include "fermix/krylov.hpp"
#include "fermix/propagation.hpp"
#include "fermix/singleshot.hpp"

namespace fermix {

enum class SolverKind { HF, CI, Both };

struct HFSettings {
  double seed_asymmetry = 0.0;
  double tau = 20.0;
  int max_iterations = 5000;
};

struct ShotSettings {
  bool enabled = false;
  std::vector<double> times{25.0};
  int n_shots = 500;
  double psf_width = 1.0;
  SpeciesOrder species_order = SpeciesOrder::AThenB;
  std::vector<int> running_average_at{1, 50, 500};
  bool keep_images = true;
};

struct RunConfig {
  TrapParams trap;
  int grid_points = 400;
  double x_min = -40.0;
  double x_max = 40.0;
  int basis_M = 10;
  int n_a = 3;
  int n_b = 1;
  double g_initial = 0.1;
  double g_final = 4.0;
  SolverKind solver = SolverKind::Both;
  PropagationConfig propagation;
  LanczosOptions lanczos;
  HFSettings hf;
  std::vector<double> snapshot_times{0.0, 24.0, 50.0, 100.0};
  ShotSettings shots;
  double filament_prominence = 0.05;
  std::vector<int> converge_M{10, 12};
  std::string output_dir = "fermix_out";
  std::uint64_t rng_seed = 0;
  /// Set when the input had N_B > N_A and the species were swapped.
  bool relabeled = false;

  /// Throws ConfigError on any inconsistent setting.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Overlays `j` onto the defaults. Swaps species when N_B > N_A.
RunConfig config_from_json(const nlohmann::json& j);

/// Applies one `a.b.c=value` override; value is parsed as JSON when
/// possible and taken as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::string>& overrides = {});

/// SHA-256 (hex) of the canonical JSON form.
std::string config_hash(const RunConfig& cfg);

std::string sha256_hex(const std::string& data);

}  // namespace fermix

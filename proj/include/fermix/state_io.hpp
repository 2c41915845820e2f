// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file state_io.hpp
 * @brief Checkpoints and analysis outputs.
 *
 * CI checkpoint: "FXCI", u32 version, u32 M, u32 N_A, u32 N_B, f64 time,
 * f64 g, then the coefficient matrix row-major as (re, im) f64 pairs.
 * HF checkpoint: "FXHF", u32 version, u32 n_points, u32 N_A, u32 N_B,
 * f64 time, f64 g, then the A and B orbitals column by column as (re, im).
 * All numbers little-endian.
 *
 * Arrays: raw little-endian float64, row-major, with a sidecar `<file>.meta`
 * of `key = value` lines (dtype, shape, order, axis names and values).
 */

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fermix/fock.hpp"
#include "fermix/hf_solver.hpp"

namespace fermix {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CICheckpoint {
  CIState state;
  double g = 0.0;
};

struct HFCheckpoint {
  HFState state;
  double g = 0.0;
};

void save_ci_state(const std::filesystem::path& path, const CIState& state, double g);
/// Throws ConfigError on a bad magic, version or truncated file.
CICheckpoint load_ci_state(const std::filesystem::path& path);

void save_hf_state(const std::filesystem::path& path, const HFState& state, double g);
HFCheckpoint load_hf_state(const std::filesystem::path& path);

struct Axis {
  std::string name;
  std::vector<double> values;
};

/// Row-major (rows x cols) array; axes[0] labels rows, axes[1] columns.
void write_raw(const std::filesystem::path& path, const Eigen::MatrixXd& data,
               const std::vector<Axis>& axes);
/// Reads back an array written by write_raw (shape from the sidecar).
Eigen::MatrixXd read_raw(const std::filesystem::path& path);

/// Header row then one line per row, numbers in shortest round-trip form.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fermix

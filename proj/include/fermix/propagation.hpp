// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace fermix {

/**
 * Time grid and accuracy controls shared by the CI and HF propagators.
 * States are recorded at t0 + k * record_stride * dt and at t_final.
 * The CI propagator substeps adaptively inside each dt (krylov_dim, tol);
 * TDHF uses split steps no longer than max_substep.
 */
struct PropagationConfig {
  double dt = 0.5;
  double t_final = 100.0;
  int krylov_dim = 12;
  double tol = 1e-9;
  int record_stride = 1;
  double max_substep = 0.005;

  /// Throws ConfigError unless dt > 0, krylov_dim >= 2, tol > 0,
  /// record_stride >= 1, max_substep > 0, t_final >= 0.
  void validate() const;
};

/// Recording times produced by a PropagationConfig starting at t0.
std::vector<double> record_times(double t0, const PropagationConfig& cfg);

}  // namespace fermix

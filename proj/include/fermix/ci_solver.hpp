// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "fermix/basis.hpp"
#include "fermix/fock.hpp"
#include "fermix/krylov.hpp"
#include "fermix/propagation.hpp"

namespace fermix {

struct GroundStateReport {
  double energy = 0.0;
  double residual = 0.0;
  int matvecs = 0;
};

/**
 * Lowest CI eigenstate by restarted Lanczos. The start vector is the
 * noninteracting ground determinant with a 1e-3 admixture of the
 * determinant promoting the highest occupied A orbital by one level, so
 * both reflection-parity sectors are reachable.
 */
CIState ground_state_ci(const OrbitalBasis& basis, double g, int n_a, int n_b,
                        const LanczosOptions& opts = {}, GroundStateReport* report = nullptr);

/// <psi|H|psi> for a normalized state. Imaginary part is returned separately
/// through `imag` when requested.
double ci_energy(const CIState& state, const OrbitalBasis& basis, double g, double* imag = nullptr);

using CIObserver = std::function<void(const CIState&)>;

/// Propagates under exp(-i H(g) t) and hands every recorded state to `observe`,
/// starting with the initial one.
void propagate_ci(const CIState& initial, const OrbitalBasis& basis, double g,
                  const PropagationConfig& cfg, const CIObserver& observe);

std::vector<CIState> propagate_ci(const CIState& initial, const OrbitalBasis& basis, double g,
                                  const PropagationConfig& cfg);

}  // namespace fermix

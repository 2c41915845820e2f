// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "fermix/fock.hpp"

namespace fermix {

/// y = H x for a Hermitian operator on coefficient matrices.
using LinearOperator = std::function<void(const CoeffMatrix&, CoeffMatrix&)>;

cplx inner(const CoeffMatrix& a, const CoeffMatrix& b);

struct LanczosOptions {
  int subspace = 60;
  int max_restarts = 400;
  double residual_tol = 1e-9;
};

struct EigenpairResult {
  double value = 0.0;
  CoeffMatrix vector;
  double residual = 0.0;  ///< ||H x - value x|| for unit x
  int matvecs = 0;
};

/// Lowest eigenpair by explicitly restarted Lanczos with full
/// reorthogonalization. Throws NumericalError with the final residual when
/// max_restarts is exhausted.
EigenpairResult lowest_eigenpair(const LinearOperator& op, const CoeffMatrix& start,
                                 const LanczosOptions& opts = {});

/**
 * Short-iterative Lanczos propagator for psi <- exp(-i H t) psi.
 * Step sizes adapt so the standard a-posteriori estimate
 * beta_0 beta_m |[exp(-i h T_m)]_{m,1}| stays below tol per step.
 */
class KrylovPropagator {
 public:
  KrylovPropagator(LinearOperator op, int krylov_dim, double tol);

  /// Advances psi by exactly `duration`, substepping as required.
  void advance(CoeffMatrix& psi, double duration);

  int steps_taken() const { return steps_; }
  int matvecs() const { return matvecs_; }

 private:
  LinearOperator op_;
  int m_;
  double tol_;
  double h_suggest_ = 0.5;
  int steps_ = 0;
  int matvecs_ = 0;
};

}  // namespace fermix

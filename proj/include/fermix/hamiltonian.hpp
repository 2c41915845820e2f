// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "fermix/basis.hpp"
#include "fermix/fock.hpp"

namespace fermix {

/**
 * Matrix-free two-species Hamiltonian
 *   H = sum_p eps_p (a+_p a_p + b+_p b_p) + g sum_{pqrs} W_pqrs a+_p a_q b+_r b_s
 * acting on coefficient matrices. The one-body part is diagonal because the
 * orbitals are eigenfunctions of the one-body Hamiltonian.
 */
class CIHamiltonian {
 public:
  CIHamiltonian(const OrbitalBasis& basis, double g, int n_a, int n_b);

  int M() const { return M_; }
  int n_a() const { return space_a_->N; }
  int n_b() const { return space_b_->N; }
  int rows() const { return space_a_->size(); }
  int cols() const { return space_b_->size(); }
  Eigen::Index dimension() const { return Eigen::Index(rows()) * cols(); }
  double coupling() const { return g_; }
  const std::shared_ptr<const DeterminantBasis>& space_a() const { return space_a_; }
  const std::shared_ptr<const DeterminantBasis>& space_b() const { return space_b_; }

  /// out = H c. Throws ConfigError on shape mismatch.
  void apply(const CoeffMatrix& c, CoeffMatrix& out) const;
  CoeffMatrix apply(const CoeffMatrix& c) const;

  /// Noninteracting energy of each product determinant.
  const Eigen::MatrixXd& diagonal_one_body() const { return one_body_; }

  /// <psi|H|psi> / <psi|psi> (complex, imaginary part should vanish).
  cplx expectation(const CoeffMatrix& c) const;

 private:
  int M_;
  double g_;
  std::shared_ptr<const DeterminantBasis> space_a_;
  std::shared_ptr<const DeterminantBasis> space_b_;
  ExcitationTable exc_a_;
  ExcitationTable exc_b_;
  Eigen::MatrixXd one_body_;
  Eigen::MatrixXd W_;
};

CIState apply_hamiltonian(const CIState& state, const OrbitalBasis& basis, double g);

}  // namespace fermix

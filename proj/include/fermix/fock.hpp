// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fock.hpp
 * @brief Two-species fermionic Fock space over a truncated orbital basis.
 *
 * A determinant is an occupation bitmask (bit p <-> orbital p). Within a
 * determinant orbitals are ordered by ascending index, so
 *   a_p |n> = (-1)^{#occupied below p} |n - p>.
 * Operators of different species commute; the coefficient matrix
 * C[I][K] multiplies |I>_A (x) |K>_B.
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fermix {

using cplx = std::complex<double>;
using CoeffMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Species { A, B };

std::string_view to_string(Species s);

/// Bitmasks with popcount N over M orbitals, ascending numeric order.
struct DeterminantBasis {
  int M = 0;
  int N = 0;
  std::vector<std::uint64_t> dets;
  std::unordered_map<std::uint64_t, int> lookup;

  int size() const { return static_cast<int>(dets.size()); }
  /// -1 when the mask is not in the basis.
  int index_of(std::uint64_t mask) const;
};

/// Throws ConfigError unless 0 <= N <= M <= 63.
DeterminantBasis enumerate_determinants(int M, int N);

std::shared_ptr<const DeterminantBasis> make_determinant_basis(int M, int N);

/// (-1)^{number of occupied orbitals with index < p}.
inline double fermion_sign(std::uint64_t mask, int p) {
  const std::uint64_t below = mask & ((std::uint64_t{1} << p) - 1);
  return (__builtin_popcountll(below) & 1) ? -1.0 : 1.0;
}

/// One term <target| a+_p a_q |source> = sign.
struct Excitation {
  int det;  ///< partner determinant (target or source, depending on the view)
  int pq;   ///< p * M + q
  double sign;
};

/**
 * All nonzero matrix elements of E_pq = a+_p a_q inside one determinant space,
 * in compressed-row form, grouped both by source and by target.
 */
struct ExcitationTable {
  std::vector<int> by_source_offsets;
  std::vector<Excitation> by_source;  ///< .det = target
  std::vector<int> by_target_offsets;
  std::vector<Excitation> by_target;  ///< .det = source

  static ExcitationTable build(const DeterminantBasis& space);
};

/// a_p from an N-particle space into the matching (N-1)-particle space.
struct AnnihilationTable {
  int M = 0;
  std::vector<int> target;    ///< [J * M + p], -1 when p is empty in J
  std::vector<double> sign;

  static AnnihilationTable build(const DeterminantBasis& from, const DeterminantBasis& to);
};

/// Normalized many-body state on the product determinant basis.
struct CIState {
  std::shared_ptr<const DeterminantBasis> basis_a;
  std::shared_ptr<const DeterminantBasis> basis_b;
  CoeffMatrix coeff;
  double time = 0.0;

  int M() const { return basis_a->M; }
  int n_a() const { return basis_a->N; }
  int n_b() const { return basis_b->N; }
  int n(Species s) const { return s == Species::A ? n_a() : n_b(); }
  double norm() const { return coeff.norm(); }
};

/// State with a single determinant product set to 1.
CIState product_determinant(int M, int n_a, int n_b, std::uint64_t mask_a, std::uint64_t mask_b);

/// Lowest-energy occupation: orbitals 0..N-1.
std::uint64_t lowest_mask(int N);

struct SchmidtSpectrum {
  std::vector<double> lambdas;  ///< descending, sum 1
  Eigen::MatrixXcd vectors_a;   ///< columns: species-A mode coefficients
  Eigen::MatrixXcd vectors_b;
};

SchmidtSpectrum schmidt_decompose(const CIState& state);

/// a_p applied to the given species; the result lives in the (N-1) space.
/// Not renormalized.
CIState annihilate_orbital(const CIState& state, Species s, int p);

/// sum_p amp[p] a_p on one species (the field operator at a point when
/// amp holds orbital values there). Not renormalized.
CIState annihilate_combination(const CIState& state, Species s, const Eigen::VectorXd& amp);

}  // namespace fermix

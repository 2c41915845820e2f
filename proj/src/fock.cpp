// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/fock.hpp"

#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "fermix/errors.hpp"

namespace fermix {

std::string_view to_string(Species s) { return s == Species::A ? "A" : "B"; }

int DeterminantBasis::index_of(std::uint64_t mask) const {
  const auto it = lookup.find(mask);
  return it == lookup.end() ? -1 : it->second;
}

DeterminantBasis enumerate_determinants(int M, int N) {
  if (M < 0 || M > 63) throw ConfigError("fock: orbital count must be in [0, 63]");
  if (N < 0 || N > M)
    throw ConfigError("fock: particle number " + std::to_string(N) + " exceeds orbital count " +
                      std::to_string(M));
  DeterminantBasis b;
  b.M = M;
  b.N = N;
  if (N == 0) {
    b.dets.push_back(0);
  } else {
    // Gosper's hack walks popcount-N masks in ascending order.
    const std::uint64_t limit = std::uint64_t{1} << M;
    std::uint64_t v = (std::uint64_t{1} << N) - 1;
    while (v < limit) {
      b.dets.push_back(v);
      const std::uint64_t t = v | (v - 1);
      v = (t + 1) | (((~t & -~t) - 1) >> (__builtin_ctzll(v) + 1));
    }
  }
  b.lookup.reserve(b.dets.size());
  for (std::size_t i = 0; i < b.dets.size(); ++i) b.lookup.emplace(b.dets[i], static_cast<int>(i));
  return b;
}

std::shared_ptr<const DeterminantBasis> make_determinant_basis(int M, int N) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const DeterminantBasis>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{M, N}];
  if (!slot) slot = std::make_shared<const DeterminantBasis>(enumerate_determinants(M, N));
  return slot;
}

ExcitationTable ExcitationTable::build(const DeterminantBasis& space) {
  const int M = space.M;
  const int n = space.size();
  ExcitationTable t;
  t.by_source_offsets.reserve(n + 1);
  t.by_source_offsets.push_back(0);
  std::vector<int> target_count(n, 0);
  for (int j = 0; j < n; ++j) {
    const std::uint64_t src = space.dets[j];
    for (int q = 0; q < M; ++q) {
      if (!(src >> q & 1)) continue;
      const std::uint64_t mid = src & ~(std::uint64_t{1} << q);
      const double sq = fermion_sign(src, q);
      for (int p = 0; p < M; ++p) {
        if (mid >> p & 1) continue;
        const std::uint64_t dst = mid | (std::uint64_t{1} << p);
        const int i = space.index_of(dst);
        t.by_source.push_back({i, p * M + q, sq * fermion_sign(mid, p)});
        ++target_count[i];
      }
    }
    t.by_source_offsets.push_back(static_cast<int>(t.by_source.size()));
  }

  t.by_target_offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) t.by_target_offsets[i + 1] = t.by_target_offsets[i] + target_count[i];
  t.by_target.resize(t.by_source.size());
  std::vector<int> fill(t.by_target_offsets.begin(), t.by_target_offsets.end() - 1);
  for (int j = 0; j < n; ++j) {
    for (int k = t.by_source_offsets[j]; k < t.by_source_offsets[j + 1]; ++k) {
      const Excitation& e = t.by_source[k];
      t.by_target[fill[e.det]++] = {j, e.pq, e.sign};
    }
  }
  return t;
}

AnnihilationTable AnnihilationTable::build(const DeterminantBasis& from, const DeterminantBasis& to) {
  if (from.M != to.M || to.N != from.N - 1)
    throw ConfigError("fock: annihilation needs matching spaces with N and N-1 particles");
  AnnihilationTable t;
  t.M = from.M;
  t.target.assign(static_cast<std::size_t>(from.size()) * from.M, -1);
  t.sign.assign(t.target.size(), 0.0);
  for (int j = 0; j < from.size(); ++j) {
    const std::uint64_t src = from.dets[j];
    for (int p = 0; p < from.M; ++p) {
      if (!(src >> p & 1)) continue;
      t.target[j * from.M + p] = to.index_of(src & ~(std::uint64_t{1} << p));
      t.sign[j * from.M + p] = fermion_sign(src, p);
    }
  }
  return t;
}

std::uint64_t lowest_mask(int N) { return N <= 0 ? 0 : ((std::uint64_t{1} << N) - 1); }

CIState product_determinant(int M, int n_a, int n_b, std::uint64_t mask_a, std::uint64_t mask_b) {
  CIState s;
  s.basis_a = make_determinant_basis(M, n_a);
  s.basis_b = make_determinant_basis(M, n_b);
  const int ia = s.basis_a->index_of(mask_a);
  const int ib = s.basis_b->index_of(mask_b);
  if (ia < 0 || ib < 0) throw ConfigError("fock: mask not in determinant basis");
  s.coeff = CoeffMatrix::Zero(s.basis_a->size(), s.basis_b->size());
  s.coeff(ia, ib) = 1.0;
  return s;
}

SchmidtSpectrum schmidt_decompose(const CIState& state) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(state.coeff),
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtSpectrum out;
  const Eigen::VectorXd& sv = svd.singularValues();
  out.lambdas.resize(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) out.lambdas[k] = sv(k) * sv(k);
  out.vectors_a = svd.matrixU();
  out.vectors_b = svd.matrixV().conjugate();
  return out;
}

namespace {

const AnnihilationTable& cached_annihilation(int M, int N) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<AnnihilationTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{M, N}];
  if (!slot)
    slot = std::make_unique<AnnihilationTable>(
        AnnihilationTable::build(*make_determinant_basis(M, N), *make_determinant_basis(M, N - 1)));
  return *slot;
}

}  // namespace

CIState annihilate_combination(const CIState& state, Species s, const Eigen::VectorXd& amp) {
  const int M = state.M();
  const int N = state.n(s);
  if (N < 1) throw ConfigError("fock: cannot annihilate from an empty species");
  if (amp.size() != M) throw ConfigError("fock: amplitude vector size must equal M");
  const AnnihilationTable& tab = cached_annihilation(M, N);

  CIState out;
  out.time = state.time;
  if (s == Species::A) {
    out.basis_a = make_determinant_basis(M, N - 1);
    out.basis_b = state.basis_b;
    out.coeff = CoeffMatrix::Zero(out.basis_a->size(), state.coeff.cols());
    for (int j = 0; j < state.basis_a->size(); ++j) {
      for (int p = 0; p < M; ++p) {
        const int t = tab.target[j * M + p];
        if (t < 0 || amp(p) == 0.0) continue;
        out.coeff.row(t) += (tab.sign[j * M + p] * amp(p)) * state.coeff.row(j);
      }
    }
  } else {
    out.basis_a = state.basis_a;
    out.basis_b = make_determinant_basis(M, N - 1);
    out.coeff = CoeffMatrix::Zero(state.coeff.rows(), out.basis_b->size());
    for (int l = 0; l < state.basis_b->size(); ++l) {
      for (int r = 0; r < M; ++r) {
        const int t = tab.target[l * M + r];
        if (t < 0 || amp(r) == 0.0) continue;
        out.coeff.col(t) += (tab.sign[l * M + r] * amp(r)) * state.coeff.col(l);
      }
    }
  }
  return out;
}

CIState annihilate_orbital(const CIState& state, Species s, int p) {
  Eigen::VectorXd amp = Eigen::VectorXd::Zero(state.M());
  amp(p) = 1.0;
  return annihilate_combination(state, s, amp);
}

}  // namespace fermix

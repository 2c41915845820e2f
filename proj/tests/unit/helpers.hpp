// Shared fixtures for the unit tests.
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fermix/basis.hpp"
#include "fermix/fock.hpp"
#include "fermix/grid.hpp"

namespace testing {

inline fermix::CIState random_state(int M, int na, int nb, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  fermix::CIState s = fermix::product_determinant(M, na, nb, fermix::lowest_mask(na), fermix::lowest_mask(nb));
  for (Eigen::Index i = 0; i < s.coeff.rows(); ++i)
    for (Eigen::Index j = 0; j < s.coeff.cols(); ++j) s.coeff(i, j) = {nd(rng), nd(rng)};
  s.coeff /= s.coeff.norm();
  return s;
}

/// Small grid used where the production 400-point grid is not needed.
inline const fermix::GridSpec& small_grid() {
  static const fermix::GridSpec g = fermix::build_grid(200, -30.0, 30.0);
  return g;
}

inline const fermix::GridSpec& default_grid() {
  static const fermix::GridSpec g = fermix::build_grid();
  return g;
}

/// Position (as a bit list) of occupied orbitals.
inline std::vector<int> occupied(std::uint64_t mask) {
  std::vector<int> out;
  for (int p = 0; p < 64; ++p)
    if (mask >> p & 1) out.push_back(p);
  return out;
}

/// a+_p a_q on an occupation list, computed by moving operators through
/// the ordered product: returns false when the result vanishes.
inline bool apply_hop(std::uint64_t mask, int p, int q, std::uint64_t& out, double& sign) {
  std::vector<int> occ = occupied(mask);
  auto it = std::find(occ.begin(), occ.end(), q);
  if (it == occ.end()) return false;
  sign = ((it - occ.begin()) % 2) ? -1.0 : 1.0;
  occ.erase(it);
  if (std::find(occ.begin(), occ.end(), p) != occ.end()) return false;
  const long before = std::count_if(occ.begin(), occ.end(), [p](int o) { return o < p; });
  sign *= (before % 2) ? -1.0 : 1.0;
  out = 0;
  for (int o : occ) out |= std::uint64_t{1} << o;
  out |= std::uint64_t{1} << p;
  return true;
}

/// Dense CI Hamiltonian built directly from the second-quantized definition.
inline Eigen::MatrixXcd dense_hamiltonian(const fermix::OrbitalBasis& b, double g, int na, int nb) {
  const auto sa = fermix::enumerate_determinants(b.size, na);
  const auto sb = fermix::enumerate_determinants(b.size, nb);
  const int da = sa.size(), db = sb.size(), M = b.size;
  Eigen::MatrixXd phi = b.orbitals;
  auto w = [&](int p, int q, int r, int s) {
    return b.dx * (phi.col(p).array() * phi.col(q).array() * phi.col(r).array() * phi.col(s).array()).sum();
  };
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(da * db, da * db);
  for (int I = 0; I < da; ++I)
    for (int K = 0; K < db; ++K) {
      double e = 0.0;
      for (int p : occupied(sa.dets[I])) e += b.energies(p);
      for (int p : occupied(sb.dets[K])) e += b.energies(p);
      H(I * db + K, I * db + K) += e;
      for (int p = 0; p < M; ++p)
        for (int q = 0; q < M; ++q) {
          std::uint64_t ma;
          double sga;
          if (!apply_hop(sa.dets[I], p, q, ma, sga)) continue;
          for (int r = 0; r < M; ++r)
            for (int s = 0; s < M; ++s) {
              std::uint64_t mb;
              double sgb;
              if (!apply_hop(sb.dets[K], r, s, mb, sgb)) continue;
              const int J = sa.index_of(ma), L = sb.index_of(mb);
              H(J * db + L, I * db + K) += g * sga * sgb * w(p, q, r, s);
            }
        }
    }
  return H;
}

inline Eigen::VectorXcd flatten(const fermix::CoeffMatrix& c) { return c.reshaped<Eigen::RowMajor>(); }

}  // namespace testing

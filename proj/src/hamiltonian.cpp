// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/hamiltonian.hpp"

#include <vector>

#include "fermix/errors.hpp"

namespace fermix {

CIHamiltonian::CIHamiltonian(const OrbitalBasis& basis, double g, int n_a, int n_b)
    : M_(basis.size),
      g_(g),
      space_a_(make_determinant_basis(basis.size, n_a)),
      space_b_(make_determinant_basis(basis.size, n_b)),
      exc_a_(ExcitationTable::build(*space_a_)),
      exc_b_(ExcitationTable::build(*space_b_)),
      W_(basis.W) {
  auto occupied_energy = [&](std::uint64_t mask) {
    double e = 0.0;
    for (int p = 0; p < M_; ++p)
      if (mask >> p & 1) e += basis.energies(p);
    return e;
  };
  one_body_.resize(rows(), cols());
  for (int i = 0; i < rows(); ++i) {
    const double ea = occupied_energy(space_a_->dets[i]);
    for (int k = 0; k < cols(); ++k) one_body_(i, k) = ea + occupied_energy(space_b_->dets[k]);
  }
}

void CIHamiltonian::apply(const CoeffMatrix& c, CoeffMatrix& out) const {
  if (c.rows() != rows() || c.cols() != cols())
    throw ConfigError("hamiltonian: coefficient matrix shape does not match determinant spaces");
  const int na = rows();
  const int nb = cols();
  const int MM = M_ * M_;
  out.resize(na, nb);

  // For every A target I the interaction contribution is
  //   sigma[I][K] = g sum_{(J,pq,s) -> I} sum_{L -> (K,rs,t)} s t W[pq][rs] C[J][L].
  // Gather T[L][e] = s_e C[J_e][L] and Wt[rs][e] = W[pq_e][rs]; then each
  // B excitation L -> K contributes a length-ne real/complex dot product.
#pragma omp parallel
  {
    std::vector<double> t_re, t_im, wt;
#pragma omp for schedule(dynamic, 4)
    for (int i = 0; i < na; ++i) {
      auto row_out = out.row(i);
      for (int k = 0; k < nb; ++k) row_out(k) = one_body_(i, k) * c(i, k);
      if (g_ == 0.0) continue;

      const int e0 = exc_a_.by_target_offsets[i];
      const int ne = exc_a_.by_target_offsets[i + 1] - e0;
      if (ne == 0) continue;
      t_re.assign(static_cast<std::size_t>(nb) * ne, 0.0);
      t_im.assign(t_re.size(), 0.0);
      wt.assign(static_cast<std::size_t>(MM) * ne, 0.0);
      for (int e = 0; e < ne; ++e) {
        const Excitation& ex = exc_a_.by_target[e0 + e];
        const auto src = c.row(ex.det);
        for (int l = 0; l < nb; ++l) {
          t_re[l * ne + e] = ex.sign * src(l).real();
          t_im[l * ne + e] = ex.sign * src(l).imag();
        }
        for (int rs = 0; rs < MM; ++rs) wt[rs * ne + e] = W_(ex.pq, rs);
      }
      for (int l = 0; l < nb; ++l) {
        const double* tr = &t_re[l * ne];
        const double* ti = &t_im[l * ne];
        for (int f = exc_b_.by_source_offsets[l]; f < exc_b_.by_source_offsets[l + 1]; ++f) {
          const Excitation& fx = exc_b_.by_source[f];
          const double* w = &wt[fx.pq * ne];
          double acc_re = 0.0, acc_im = 0.0;
          for (int e = 0; e < ne; ++e) {
            acc_re += w[e] * tr[e];
            acc_im += w[e] * ti[e];
          }
          const double scale = g_ * fx.sign;
          row_out(fx.det) += cplx(scale * acc_re, scale * acc_im);
        }
      }
    }
  }
}

CoeffMatrix CIHamiltonian::apply(const CoeffMatrix& c) const {
  CoeffMatrix out;
  apply(c, out);
  return out;
}

cplx CIHamiltonian::expectation(const CoeffMatrix& c) const {
  const CoeffMatrix hc = apply(c);
  const double nrm2 = c.squaredNorm();
  return (c.array().conjugate() * hc.array()).sum() / nrm2;
}

CIState apply_hamiltonian(const CIState& state, const OrbitalBasis& basis, double g) {
  if (state.M() != basis.size) throw ConfigError("hamiltonian: state and orbital basis disagree on M");
  const CIHamiltonian h(basis, g, state.n_a(), state.n_b());
  CIState out = state;
  h.apply(state.coeff, out.coeff);
  return out;
}

}  // namespace fermix

// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/ci_solver.hpp"

#include <cmath>

#include "fermix/errors.hpp"
#include "fermix/hamiltonian.hpp"

namespace fermix {

void PropagationConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("propagation: dt must be positive");
  if (!(t_final >= 0.0)) throw ConfigError("propagation: t_final must be nonnegative");
  if (krylov_dim < 2) throw ConfigError("propagation: krylov_dim must be >= 2");
  if (!(tol > 0.0)) throw ConfigError("propagation: tol must be positive");
  if (record_stride < 1) throw ConfigError("propagation: record_stride must be >= 1");
  if (!(max_substep > 0.0)) throw ConfigError("propagation: max_substep must be positive");
}

std::vector<double> record_times(double t0, const PropagationConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  const double interval = cfg.dt * cfg.record_stride;
  const long n = static_cast<long>(std::floor((cfg.t_final - t0) / interval + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(t0 + k * interval);
  if (cfg.t_final - out.back() > 1e-9 * std::max(1.0, cfg.t_final)) out.push_back(cfg.t_final);
  return out;
}

CIState ground_state_ci(const OrbitalBasis& basis, double g, int n_a, int n_b,
                        const LanczosOptions& opts, GroundStateReport* report) {
  const CIHamiltonian h(basis, g, n_a, n_b);
  CIState start = product_determinant(basis.size, n_a, n_b, lowest_mask(n_a), lowest_mask(n_b));
  if (n_a >= 1 && n_a < basis.size) {
    const std::uint64_t promoted = lowest_mask(n_a - 1) | (std::uint64_t{1} << n_a);
    start.coeff(start.basis_a->index_of(promoted), start.basis_b->index_of(lowest_mask(n_b))) = 1e-3;
  }
  const EigenpairResult r = lowest_eigenpair(
      [&h](const CoeffMatrix& x, CoeffMatrix& y) { h.apply(x, y); }, start.coeff, opts);

  CIState out = start;
  out.coeff = r.vector;
  // Deterministic global phase: largest-magnitude coefficient real positive.
  Eigen::Index imax = 0;
  Eigen::VectorXd mags = out.coeff.reshaped<Eigen::RowMajor>().cwiseAbs();
  mags.maxCoeff(&imax);
  const cplx c = out.coeff.reshaped<Eigen::RowMajor>()(imax);
  out.coeff *= std::conj(c) / std::abs(c);
  if (report) *report = {r.value, r.residual, r.matvecs};
  return out;
}

double ci_energy(const CIState& state, const OrbitalBasis& basis, double g, double* imag) {
  const CIHamiltonian h(basis, g, state.n_a(), state.n_b());
  const cplx e = h.expectation(state.coeff);
  if (imag) *imag = e.imag();
  return e.real();
}

void propagate_ci(const CIState& initial, const OrbitalBasis& basis, double g,
                  const PropagationConfig& cfg, const CIObserver& observe) {
  cfg.validate();
  if (initial.M() != basis.size) throw ConfigError("propagate_ci: state and basis disagree on M");
  const double n0 = initial.norm();
  if (std::abs(n0 - 1.0) > 1e-8) throw ConfigError("propagate_ci: initial state is not normalized");

  const CIHamiltonian h(basis, g, initial.n_a(), initial.n_b());
  KrylovPropagator prop([&h](const CoeffMatrix& x, CoeffMatrix& y) { h.apply(x, y); },
                        cfg.krylov_dim, cfg.tol);
  CIState psi = initial;
  observe(psi);
  const std::vector<double> times = record_times(initial.time, cfg);
  for (std::size_t k = 1; k < times.size(); ++k) {
    prop.advance(psi.coeff, times[k] - times[k - 1]);
    psi.time = times[k];
    observe(psi);
  }
}

std::vector<CIState> propagate_ci(const CIState& initial, const OrbitalBasis& basis, double g,
                                  const PropagationConfig& cfg) {
  std::vector<CIState> out;
  propagate_ci(initial, basis, g, cfg, [&out](const CIState& s) { out.push_back(s); });
  return out;
}

}  // namespace fermix

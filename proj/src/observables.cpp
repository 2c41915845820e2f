// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fermix/errors.hpp"

namespace fermix {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Columns are the flattened coefficient vectors of a_p|psi>, p = 0..M-1.
Eigen::MatrixXcd annihilated_columns(const CIState& state, Species s) {
  const int M = state.M();
  Eigen::MatrixXcd cols;
  for (int p = 0; p < M; ++p) {
    const CIState v = annihilate_orbital(state, s, p);
    if (p == 0) cols.resize(v.coeff.size(), M);
    cols.col(p) = v.coeff.reshaped<Eigen::RowMajor>();
  }
  return cols;
}

Eigen::VectorXd validity_mask(const Eigen::VectorXd& rho, double floor) {
  const double cut = floor * rho.maxCoeff();
  Eigen::VectorXd keep(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) keep(i) = rho(i) > cut ? 1.0 : 0.0;
  return keep;
}

}  // namespace

Eigen::MatrixXcd OneBodyRDM::on_grid() const {
  Eigen::MatrixXcd r = modes * gamma * modes.adjoint();
  return 0.5 * (r + r.adjoint());
}

Eigen::VectorXd OneBodyRDM::density() const {
  const Eigen::MatrixXcd mg = modes * gamma;
  return mg.cwiseProduct(modes.conjugate()).rowwise().sum().real();
}

Eigen::VectorXd OneBodyRDM::natural_populations() const {
  if (gamma.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gamma, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double OneBodyRDM::trace() const { return gamma.trace().real(); }

Eigen::MatrixXcd orbital_rdm(const CIState& state, Species s) {
  const int M = state.M();
  if (state.n(s) == 0) return Eigen::MatrixXcd::Zero(M, M);
  const Eigen::MatrixXcd v = annihilated_columns(state, s);
  Eigen::MatrixXcd g = v.adjoint() * v;
  return 0.5 * (g + g.adjoint());
}

OneBodyRDM one_body_rdm(const CIState& state, Species s, const OrbitalBasis& basis) {
  if (basis.size != state.M()) throw ConfigError("one_body_rdm: basis and state disagree on M");
  OneBodyRDM r;
  r.species = s;
  r.n_particles = state.n(s);
  r.dx = basis.dx;
  r.modes = basis.orbitals.cast<cplx>();
  r.gamma = orbital_rdm(state, s).transpose();
  return r;
}

OneBodyRDM one_body_rdm(const HFState& state, Species s, double dx) {
  OneBodyRDM r;
  r.species = s;
  r.modes = s == Species::A ? state.orbitals_a : state.orbitals_b;
  r.n_particles = static_cast<int>(r.modes.cols());
  r.dx = dx;
  // Gram matrix of the orbitals; the identity for an orthonormal set.
  r.gamma = Eigen::MatrixXcd::Identity(r.n_particles, r.n_particles);
  const Eigen::MatrixXcd gram = dx * r.modes.adjoint() * r.modes;
  if (r.n_particles > 0 && (gram - r.gamma).cwiseAbs().maxCoeff() > 1e-10) {
    // Re-express in an orthonormal frame so populations stay meaningful.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    r.modes = r.modes * es.eigenvectors() *
              ev.cwiseSqrt().cwiseMax(1e-300).cwiseInverse().asDiagonal();
    r.gamma = ev.cast<cplx>().asDiagonal();
  }
  return r;
}

Eigen::VectorXd density(const CIState& state, Species s, const OrbitalBasis& basis) {
  const Eigen::MatrixXd gr = orbital_rdm(state, s).real();
  // rho(x) = sum_pq phi_p(x) phi_q(x) Re gamma_pq (imaginary part cancels).
  return (basis.orbitals * gr).cwiseProduct(basis.orbitals).rowwise().sum();
}

Eigen::VectorXd density(const HFState& state, Species s) {
  return hf_density(s == Species::A ? state.orbitals_a : state.orbitals_b);
}

std::string_view to_string(MapKind k) {
  switch (k) {
    case MapKind::G1: return "g1";
    case MapKind::G2Intra: return "g2-intra";
    case MapKind::G2Inter: return "g2-inter";
  }
  return "?";
}

CorrelationMap g1_map(const OneBodyRDM& rdm, double floor) {
  const Eigen::MatrixXcd rho = rdm.on_grid();
  const Eigen::VectorXd d = rho.diagonal().real();
  const Eigen::VectorXd keep = validity_mask(d, floor);
  const Eigen::Index n = d.size();
  CorrelationMap m;
  m.kind = MapKind::G1;
  m.values.resize(n, n);
  m.phase.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (keep(i) == 0.0 || keep(j) == 0.0) {
        m.values(i, j) = kNaN;
        m.phase(i, j) = cplx(kNaN, kNaN);
        continue;
      }
      const cplx g = rho(i, j) / std::sqrt(d(i) * d(j));
      m.phase(i, j) = g;
      m.values(i, j) = std::abs(g);
    }
  }
  return m;
}

Eigen::MatrixXd two_body_density(const CIState& state, Species s, Species t,
                                 const OrbitalBasis& basis) {
  const int M = state.M();
  const int n = basis.n_points();
  const Eigen::MatrixXd& phi = basis.orbitals;
  if (basis.size != M) throw ConfigError("two_body_density: basis and state disagree on M");

  if (s == t) {
    if (state.n(s) < 2) return Eigen::MatrixXd::Zero(n, n);
    // v_pr = a_p a_r |psi>, p < r. With D_pr(x, x') = phi_p(x) phi_r(x') - phi_r(x) phi_p(x'),
    // Psi(x') Psi(x) |psi> = sum_{p<r} D_pr(x, x') v_pr, so rho2 = D^T Re(G) D.
    std::vector<std::pair<int, int>> pairs;
    for (int p = 0; p < M; ++p)
      for (int r = p + 1; r < M; ++r) pairs.emplace_back(p, r);
    const int K = static_cast<int>(pairs.size());
    Eigen::MatrixXcd v;
    for (int k = 0; k < K; ++k) {
      const CIState once = annihilate_orbital(state, s, pairs[k].second);
      const CIState twice = annihilate_orbital(once, s, pairs[k].first);
      if (k == 0) v.resize(twice.coeff.size(), K);
      v.col(k) = twice.coeff.reshaped<Eigen::RowMajor>();
    }
    const Eigen::MatrixXd G = (v.adjoint() * v).real();
    Eigen::MatrixXd out(n, n);
    Eigen::MatrixXd D(n, K);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) {
        const auto [p, r] = pairs[k];
        D.col(k) = phi(i, p) * phi.col(r) - phi(i, r) * phi.col(p);
      }
      out.row(i) = (D * G).cwiseProduct(D).rowwise().sum().transpose();
    }
    return out;
  }

  if (state.n(s) < 1 || state.n(t) < 1) return Eigen::MatrixXd::Zero(n, n);
  // u_(p,r) = a^s_p a^t_r |psi>; rho2(x, x') = sum phi_p(x) phi_p'(x) phi_r(x') phi_r'(x') <u_pr|u_p'r'>.
  Eigen::MatrixXcd u;
  for (int p = 0; p < M; ++p) {
    const CIState once = annihilate_orbital(state, s, p);
    for (int r = 0; r < M; ++r) {
      const CIState twice = annihilate_orbital(once, t, r);
      if (u.size() == 0) u.resize(twice.coeff.size(), M * M);
      u.col(p * M + r) = twice.coeff.reshaped<Eigen::RowMajor>();
    }
  }
  const Eigen::MatrixXd gram = (u.adjoint() * u).real();
  // Reorder to ((p, p'), (r, r')).
  Eigen::MatrixXd gp(M * M, M * M);
  for (int p = 0; p < M; ++p)
    for (int r = 0; r < M; ++r)
      for (int pp = 0; pp < M; ++pp)
        for (int rr = 0; rr < M; ++rr) gp(p * M + pp, r * M + rr) = gram(p * M + r, pp * M + rr);
  Eigen::MatrixXd P(n, M * M);
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) P.col(p * M + q) = phi.col(p).cwiseProduct(phi.col(q));
  return P * gp * P.transpose();
}

CorrelationMap g2_map(const CIState& state, Species s, Species t, const OrbitalBasis& basis,
                      double floor) {
  CorrelationMap m;
  m.kind = s == t ? MapKind::G2Intra : MapKind::G2Inter;
  m.time = state.time;
  const int n = basis.n_points();
  if (s == t && state.n(s) < 2) {
    m.defined = false;
    m.values = Eigen::MatrixXd::Zero(n, n);
    return m;
  }
  const Eigen::MatrixXd rho2 = two_body_density(state, s, t, basis);
  const Eigen::VectorXd ds = density(state, s, basis);
  const Eigen::VectorXd dt = s == t ? ds : density(state, t, basis);
  const Eigen::VectorXd ks = validity_mask(ds, floor);
  const Eigen::VectorXd kt = validity_mask(dt, floor);
  m.values.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m.values(i, j) = (ks(i) == 0.0 || kt(j) == 0.0) ? kNaN : rho2(i, j) / (ds(i) * dt(j));
  return m;
}

double overlap_lambda(const Eigen::VectorXd& rho_a, const Eigen::VectorXd& rho_b) {
  if (rho_a.size() != rho_b.size()) throw ConfigError("overlap_lambda: size mismatch");
  if (rho_a.size() == 0 || rho_a.minCoeff() < -1e-12 || rho_b.minCoeff() < -1e-12)
    throw AnalysisError("overlap_lambda: densities must be nonnegative");
  const double aa = rho_a.squaredNorm();
  const double bb = rho_b.squaredNorm();
  if (!(aa > 0.0) || !(bb > 0.0)) throw AnalysisError("overlap_lambda: density vanishes identically");
  const double ab = rho_a.dot(rho_b);
  return ab * ab / (aa * bb);
}

int count_filaments(const Eigen::VectorXd& density, const Eigen::VectorXd& points, double x_lo,
                    double x_hi, double prominence) {
  if (!(prominence > 0.0 && prominence < 1.0))
    throw ConfigError("count_filaments: prominence must lie in (0, 1)");
  std::vector<double> y;
  for (Eigen::Index i = 0; i < points.size(); ++i)
    if (points(i) >= x_lo && points(i) <= x_hi) y.push_back(density(i));
  if (y.empty()) throw ConfigError("count_filaments: region contains no grid points");
  const int n = static_cast<int>(y.size());
  const double top = *std::max_element(y.begin(), y.end());
  if (!(top > 0.0)) return 0;

  int count = 0;
  int i = 0;
  while (i < n) {
    // Plateaus count once.
    int j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    const bool left_ok = i == 0 || y[i - 1] < y[i];
    const bool right_ok = j == n - 1 || y[j + 1] < y[i];
    const bool interior = !(i == 0 && j == n - 1);
    if (left_ok && right_ok && interior) {
      const double h = y[i];
      double lmin = h, rmin = h;
      int k = i - 1;
      for (; k >= 0 && y[k] <= h; --k) lmin = std::min(lmin, y[k]);
      k = j + 1;
      for (; k < n && y[k] <= h; ++k) rmin = std::min(rmin, y[k]);
      // Each side's base is the lowest point before a higher sample or the region edge.
      const double base = std::max(lmin, rmin);
      if (h - base > prominence * top) ++count;
    }
    i = j + 1;
  }
  return count;
}

double breathing_frequency(const std::vector<double>& times, const std::vector<double>& values,
                           double expected, double min_periods) {
  const std::size_t n = times.size();
  if (n != values.size()) throw ConfigError("breathing_frequency: size mismatch");
  if (n < 8) throw AnalysisError("breathing_frequency: series too short");
  const double dt = times[1] - times[0];
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-6 * std::max(1.0, dt))
      throw ConfigError("breathing_frequency: times must be uniformly spaced");

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (n - 1));
    w[k] = (values[k] - mean) * hann;
  }

  const std::size_t nfft = 16 * n;
  const std::size_t half = nfft / 2;
  std::vector<double> power(half + 1);
  for (std::size_t b = 0; b <= half; ++b) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(b) / nfft;
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      re += w[k] * std::cos(phase * k);
      im += w[k] * std::sin(phase * k);
    }
    power[b] = re * re + im * im;
  }

  // The Hann main lobe spans two unpadded bins; skip it around DC.
  const std::size_t skip = 2 * nfft / n;
  std::size_t best = 0;
  for (std::size_t b = skip; b < half; ++b)
    if (best == 0 || power[b] > power[best]) best = b;
  if (best == 0 || best + 1 > half) throw AnalysisError("breathing_frequency: no spectral peak");

  std::vector<double> sorted(power.begin() + skip, power.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(power[best] > 10.0 * median) || !(power[best] > 0.0))
    throw AnalysisError("breathing_frequency: no peak above the noise floor");

  double shift = 0.0;
  const double a = power[best - 1], b0 = power[best], c = power[best + 1];
  const double denom = a - 2.0 * b0 + c;
  if (denom != 0.0) shift = 0.5 * (a - c) / denom;
  const double cycles_per_sample = (static_cast<double>(best) + shift) / nfft;
  const double omega = 2.0 * std::numbers::pi * cycles_per_sample / dt;
  const double duration = dt * (n - 1);
  const double reference = expected > 0.0 ? expected : omega;
  if (reference * duration / (2.0 * std::numbers::pi) < min_periods)
    throw AnalysisError("breathing_frequency: record covers fewer than " +
                        std::to_string(min_periods) + " periods of the mode");
  return omega;
}

std::vector<double> density_deviation(const std::vector<Eigen::VectorXd>& rho,
                                      const std::vector<Eigen::VectorXd>& rho_ref, double dx,
                                      int n_particles) {
  if (rho.size() != rho_ref.size()) throw ConfigError("density_deviation: time sampling differs");
  if (n_particles < 1) throw ConfigError("density_deviation: need at least one particle");
  std::vector<double> out(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (rho[k].size() != rho_ref[k].size()) throw ConfigError("density_deviation: grid differs");
    out[k] = dx * (rho[k] - rho_ref[k]).cwiseAbs().sum() / (2.0 * n_particles);
  }
  return out;
}

double second_moment(const Eigen::VectorXd& rho, const Eigen::VectorXd& points) {
  const double total = rho.sum();
  if (!(total > 0.0)) throw AnalysisError("second_moment: empty density");
  return rho.dot(points.cwiseAbs2()) / total;
}

}  // namespace fermix

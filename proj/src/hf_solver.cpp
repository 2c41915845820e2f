// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/hf_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "fermix/errors.hpp"

namespace fermix {
namespace {

// Gram-Schmidt with weight dx, two passes.
void orthonormalize(Eigen::MatrixXd& phi, double dx) {
  for (int j = 0; j < phi.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) phi.col(j) -= dx * phi.col(k).dot(phi.col(j)) * phi.col(k);
    }
    const double nrm = std::sqrt(dx * phi.col(j).squaredNorm());
    if (!(nrm > 1e-300)) throw NumericalError("hf: orbital set became linearly dependent");
    phi.col(j) /= nrm;
  }
}

Eigen::VectorXd real_density(const Eigen::MatrixXd& phi) {
  return phi.array().square().rowwise().sum();
}

std::string trace_text(const std::vector<double>& trace) {
  std::ostringstream os;
  os.precision(12);
  const std::size_t start = trace.size() > 8 ? trace.size() - 8 : 0;
  os << "last energies:";
  for (std::size_t k = start; k < trace.size(); ++k) os << ' ' << trace[k];
  return os.str();
}

// Mean-field operators live either on the full grid or on the span of a
// fixed orbital set B (dx B^T B = 1). Orbitals are held in the matching
// coefficient representation: phi = c on the grid, or phi = B c.
class MeanField {
 public:
  MeanField(const GridSpec& grid, const TrapParams& trap, const OrbitalBasis* sub)
      : dx_(grid.weight), sub_(sub) {
    const Eigen::MatrixXd h = one_body_hamiltonian(grid, trap);
    if (sub_) {
      if (sub_->n_points() != grid.n_points)
        throw ConfigError("hf: subspace orbitals do not match the grid");
      h_ = dx_ * sub_->orbitals.transpose() * h * sub_->orbitals;
      h_ = 0.5 * (h_ + h_.transpose()).eval();
    } else {
      h_ = h;
    }
  }

  int dim() const { return static_cast<int>(h_.rows()); }

  Eigen::MatrixXd to_grid(const Eigen::MatrixXd& c) const {
    return sub_ ? Eigen::MatrixXd(sub_->orbitals * c) : c;
  }
  Eigen::MatrixXd from_grid(const Eigen::MatrixXd& phi) const {
    return sub_ ? Eigen::MatrixXd(dx_ * sub_->orbitals.transpose() * phi) : phi;
  }
  // Inner-product weight in the coefficient representation.
  double weight() const { return sub_ ? 1.0 : dx_; }

  Eigen::MatrixXd fock(const Eigen::VectorXd& rho_other, double g) const {
    Eigen::MatrixXd f = h_;
    if (g == 0.0) return f;
    if (sub_) {
      const Eigen::MatrixXd& b = sub_->orbitals;
      f += g * dx_ * b.transpose() * rho_other.asDiagonal() * b;
    } else {
      f.diagonal() += g * rho_other;
    }
    return f;
  }

  // sum_j <c_j|h|c_j> in the current representation.
  double one_body(const Eigen::MatrixXd& c) const {
    return weight() * (c.transpose() * h_ * c).trace();
  }

 private:
  double dx_;
  const OrbitalBasis* sub_;
  Eigen::MatrixXd h_;
};

// phi <- exp(-tau F) phi, up to normalization.
void imaginary_step(const Eigen::MatrixXd& f, double tau, Eigen::MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
  if (es.info() != Eigen::Success) throw NumericalError("hf: mean-field diagonalization failed");
  const Eigen::VectorXd& e = es.eigenvalues();
  const Eigen::ArrayXd decay = (-tau * (e.array() - e(0))).exp();
  Eigen::MatrixXd proj = es.eigenvectors().transpose() * c;
  proj.array().colwise() *= decay;
  c = es.eigenvectors() * proj;
}

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Exact kinetic propagator of the sine DVR: the discrete sine transform
// diagonalizes the kinetic matrix with eigenvalues (m pi / L)^2 / 2.
class KineticPropagator {
 public:
  KineticPropagator(const GridSpec& grid, double mass, double step) : n_(grid.n_points) {
    buf_in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    buf_out_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      plan_ = fftw_plan_r2r_1d(n_, buf_in_, buf_out_, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    phase_.resize(n_);
    const double L = grid.length();
    const double norm = 1.0 / (2.0 * (n_ + 1));
    for (int m = 1; m <= n_; ++m) {
      const double k = m * std::numbers::pi / L;
      phase_(m - 1) = std::polar(norm, -0.5 * k * k / mass * step);
    }
    re_.resize(n_);
    im_.resize(n_);
  }
  ~KineticPropagator() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_in_);
    fftw_free(buf_out_);
  }
  KineticPropagator(const KineticPropagator&) = delete;
  KineticPropagator& operator=(const KineticPropagator&) = delete;

  void apply(Eigen::Ref<Eigen::VectorXcd> psi) {
    for (int j = 0; j < n_; ++j) buf_in_[j] = psi(j).real();
    fftw_execute(plan_);
    std::copy(buf_out_, buf_out_ + n_, re_.data());
    for (int j = 0; j < n_; ++j) buf_in_[j] = psi(j).imag();
    fftw_execute(plan_);
    std::copy(buf_out_, buf_out_ + n_, im_.data());

    Eigen::VectorXcd coef(n_);
    for (int m = 0; m < n_; ++m) coef(m) = cplx(re_(m), im_(m)) * phase_(m);

    for (int j = 0; j < n_; ++j) buf_in_[j] = coef(j).real();
    fftw_execute(plan_);
    std::copy(buf_out_, buf_out_ + n_, re_.data());
    for (int j = 0; j < n_; ++j) buf_in_[j] = coef(j).imag();
    fftw_execute(plan_);
    for (int j = 0; j < n_; ++j) psi(j) = cplx(re_(j), buf_out_[j]);
  }

 private:
  using cplx = std::complex<double>;
  int n_;
  double* buf_in_;
  double* buf_out_;
  fftw_plan plan_;
  Eigen::VectorXcd phase_;
  Eigen::VectorXd re_, im_;
};

void potential_phase(Eigen::MatrixXcd& phi, const Eigen::VectorXd& v, const Eigen::VectorXd& rho_other,
                     double g, double step) {
  const Eigen::ArrayXd angle = -(v + g * rho_other).array() * step;
  const Eigen::ArrayXcd ph = angle.cos().cast<std::complex<double>>() +
                             std::complex<double>(0.0, 1.0) * angle.sin().cast<std::complex<double>>();
  phi.array().colwise() *= ph;
}

}  // namespace

Eigen::VectorXd hf_density(const Eigen::MatrixXcd& orbitals) {
  return orbitals.cwiseAbs2().rowwise().sum();
}

double hf_energy(const HFState& state, const GridSpec& grid, const TrapParams& trap, double g) {
  const Eigen::MatrixXd h = one_body_hamiltonian(grid, trap);
  const double dx = grid.weight;
  double e = 0.0;
  for (const Eigen::MatrixXcd* phi : {&state.orbitals_a, &state.orbitals_b}) {
    const Eigen::MatrixXd re = phi->real();
    const Eigen::MatrixXd im = phi->imag();
    e += dx * ((re.transpose() * h * re).trace() + (im.transpose() * h * im).trace());
  }
  e += g * dx * hf_density(state.orbitals_a).dot(hf_density(state.orbitals_b));
  return e;
}

double hf_orthonormality_error(const HFState& state, double dx) {
  double err = 0.0;
  for (const Eigen::MatrixXcd* phi : {&state.orbitals_a, &state.orbitals_b}) {
    const Eigen::MatrixXcd s = dx * phi->adjoint() * *phi;
    err = std::max(err, (s - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff());
  }
  return err;
}

HFState hf_ground(const GridSpec& grid, const TrapParams& trap, double g, int n_a, int n_b,
                  double seed_asymmetry, const HFOptions& opts, HFReport* report) {
  trap.validate();
  if (n_a < 0 || n_b < 0) throw ConfigError("hf: particle numbers must be nonnegative");
  if (!std::isfinite(g) || !std::isfinite(seed_asymmetry)) throw ConfigError("hf: non-finite input");
  if (!(opts.tau > 0.0) || !(opts.tau_min > 0.0)) throw ConfigError("hf: tau must be positive");

  const MeanField mf(grid, trap, opts.subspace);
  if (std::max(n_a, n_b) > mf.dim())
    throw ConfigError("hf: more particles than available orbitals");
  const double w = mf.weight();
  const double dx = grid.weight;

  // One-body eigenstates in the working representation.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(mf.fock(Eigen::VectorXd(), 0.0));
  const Eigen::MatrixXd eig0 = es0.eigenvectors() / std::sqrt(w);
  Eigen::MatrixXd ca = eig0.leftCols(n_a);
  Eigen::MatrixXd cb = eig0.leftCols(n_b);
  if (seed_asymmetry != 0.0) {
    const Eigen::ArrayXd x = grid.points.array();
    const Eigen::VectorXd f = (x * (-0.5 * x.square()).exp()).matrix();
    const Eigen::VectorXd fc = mf.from_grid(f);
    ca.colwise() -= seed_asymmetry * fc;
    cb.colwise() += seed_asymmetry * fc;
  }
  orthonormalize(ca, w);
  orthonormalize(cb, w);

  auto energy = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::VectorXd ra = real_density(mf.to_grid(a));
    const Eigen::VectorXd rb = real_density(mf.to_grid(b));
    return mf.one_body(a) + mf.one_body(b) + g * dx * ra.dot(rb);
  };
  auto residual = [&](const Eigen::MatrixXd& c, const Eigen::VectorXd& rho_other) {
    if (c.cols() == 0) return 0.0;
    const Eigen::MatrixXd fc = mf.fock(rho_other, g) * c;
    const Eigen::MatrixXd r = fc - c * (w * c.transpose() * fc);
    return std::sqrt(w * r.colwise().squaredNorm().maxCoeff());
  };

  std::vector<double> trace;
  double e_prev = energy(ca, cb);
  trace.push_back(e_prev);
  double tau = opts.tau;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::MatrixXd na = ca, nb = cb;
    if (n_a > 0) {
      imaginary_step(mf.fock(real_density(mf.to_grid(nb)), g), tau, na);
      orthonormalize(na, w);
    }
    const Eigen::VectorXd rho_a = real_density(mf.to_grid(na));
    if (n_b > 0) {
      imaginary_step(mf.fock(rho_a, g), tau, nb);
      orthonormalize(nb, w);
    }
    const double e = energy(na, nb);
    if (e > e_prev + 1e-12 * std::max(1.0, std::abs(e_prev))) {
      tau *= 0.5;
      if (tau < opts.tau_min)
        throw NumericalError("hf: self-consistent iteration oscillates; " + trace_text(trace),
                             e - e_prev);
      continue;
    }
    ca = std::move(na);
    cb = std::move(nb);
    trace.push_back(e);
    const double de = std::abs(e - e_prev);
    e_prev = e;
    if (de < opts.energy_tol) {
      const Eigen::VectorXd rb = real_density(mf.to_grid(cb));
      const double res = std::max(residual(ca, rb), residual(cb, rho_a));
      if (res < opts.residual_tol) {
        HFState out;
        const Eigen::MatrixXd pa = mf.to_grid(ca), pb = mf.to_grid(cb);
        out.orbitals_a = pa.cast<std::complex<double>>();
        out.orbitals_b = pb.cast<std::complex<double>>();
        if (report) {
          report->energy = e;
          report->iterations = it;
          report->energy_trace = trace;
        }
        (void)dx;
        return out;
      }
    }
  }
  throw NumericalError("hf: no convergence within max_iterations; " + trace_text(trace),
                       trace.size() > 1 ? std::abs(trace.back() - trace[trace.size() - 2]) : 0.0);
}

void hf_propagate(const HFState& initial, const GridSpec& grid, const TrapParams& trap, double g,
                  const PropagationConfig& cfg, const HFObserver& observe) {
  cfg.validate();
  trap.validate();
  if (initial.orbitals_a.rows() != grid.n_points || initial.orbitals_b.rows() != grid.n_points)
    throw ConfigError("hf_propagate: orbitals do not match the grid");
  const double dx = grid.weight;
  if (hf_orthonormality_error(initial, dx) > 1e-8)
    throw ConfigError("hf_propagate: initial orbitals are not orthonormal");

  const Eigen::VectorXd v = potential_on_grid(grid, trap);
  HFState s = initial;
  observe(s);
  const std::vector<double> times = record_times(initial.time, cfg);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / cfg.max_substep - 1e-9)));
    const double h = span / nsub;
    KineticPropagator kin(grid, trap.mass, h);
    for (int step = 0; step < nsub; ++step) {
      Eigen::VectorXd ra = hf_density(s.orbitals_a);
      Eigen::VectorXd rb = hf_density(s.orbitals_b);
      potential_phase(s.orbitals_a, v, rb, g, 0.5 * h);
      potential_phase(s.orbitals_b, v, ra, g, 0.5 * h);
      for (int j = 0; j < s.n_a(); ++j) kin.apply(s.orbitals_a.col(j));
      for (int j = 0; j < s.n_b(); ++j) kin.apply(s.orbitals_b.col(j));
      ra = hf_density(s.orbitals_a);
      rb = hf_density(s.orbitals_b);
      potential_phase(s.orbitals_a, v, rb, g, 0.5 * h);
      potential_phase(s.orbitals_b, v, ra, g, 0.5 * h);
    }
    s.time = times[k];
    const double drift = hf_orthonormality_error(s, dx);
    if (drift > 1e-4)
      throw NumericalError("hf_propagate: orthonormality drift " + std::to_string(drift), drift);
    observe(s);
  }
}

std::vector<HFState> hf_propagate(const HFState& initial, const GridSpec& grid,
                                  const TrapParams& trap, double g, const PropagationConfig& cfg) {
  std::vector<HFState> out;
  hf_propagate(initial, grid, trap, g, cfg, [&out](const HFState& st) { out.push_back(st); });
  return out;
}

}  // namespace fermix

// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fermix/errors.hpp"

namespace fermix {

cplx inner(const CoeffMatrix& a, const CoeffMatrix& b) {
  return (a.array().conjugate() * b.array()).sum();
}

namespace {

// Two passes of classical Gram-Schmidt against all previous basis vectors.
void reorthogonalize(const std::vector<CoeffMatrix>& basis, int count, CoeffMatrix& w) {
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i < count; ++i) w -= inner(basis[i], w) * basis[i];
}

}  // namespace

EigenpairResult lowest_eigenpair(const LinearOperator& op, const CoeffMatrix& start,
                                 const LanczosOptions& opts) {
  const Eigen::Index dim = start.size();
  if (dim == 0) throw ConfigError("lanczos: empty start vector");
  const double n0 = start.norm();
  if (!(n0 > 0.0)) throw ConfigError("lanczos: start vector has zero norm");

  EigenpairResult res;
  CoeffMatrix x = start / n0;
  CoeffMatrix w;
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.subspace, dim));
  std::vector<CoeffMatrix> V;
  V.reserve(m_max);

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    V.clear();
    V.push_back(x);
    std::vector<double> alpha, beta;
    for (int j = 0; j < m_max; ++j) {
      op(V[j], w);
      ++res.matvecs;
      alpha.push_back(inner(V[j], w).real());
      reorthogonalize(V, j + 1, w);
      const double b = w.norm();
      if (j + 1 == m_max || b < 1e-12 * std::max(1.0, std::abs(alpha.back()))) break;
      beta.push_back(b);
      V.push_back(w / b);
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x.setZero(start.rows(), start.cols());
    for (int i = 0; i < m; ++i) x += y(i) * V[i];
    x /= x.norm();

    op(x, w);
    ++res.matvecs;
    const double theta = inner(x, w).real();
    res.value = theta;
    res.residual = (w - theta * x).norm();
    if (res.residual < opts.residual_tol) {
      res.vector = std::move(x);
      return res;
    }
  }
  throw NumericalError("lanczos: no convergence, final residual " + std::to_string(res.residual),
                       res.residual);
}

KrylovPropagator::KrylovPropagator(LinearOperator op, int krylov_dim, double tol)
    : op_(std::move(op)), m_(krylov_dim), tol_(tol) {
  if (krylov_dim < 2) throw ConfigError("krylov: dimension must be at least 2");
  if (!(tol > 0.0)) throw ConfigError("krylov: tolerance must be positive");
}

void KrylovPropagator::advance(CoeffMatrix& psi, double duration) {
  double remaining = duration;
  std::vector<CoeffMatrix> V;
  CoeffMatrix w;
  while (remaining > 0.0) {
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return;
    const int m_max = static_cast<int>(std::min<Eigen::Index>(m_, psi.size()));
    V.clear();
    V.push_back(psi / beta0);
    std::vector<double> alpha, beta;
    bool invariant = false;
    double beta_last = 0.0;
    for (int j = 0; j < m_max; ++j) {
      op_(V[j], w);
      ++matvecs_;
      alpha.push_back(inner(V[j], w).real());
      reorthogonalize(V, j + 1, w);
      const double b = w.norm();
      if (b < 1e-13 * std::max(1.0, std::abs(alpha.back()))) {
        invariant = true;
        break;
      }
      if (j + 1 == m_max) {
        beta_last = b;
        break;
      }
      beta.push_back(b);
      V.push_back(w / b);
    }
    if (!invariant && static_cast<Eigen::Index>(alpha.size()) == psi.size()) invariant = true;

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::MatrixXd& Q = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();

    auto propagated = [&](double h) {
      Eigen::VectorXcd c(m);
      for (int k = 0; k < m; ++k) c(k) = std::exp(cplx(0.0, -lam(k) * h)) * Q(0, k);
      return Eigen::VectorXcd(Q.cast<cplx>() * c);
    };

    const bool clipped = h_suggest_ > remaining;
    double h = invariant ? remaining : std::min(remaining, h_suggest_);
    bool rejected = false;
    Eigen::VectorXcd y;
    double err = 0.0;
    for (;;) {
      y = propagated(h);
      err = invariant ? 0.0 : beta0 * beta_last * std::abs(y(m - 1));
      if (err <= tol_) break;
      rejected = true;
      h *= std::clamp(0.9 * std::pow(tol_ / err, 1.0 / m), 0.1, 0.9);
      if (h < 1e-12 * std::max(1.0, duration))
        throw NumericalError("krylov: step size underflow (rejection cascade)", err);
    }
    psi.setZero();
    for (int i = 0; i < m; ++i) psi += (beta0 * y(i)) * V[i];
    ++steps_;
    remaining -= h;
    if (remaining < 1e-14 * std::max(1.0, duration)) remaining = 0.0;
    if (!invariant) {
      const double grow = err > 0.0 ? std::clamp(0.9 * std::pow(tol_ / err, 1.0 / m), 0.5, 2.0) : 2.0;
      h_suggest_ = (clipped && !rejected) ? std::max(h_suggest_, h * grow) : h * grow;
    }
  }
}

}  // namespace fermix

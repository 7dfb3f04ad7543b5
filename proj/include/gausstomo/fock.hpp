// Copyright 2026 The gausstomo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>

#include "gausstomo/bounds.hpp"
#include "gausstomo/state.hpp"

namespace gausstomo {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using complexd = std::complex<double>;

/// Annihilation and creation operators in a d-dimensional Fock cutoff.
inline std::pair<MatrixXcd, MatrixXcd> ladder_ops(int d) {
  if (d < 2) throw std::invalid_argument("ladder_ops: cutoff must be >= 2");
  MatrixXcd a = MatrixXcd::Zero(d, d);
  for (int m = 1; m < d; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return {a, a.adjoint()};
}

/// Thermal state with symplectic eigenvalue nu >= 1: diagonal (1 - tau) tau^m
/// with tau = (nu - 1)/(nu + 1). Trace is 1 - tau^d (the truncation loss).
inline MatrixXcd thermal_fock(double nu, int d) {
  if (nu < 1.0) throw std::invalid_argument("thermal_fock: nu must be >= 1");
  if (d < 2) throw std::invalid_argument("thermal_fock: cutoff must be >= 2");
  double tau = (nu - 1.0) / (nu + 1.0);
  MatrixXcd rho = MatrixXcd::Zero(d, d);
  double w = 1.0 - tau;
  for (int m = 0; m < d; ++m) {
    rho(m, m) = w;
    w *= tau;
  }
  return rho;
}

namespace detail {

/// exp(K) for skew-Hermitian K via the Hermitian eigendecomposition of iK.
inline MatrixXcd skew_exp(const MatrixXcd& k) {
  MatrixXcd h = complexd(0, 1) * k;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (h + h.adjoint().eval()));
  VectorXcd phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(complexd(0, -es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Displacement exp(alpha a^dag - alpha^* a); alpha = (m_x + i m_p)/sqrt(2)
/// shifts the first moment by (m_x, m_p).
inline MatrixXcd displacement_op(complexd alpha, int d) {
  auto [a, adag] = ladder_ops(d);
  return detail::skew_exp(alpha * adag - std::conj(alpha) * a);
}

/// Phase rotation exp(-i theta a^dag a); quadrature action
/// [[cos t, sin t], [-sin t, cos t]].
inline MatrixXcd rotation_op(double theta, int d) {
  MatrixXcd u = MatrixXcd::Zero(d, d);
  for (int m = 0; m < d; ++m) u(m, m) = std::exp(complexd(0, -theta * m));
  return u;
}

/// Squeezer exp((ln z / 2)(a^dag^2 - a^2)); quadrature action diag(z, 1/z).
inline MatrixXcd squeeze_op(double z, int d) {
  if (z <= 0) throw std::invalid_argument("squeeze_op: z must be positive");
  auto [a, adag] = ladder_ops(d);
  double r = 0.5 * std::log(z);
  return detail::skew_exp(r * (adag * adag - a * a));
}

/// Quadrature matrices x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)).
inline std::pair<MatrixXcd, MatrixXcd> quadrature_ops(int d) {
  auto [a, adag] = ladder_ops(d);
  double rt2 = std::sqrt(2.0);
  MatrixXcd x = (a + adag) / rt2;
  MatrixXcd p = (a - adag) / (complexd(0, 1) * rt2);
  return {x, p};
}

/// First and second moments of a single-mode Fock density matrix.
inline std::pair<VectorXd, MatrixXd> fock_moments(const MatrixXcd& rho) {
  auto [x, p] = quadrature_ops(static_cast<int>(rho.rows()));
  const MatrixXcd* r[2] = {&x, &p};
  VectorXd m(2);
  for (int i = 0; i < 2; ++i) m(i) = (*r[i] * rho).trace().real();
  MatrixXd v(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      v(i, j) = ((*r[i] * *r[j] + *r[j] * *r[i]) * rho).trace().real() - 2.0 * m(i) * m(j);
  return {m, v};
}

/// Cutoff rule tied to the state energy.
inline int fock_cutoff(const GaussianState& s) {
  return std::max(30, static_cast<int>(std::ceil(8.0 * (2.0 * energy(s) + 1.0))));
}

/// Truncated Fock density matrix of a single-mode Gaussian state, built as
/// displaced-rotated-squeezed thermal: rho = D R Sq thermal Sq^dag R^dag D^dag
/// with (nu, S) from the Williamson decomposition and (theta, z) from the
/// Euler decomposition of S. Every construction is self-validated by
/// recomputing the first two moments from rho; a mismatch signals an
/// insufficient cutoff and is reported, not patched.
inline MatrixXcd gaussian_to_fock(const GaussianState& s, int d, double mean_tol = 1e-6,
                                  double cov_tol = 1e-5) {
  if (s.n() != 1) throw std::invalid_argument("gaussian_to_fock: single-mode only");
  WilliamsonDecomposition wd = williamson(s.V());
  EulerDecomposition ed = euler(wd.S);
  double theta = std::atan2(ed.O1(0, 1), ed.O1(0, 0));
  double z = ed.z(0);
  complexd alpha = complexd(s.m()(0), s.m()(1)) / std::sqrt(2.0);

  MatrixXcd u = displacement_op(alpha, d) * rotation_op(theta, d) * squeeze_op(z, d);
  MatrixXcd rho = u * thermal_fock(wd.nu(0), d) * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());

  auto [m_chk, v_chk] = fock_moments(rho);
  if ((m_chk - s.m()).cwiseAbs().maxCoeff() > mean_tol ||
      (v_chk - s.V()).cwiseAbs().maxCoeff() > cov_tol)
    throw std::runtime_error("gaussian_to_fock: moment self-check failed (cutoff too small?)");
  return rho;
}

/// Cutoff rule plus doubling until the truncation loss and the moment
/// self-check both pass.
inline MatrixXcd gaussian_to_fock_auto(const GaussianState& s, int max_dim = 2048) {
  int d = fock_cutoff(s);
  while (true) {
    try {
      MatrixXcd rho = gaussian_to_fock(s, d);
      if (std::abs(rho.trace().real() - 1.0) < 1e-6) return rho;
    } catch (const std::runtime_error&) {
      // fall through to doubling
    }
    d *= 2;
    if (d > max_dim) throw std::runtime_error("gaussian_to_fock_auto: cutoff exceeded limit");
  }
}

/// Two states at a common cutoff, doubled until both pass their self-checks.
inline std::pair<MatrixXcd, MatrixXcd> gaussian_to_fock_pair(const GaussianState& a,
                                                             const GaussianState& b, int max_dim = 2048) {
  int d = std::max(fock_cutoff(a), fock_cutoff(b));
  while (true) {
    try {
      MatrixXcd ra = gaussian_to_fock(a, d);
      MatrixXcd rb = gaussian_to_fock(b, d);
      if (std::abs(ra.trace().real() - 1.0) < 1e-6 && std::abs(rb.trace().real() - 1.0) < 1e-6)
        return {ra, rb};
    } catch (const std::runtime_error&) {
      // grow the cutoff
    }
    d *= 2;
    if (d > max_dim) throw std::runtime_error("gaussian_to_fock_pair: cutoff exceeded limit");
  }
}

/// D_tr = half the sum of absolute eigenvalues of the Hermitian difference.
inline double trace_distance_fock(const MatrixXcd& rho1, const MatrixXcd& rho2) {
  if (rho1.rows() != rho2.rows()) throw std::invalid_argument("trace_distance_fock: dimension mismatch");
  MatrixXcd diff = rho1 - rho2;
  diff = 0.5 * (diff + diff.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace gausstomo

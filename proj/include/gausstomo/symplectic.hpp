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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausstomo/rng.hpp"

namespace gausstomo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Largest singular value.
inline double op_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

inline double tol_symplectic(const MatrixXd& s) {
  return 1e-8 * (1.0 + op_norm(s));
}

constexpr double kRelReconTol = 1e-8;

/// Symplectic form Omega = direct sum of n blocks [[0,1],[-1,0]],
/// quadrature ordering (x1, p1, ..., xn, pn).
inline MatrixXd omega(int n) {
  if (n < 1) throw std::invalid_argument("omega: mode count must be >= 1");
  MatrixXd om = MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    om(2 * j, 2 * j + 1) = 1.0;
    om(2 * j + 1, 2 * j) = -1.0;
  }
  return om;
}

inline void require_even_square(const MatrixXd& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": matrix must be square with even dimension");
}

/// True iff ||S Omega S^T - Omega||_inf <= tol.
inline bool is_symplectic(const MatrixXd& s, double tol) {
  require_even_square(s, "is_symplectic");
  const int n = static_cast<int>(s.rows()) / 2;
  MatrixXd om = omega(n);
  return op_norm(s * om * s.transpose() - om) <= tol;
}

inline bool is_symplectic(const MatrixXd& s) { return is_symplectic(s, tol_symplectic(s)); }

inline void require_symmetric(const MatrixXd& m, const char* who) {
  double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

namespace detail {

/// Eigendecomposition-based power of a symmetric positive-definite matrix.
/// Inverse powers raise at the relative conditioning floor; non-negative
/// powers only reject meaningfully indefinite input (square roots stay
/// usable for extremely squeezed covariances, whose spectrum is graded but
/// positive).
inline MatrixXd sym_pow(const MatrixXd& a, double p, const char* who) {
  require_symmetric(a, who);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error(std::string(who) + ": eigendecomposition failed");
  VectorXd ev = es.eigenvalues();
  double emax = ev.cwiseAbs().maxCoeff();
  if (p < 0) {
    if (ev.minCoeff() < 1e-12 * emax)
      throw std::runtime_error(std::string(who) + ": matrix is not positive definite enough (min eigenvalue " +
                               std::to_string(ev.minCoeff()) + " below 1e-12 * " + std::to_string(emax) + ")");
  } else if (ev.minCoeff() < -1e-10 * emax) {
    throw std::runtime_error(std::string(who) + ": matrix is indefinite");
  }
  VectorXd evp(ev.size());
  for (int i = 0; i < ev.size(); ++i) evp(i) = std::pow(std::max(ev(i), 1e-300), p);
  MatrixXd r = es.eigenvectors() * evp.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace detail

inline MatrixXd sym_sqrt(const MatrixXd& a) { return detail::sym_pow(a, 0.5, "sym_sqrt"); }
inline MatrixXd sym_inv_sqrt(const MatrixXd& a) { return detail::sym_pow(a, -0.5, "sym_inv_sqrt"); }
inline MatrixXd sym_inv(const MatrixXd& a) { return detail::sym_pow(a, -1.0, "sym_inv"); }

/// |X| = sqrt(X^2) for symmetric X, by eigendecomposition.
inline MatrixXd matrix_abs(const MatrixXd& x) {
  require_symmetric(x, "matrix_abs");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(x);
  MatrixXd r = es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

/// Matrix geometric mean A # B = sqrt(A) sqrt(A^{-1/2} B A^{-1/2}) sqrt(A).
inline MatrixXd geometric_mean(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("geometric_mean: dimension mismatch");
  MatrixXd ah = sym_sqrt(a);
  MatrixXd aih = sym_inv_sqrt(a);
  MatrixXd mid = sym_sqrt(0.5 * (aih * b * aih + (aih * b * aih).transpose().eval()));
  MatrixXd r = ah * mid * ah;
  return 0.5 * (r + r.transpose());
}

struct WilliamsonDecomposition {
  MatrixXd S;   // symplectic
  MatrixXd D;   // diag(nu_1, nu_1, ..., nu_n, nu_n)
  VectorXd nu;  // symplectic eigenvalues, descending
};

/// Williamson decomposition V = S D S^T of a symmetric positive-definite V.
///
/// Construction: K = V^{-1/2} Omega V^{-1/2} is antisymmetric; its real Schur
/// form is block-diagonal with 2x2 blocks [[0, 1/nu_j], [-1/nu_j, 0]]. After
/// normalizing each block to a positive upper-right entry and sorting nu
/// descending, S = V^{1/2} Q D^{-1/2} reconstructs V and is symplectic.
/// The result is verified against both invariants rather than trusted.
inline WilliamsonDecomposition williamson(const MatrixXd& v) {
  require_even_square(v, "williamson");
  require_symmetric(v, "williamson");
  const int dim = static_cast<int>(v.rows());
  const int n = dim / 2;

  MatrixXd vh = sym_sqrt(v);
  MatrixXd vih = detail::sym_pow(v, -0.5, "williamson");
  MatrixXd om = omega(n);
  MatrixXd k = vih * om * vih;
  k = 0.5 * (k - k.transpose().eval());

  Eigen::RealSchur<MatrixXd> schur(k);
  if (schur.info() != Eigen::Success) throw std::runtime_error("williamson: Schur decomposition failed");
  MatrixXd q = schur.matrixU();
  MatrixXd t = schur.matrixT();

  // Read the 2x2 blocks; flip column pairs so the upper-right entry is positive.
  std::vector<double> nu(n);
  for (int j = 0; j < n; ++j) {
    double b = 0.5 * (t(2 * j, 2 * j + 1) - t(2 * j + 1, 2 * j));
    if (std::abs(b) < 1e-300) throw std::runtime_error("williamson: degenerate Schur block");
    if (b < 0) {
      q.col(2 * j).swap(q.col(2 * j + 1));
      b = -b;
    }
    nu[j] = 1.0 / b;
  }

  // Sort mode pairs by nu descending.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return nu[a] > nu[b]; });

  MatrixXd qs(dim, dim);
  VectorXd nus(n);
  VectorXd dinvh(dim);
  MatrixXd d = MatrixXd::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    int src = order[j];
    qs.col(2 * j) = q.col(2 * src);
    qs.col(2 * j + 1) = q.col(2 * src + 1);
    nus(j) = nu[src];
    d(2 * j, 2 * j) = d(2 * j + 1, 2 * j + 1) = nus(j);
    dinvh(2 * j) = dinvh(2 * j + 1) = 1.0 / std::sqrt(nus(j));
  }

  WilliamsonDecomposition out;
  out.S = vh * qs * dinvh.asDiagonal();
  out.D = d;
  out.nu = nus;

  double vnorm = op_norm(v);
  if (op_norm(out.S * out.D * out.S.transpose() - v) > kRelReconTol * vnorm)
    throw std::runtime_error("williamson: reconstruction check failed");
  if (!is_symplectic(out.S)) throw std::runtime_error("williamson: produced factor is not symplectic");
  return out;
}

/// Symplectic eigenvalues of V: the moduli of the eigenvalues of i Omega V,
/// one per mode, descending. Computed through the singular values of
/// V^{1/2} Omega V^{1/2}, which come in (nu, nu) pairs; this route is
/// independent of the Schur-based construction in williamson().
inline VectorXd symplectic_eigenvalues(const MatrixXd& v) {
  require_even_square(v, "symplectic_eigenvalues");
  require_symmetric(v, "symplectic_eigenvalues");
  const int n = static_cast<int>(v.rows()) / 2;
  MatrixXd vh = sym_sqrt(v);
  MatrixXd a = vh * omega(n) * vh;
  VectorXd sv = a.jacobiSvd().singularValues();
  VectorXd nu(n);
  for (int j = 0; j < n; ++j) nu(j) = 0.5 * (sv(2 * j) + sv(2 * j + 1));
  return nu;
}

struct EulerDecomposition {
  MatrixXd O1;  // orthogonal symplectic
  MatrixXd Z;   // diag(z_1, 1/z_1, ..., z_n, 1/z_n)
  MatrixXd O2;  // orthogonal symplectic
  VectorXd z;   // z_j >= 1, descending
};

namespace detail {

/// Orthogonal-symplectic diagonalization M = O Z^2 O^T of the symmetric
/// positive symplectic matrix M = S S^T. Eigenvectors of M pair as
/// (u, -Omega u) with eigenvalues (lambda, 1/lambda); a greedy symplectic
/// Gram-Schmidt over the eigenbasis, largest lambda first, keeps the pairing
/// intact through degeneracies and through the lambda ~ 1 cluster.
inline void orthosymplectic_factor(const MatrixXd& m, MatrixXd& o1, VectorXd& z) {
  const int dim = static_cast<int>(m.rows());
  const int n = dim / 2;
  MatrixXd om = omega(n);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("euler: eigendecomposition failed");

  o1.resize(dim, dim);
  z.resize(n);
  MatrixXd taken(dim, 0);  // consumed directions
  int next_candidate = dim - 1;  // Eigen sorts ascending; walk from the top

  auto deflate = [&](VectorXd vec) {
    for (int c = 0; c < taken.cols(); ++c) vec -= taken.col(c).dot(vec) * taken.col(c);
    return vec;
  };

  for (int j = 0; j < n; ++j) {
    VectorXd u;
    while (true) {
      if (next_candidate < 0) throw std::runtime_error("euler: ran out of eigenvector candidates");
      u = deflate(es.eigenvectors().col(next_candidate));
      --next_candidate;
      if (u.norm() >= 0.5) break;  // otherwise consumed by an earlier partner
    }
    u.normalize();
    VectorXd p = deflate(-om * u);
    p -= u.dot(p) * u;
    double pn = p.norm();
    if (pn < 0.5) throw std::runtime_error("euler: symplectic pairing collapsed");
    p /= pn;

    double lam = u.dot(m * u);
    z(j) = std::sqrt(std::max(lam, 1.0));
    o1.col(2 * j) = u;
    o1.col(2 * j + 1) = p;
    taken.conservativeResize(dim, taken.cols() + 2);
    taken.col(taken.cols() - 2) = u;
    taken.col(taken.cols() - 1) = p;
  }
  // Candidates were visited in descending-eigenvalue order, so z is already
  // descending up to clustering noise; enforce exactly.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return z(a) > z(b); });
  MatrixXd o1s(dim, dim);
  VectorXd zs(n);
  for (int j = 0; j < n; ++j) {
    o1s.col(2 * j) = o1.col(2 * order[j]);
    o1s.col(2 * j + 1) = o1.col(2 * order[j] + 1);
    zs(j) = z(order[j]);
  }
  o1 = o1s;
  z = zs;
}

/// Nearest orthogonal matrix (polar factor).
inline MatrixXd orthogonal_project(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

/// Euler (Bloch-Messiah) decomposition S = O1 Z O2 with O1, O2 orthogonal
/// symplectic and Z = diag(z_1, 1/z_1, ...), z_j >= 1 descending.
///
/// Polar route: S S^T = O1 Z^2 O1^T is diagonalized with an orthogonal
/// symplectic factor, then O2 = Z^{-1} O1^T S is re-orthogonalized. Verified
/// by reconstruction.
inline EulerDecomposition euler(const MatrixXd& s) {
  require_even_square(s, "euler");
  if (!is_symplectic(s)) throw std::invalid_argument("euler: input is not symplectic");
  const int dim = static_cast<int>(s.rows());
  const int n = dim / 2;

  MatrixXd m = s * s.transpose();
  m = 0.5 * (m + m.transpose().eval());

  EulerDecomposition out;
  detail::orthosymplectic_factor(m, out.O1, out.z);

  VectorXd zdiag(dim), zinv(dim);
  for (int j = 0; j < n; ++j) {
    zdiag(2 * j) = out.z(j);
    zdiag(2 * j + 1) = 1.0 / out.z(j);
    zinv(2 * j) = 1.0 / out.z(j);
    zinv(2 * j + 1) = out.z(j);
  }
  out.Z = zdiag.asDiagonal();
  out.O2 = detail::orthogonal_project(zinv.asDiagonal() * out.O1.transpose() * s);

  double snorm = op_norm(s);
  if (op_norm(out.O1 * out.Z * out.O2 - s) > kRelReconTol * (1.0 + snorm))
    throw std::runtime_error("euler: reconstruction check failed");
  if (!is_symplectic(out.O1) || !is_symplectic(out.O2))
    throw std::runtime_error("euler: orthogonal factors are not symplectic");
  return out;
}

/// Haar-distributed orthogonal symplectic matrix, i.e. the quadrature
/// representation of a Haar random unitary on the n modes.
inline MatrixXd random_orthogonal_symplectic(int n, Rng& rng) {
  using CMat = Eigen::MatrixXcd;
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    std::complex<double> d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : 1.0;
  }
  MatrixXd s(2 * n, 2 * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      s(2 * j, 2 * k) = q(j, k).real();
      s(2 * j, 2 * k + 1) = -q(j, k).imag();
      s(2 * j + 1, 2 * k) = q(j, k).imag();
      s(2 * j + 1, 2 * k + 1) = q(j, k).real();
    }
  return s;
}

/// Random symplectic S = O1 Z O2 with z_j log-uniform in [1, squeeze_max].
inline MatrixXd random_symplectic(int n, double squeeze_max, Rng& rng) {
  if (squeeze_max < 1.0) throw std::invalid_argument("random_symplectic: squeeze_max must be >= 1");
  MatrixXd o1 = random_orthogonal_symplectic(n, rng);
  MatrixXd o2 = random_orthogonal_symplectic(n, rng);
  VectorXd zdiag(2 * n);
  for (int j = 0; j < n; ++j) {
    double zj = std::exp(rng.uniform() * std::log(squeeze_max));
    zdiag(2 * j) = zj;
    zdiag(2 * j + 1) = 1.0 / zj;
  }
  return o1 * zdiag.asDiagonal() * o2;
}

/// Random valid covariance V = S D S^T with nu_j log-uniform in [1, temp_max].
inline MatrixXd random_covariance(int n, double squeeze_max, double temp_max, Rng& rng) {
  if (temp_max < 1.0) throw std::invalid_argument("random_covariance: temp_max must be >= 1");
  MatrixXd s = random_symplectic(n, squeeze_max, rng);
  VectorXd d(2 * n);
  for (int j = 0; j < n; ++j) {
    double nu = std::exp(rng.uniform() * std::log(temp_max));
    d(2 * j) = d(2 * j + 1) = nu;
  }
  MatrixXd v = s * d.asDiagonal() * s.transpose();
  return 0.5 * (v + v.transpose().eval());
}

}  // namespace gausstomo

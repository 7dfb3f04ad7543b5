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

#include <optional>
#include <stdexcept>
#include <string>

#include "gausstomo/symplectic.hpp"

namespace gausstomo {

/// Gaussian state rho(V, m): first moment m in R^{2n} and covariance V,
/// quadrature ordering (x1, p1, ..., xn, pn). Immutable after construction;
/// the constructor enforces the uncertainty relation V + i Omega >= 0 via
/// the symplectic spectrum.
class GaussianState {
 public:
  GaussianState(MatrixXd v, VectorXd m) {
    require_even_square(v, "GaussianState");
    if (m.size() != v.rows())
      throw std::invalid_argument("GaussianState: first moment has wrong dimension");
    require_symmetric(v, "GaussianState");
    v = 0.5 * (v + v.transpose().eval());
    VectorXd nu = symplectic_eigenvalues(v);
    double tol = 1e-8 * (1.0 + 1e-6 * v.cwiseAbs().maxCoeff());
    if (nu.minCoeff() < 1.0 - tol)
      throw std::invalid_argument("GaussianState: uncertainty relation violated, nu_min = " +
                                  std::to_string(nu.minCoeff()));
    n_ = static_cast<int>(v.rows()) / 2;
    v_ = std::move(v);
    m_ = std::move(m);
  }

  int n() const { return n_; }
  const MatrixXd& V() const { return v_; }
  const VectorXd& m() const { return m_; }

 private:
  int n_;
  MatrixXd v_;
  VectorXd m_;
};

/// Mean energy Tr(V)/4 + ||m||^2 / 2.
inline double energy(const GaussianState& s) {
  return 0.25 * s.V().trace() + 0.5 * s.m().squaredNorm();
}

/// V -> S V S^T, m -> S m + d.
inline GaussianState apply_symplectic(const GaussianState& s, const MatrixXd& sp,
                                      const std::optional<VectorXd>& d = std::nullopt) {
  if (sp.rows() != 2 * s.n()) throw std::invalid_argument("apply_symplectic: dimension mismatch");
  if (!is_symplectic(sp)) throw std::invalid_argument("apply_symplectic: matrix is not symplectic");
  MatrixXd v = sp * s.V() * sp.transpose();
  VectorXd m = sp * s.m();
  if (d) {
    if (d->size() != m.size()) throw std::invalid_argument("apply_symplectic: displacement has wrong dimension");
    m += *d;
  }
  return GaussianState(std::move(v), std::move(m));
}

/// Momentum sign flip T = 1_n (+) diag(1, -1), applied to V and m.
inline MatrixXd transpose_flip(int n) {
  MatrixXd t = MatrixXd::Identity(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) t(2 * j + 1, 2 * j + 1) = -1.0;
  return t;
}

/// The transposed state rho^T: position-momentum correlations change sign.
inline GaussianState transpose_state(const GaussianState& s) {
  MatrixXd t = transpose_flip(s.n());
  return GaussianState(t * s.V() * t, t * s.m());
}

/// Tensor product: block-diagonal covariance, concatenated first moments.
inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  int da = 2 * a.n(), db = 2 * b.n();
  MatrixXd v = MatrixXd::Zero(da + db, da + db);
  v.topLeftCorner(da, da) = a.V();
  v.bottomRightCorner(db, db) = b.V();
  VectorXd m(da + db);
  m << a.m(), b.m();
  return GaussianState(std::move(v), std::move(m));
}

struct StateDiagnostics {
  double energy;
  double inv_V_opnorm;  // ||V^{-1}||_inf = 1 / lambda_min(V)
  double trace_inv_V;
  double min_eig;
};

inline StateDiagnostics diagnostics(const GaussianState& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.V());
  VectorXd ev = es.eigenvalues();
  double emax = ev.maxCoeff();
  if (ev.minCoeff() < 1e-12 * emax)
    throw std::runtime_error("diagnostics: covariance matrix too ill-conditioned to invert");
  StateDiagnostics d;
  d.energy = energy(s);
  d.min_eig = ev.minCoeff();
  d.inv_V_opnorm = 1.0 / d.min_eig;
  d.trace_inv_V = ev.cwiseInverse().sum();
  return d;
}

}  // namespace gausstomo

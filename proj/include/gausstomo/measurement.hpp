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

#include <ostream>
#include <string>
#include <vector>

#include "gausstomo/state.hpp"

namespace gausstomo {

enum class Scheme { heterodyne, homodyne, generaldyne, transpose_scheme, passive_unsqueeze };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::heterodyne: return "heterodyne";
    case Scheme::homodyne: return "homodyne";
    case Scheme::generaldyne: return "generaldyne";
    case Scheme::transpose_scheme: return "transpose_scheme";
    case Scheme::passive_unsqueeze: return "passive_unsqueeze";
  }
  return "?";
}

/// Outcome matrix of a simulated measurement run; one outcome per row.
/// The recorded key replays the batch exactly.
struct SampleBatch {
  MatrixXd data;
  Scheme scheme;
  std::uint64_t seed;
};

/// Mean and covariance of the classical outcome distribution of a scheme.
struct NormalLaw {
  VectorXd mean;
  MatrixXd cov;
};

enum class Quadrature { position, momentum };
using QuadratureSelection = std::vector<Quadrature>;

/// N i.i.d. draws from N(mean, cov) through a symmetric factorization of cov.
/// Eigenvalues in [-1e-10, 0) are clamped to zero; anything lower is rejected.
inline MatrixXd sample_gaussian(const VectorXd& mean, const MatrixXd& cov, long n_samples, Rng& rng) {
  require_symmetric(cov, "sample_gaussian");
  if (cov.rows() != mean.size()) throw std::invalid_argument("sample_gaussian: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (cov + cov.transpose().eval()));
  VectorXd ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("sample_gaussian: covariance is not positive semidefinite (min eigenvalue " +
                                std::to_string(ev.minCoeff()) + ")");
  const int k = static_cast<int>(mean.size());
  MatrixXd factor = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  MatrixXd z(n_samples, k);
  for (long i = 0; i < n_samples; ++i)
    for (int j = 0; j < k; ++j) z(i, j) = rng.normal();
  MatrixXd out = z * factor.transpose();
  out.rowwise() += mean.transpose();
  return out;
}

inline NormalLaw heterodyne_law(const GaussianState& s) {
  const int d = 2 * s.n();
  return {s.m(), 0.5 * (s.V() + MatrixXd::Identity(d, d))};
}

/// Heterodyne detection: r ~ N(m, (V + 1)/2).
inline SampleBatch sample_heterodyne(const GaussianState& s, long n_samples, Rng& rng) {
  std::uint64_t key = rng.next_u64();
  Rng local(key);
  NormalLaw law = heterodyne_law(s);
  return {sample_gaussian(law.mean, law.cov, n_samples, local), Scheme::heterodyne, key};
}

inline NormalLaw homodyne_law(const GaussianState& s, const QuadratureSelection& sel) {
  if (static_cast<int>(sel.size()) != s.n())
    throw std::invalid_argument("homodyne_law: selection must pick one quadrature per mode");
  const int n = s.n();
  VectorXd mean(n);
  MatrixXd cov(n, n);
  std::vector<int> idx(n);
  for (int j = 0; j < n; ++j) idx[j] = 2 * j + (sel[j] == Quadrature::momentum ? 1 : 0);
  for (int j = 0; j < n; ++j) {
    mean(j) = s.m()(idx[j]);
    for (int k = 0; k < n; ++k) cov(j, k) = 0.5 * s.V()(idx[j], idx[k]);
  }
  return {mean, cov};
}

/// Homodyne detection of the selected quadratures: x ~ N(m_sel, V_sel / 2).
inline SampleBatch sample_homodyne(const GaussianState& s, const QuadratureSelection& sel, long n_samples,
                                   Rng& rng) {
  std::uint64_t key = rng.next_u64();
  Rng local(key);
  NormalLaw law = homodyne_law(s, sel);
  return {sample_gaussian(law.mean, law.cov, n_samples, local), Scheme::homodyne, key};
}

/// Generalized heterodyne: interfere the state with an auxiliary state on a
/// balanced beam splitter, homodyne positions on one arm and momenta on the
/// other. The rescaled outcome follows N(m1 + T m2, (V1 + T V2 T)/2) with T
/// the momentum sign flip; the sqrt(2) bookkeeping is absorbed here.
inline NormalLaw generaldyne_law(const GaussianState& a, const GaussianState& aux) {
  if (a.n() != aux.n()) throw std::invalid_argument("generaldyne: mode-count mismatch");
  MatrixXd t = transpose_flip(a.n());
  return {a.m() + t * aux.m(), 0.5 * (a.V() + t * aux.V() * t)};
}

inline SampleBatch sample_generaldyne(const GaussianState& a, const GaussianState& aux, long n_samples,
                                      Rng& rng) {
  std::uint64_t key = rng.next_u64();
  Rng local(key);
  NormalLaw law = generaldyne_law(a, aux);
  return {sample_gaussian(law.mean, law.cov, n_samples, local), Scheme::generaldyne, key};
}

inline NormalLaw transpose_scheme_law(const GaussianState& s) { return {2.0 * s.m(), s.V()}; }

/// Scheme with access to the transpose: feeding rho^T into the second port
/// yields r ~ N(2m, V) with no identity broadening.
inline SampleBatch sample_transpose_scheme(const GaussianState& s, long n_samples, Rng& rng) {
  NormalLaw via_generaldyne = generaldyne_law(s, transpose_state(s));
  NormalLaw closed = transpose_scheme_law(s);
  double scale = 1.0 + closed.cov.cwiseAbs().maxCoeff();
  if ((via_generaldyne.mean - closed.mean).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + closed.mean.cwiseAbs().maxCoeff()) ||
      (via_generaldyne.cov - closed.cov).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::runtime_error("sample_transpose_scheme: generaldyne reduction disagrees with closed form");
  std::uint64_t key = rng.next_u64();
  Rng local(key);
  return {sample_gaussian(via_generaldyne.mean, via_generaldyne.cov, n_samples, local),
          Scheme::transpose_scheme, key};
}

inline NormalLaw passive_unsqueeze_law(const GaussianState& s, const MatrixXd& sp) {
  return heterodyne_law(apply_symplectic(s, sp));
}

namespace detail {
inline void check_unsqueeze_conditioning(const MatrixXd& sp) {
  Eigen::JacobiSVD<MatrixXd> svd(sp);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0 || smax / smin > 1e12)
    throw std::invalid_argument("unsqueeze scheme: symplectic matrix too ill-conditioned");
}
}  // namespace detail

/// Heterodyne after the active unitary U_S, emulated passively: draw
/// r ~ N(m, (V + S^{-1} S^{-T})/2) and post-process to S r. The output
/// distribution equals heterodyne on apply_symplectic(state, S).
inline SampleBatch passive_unsqueeze_heterodyne(const GaussianState& s, const MatrixXd& sp, long n_samples,
                                                Rng& rng) {
  if (!is_symplectic(sp)) throw std::invalid_argument("passive_unsqueeze_heterodyne: not symplectic");
  detail::check_unsqueeze_conditioning(sp);
  MatrixXd sp_inv = sp.inverse();
  MatrixXd aux_cov = sp_inv * sp_inv.transpose();
  MatrixXd pre_cov = 0.5 * (s.V() + aux_cov);
  pre_cov = 0.5 * (pre_cov + pre_cov.transpose().eval());
  std::uint64_t key = rng.next_u64();
  Rng local(key);
  MatrixXd raw = sample_gaussian(s.m(), pre_cov, n_samples, local);
  return {raw * sp.transpose(), Scheme::passive_unsqueeze, key};
}

/// Euler-decomposed variant of the passive emulation: apply O2 to the state,
/// use the squeezed-vacuum auxiliary Z^{-1} Z^{-T}, post-process by O1 Z.
/// Same outcome distribution as passive_unsqueeze_heterodyne.
inline SampleBatch euler_variant_unsqueeze(const GaussianState& s, const MatrixXd& sp, long n_samples,
                                           Rng& rng) {
  if (!is_symplectic(sp)) throw std::invalid_argument("euler_variant_unsqueeze: not symplectic");
  detail::check_unsqueeze_conditioning(sp);
  EulerDecomposition ed = euler(sp);
  GaussianState rotated = apply_symplectic(s, ed.O2);
  MatrixXd zinv2 = (ed.Z * ed.Z).inverse();
  MatrixXd pre_cov = 0.5 * (rotated.V() + zinv2);
  pre_cov = 0.5 * (pre_cov + pre_cov.transpose().eval());
  std::uint64_t key = rng.next_u64();
  Rng local(key);
  MatrixXd raw = sample_gaussian(rotated.m(), pre_cov, n_samples, local);
  MatrixXd post = ed.O1 * ed.Z;
  return {raw * post.transpose(), Scheme::passive_unsqueeze, key};
}

/// CSV serialization: one comment row carrying scheme, seed, n, N, then one
/// outcome per line at 17 significant digits.
inline void write_csv(std::ostream& os, const SampleBatch& b) {
  const long rows = b.data.rows();
  const long cols = b.data.cols();
  const long n_modes = (b.scheme == Scheme::homodyne) ? cols : cols / 2;
  os << "# scheme=" << scheme_name(b.scheme) << ",seed=" << b.seed << ",n=" << n_modes << ",N=" << rows
     << "\n";
  char buf[32];
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", b.data(i, j));
      os << buf;
      if (j + 1 < cols) os << ',';
    }
    os << '\n';
  }
}

}  // namespace gausstomo

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

#include <cmath>
#include <optional>
#include <string>

#include "gausstomo/state.hpp"

namespace gausstomo {

/// Trace-distance perturbation bound between rho(V, m) and rho(W, t):
///
///   D_tr <= 1/2 ||V^{-1/2}(m - t)||_2 + (1 + sqrt(3))/8 Tr[(V^{-1} + W^{-1}) |V - W|].
///
/// The first term is asymmetric; it uses the covariance of the first
/// argument, exactly as stated. See perturbation_bound_symmetrized for the
/// order-minimized variant.
inline double perturbation_bound(const GaussianState& a, const GaussianState& b) {
  if (a.n() != b.n()) throw std::invalid_argument("perturbation_bound: mode-count mismatch");
  const double c = (1.0 + std::sqrt(3.0)) / 8.0;
  MatrixXd vih = sym_inv_sqrt(a.V());
  double mean_term = 0.5 * (vih * (a.m() - b.m())).norm();
  MatrixXd inv_sum = sym_inv(a.V()) + sym_inv(b.V());
  MatrixXd diff = a.V() - b.V();
  double cov_term = c * (inv_sum * matrix_abs(0.5 * (diff + diff.transpose().eval()))).trace();
  return mean_term + cov_term;
}

/// Trace distance is symmetric, so both argument orders give valid bounds;
/// this returns the smaller one.
inline double perturbation_bound_symmetrized(const GaussianState& a, const GaussianState& b) {
  return std::min(perturbation_bound(a, b), perturbation_bound(b, a));
}

/// Bound on the trace-norm derivative of rho(V + alpha X, m + alpha t) at
/// alpha = 0:  (1 + sqrt(3))/2 Tr(V^{-1} |X|) + 2 ||V^{-1/2} t||_2.
inline double derivative_bound(const MatrixXd& v, const MatrixXd& x, const VectorXd& t) {
  require_symmetric(x, "derivative_bound");
  const double c = (1.0 + std::sqrt(3.0)) / 2.0;
  double cov_term = c * (sym_inv(v) * matrix_abs(0.5 * (x + x.transpose().eval()))).trace();
  double mean_term = 2.0 * (sym_inv_sqrt(v) * t).norm();
  return cov_term + mean_term;
}

/// Upper bound on Tr(V^{-1}) of the true state from an estimate V_hat that
/// satisfies 0 <= V_hat - V <= 2 zeta / (1 - zeta) (V + 1). Minimum of the
/// applicable bounds:
///   (a) 4 E                        when an energy bound E is supplied,
///   (b) Tr(Omega V_hat Omega^T) = Tr(V_hat),
///   (c) (1 + eta) Tr((V_hat - eta)^{-1}), eta = 2 zeta/(1 - zeta),
///       when V_hat - eta is positive definite.
inline double empirical_trace_inv_bound(const MatrixXd& v_hat, double zeta,
                                        std::optional<double> energy_bound = std::nullopt) {
  require_symmetric(v_hat, "empirical_trace_inv_bound");
  if (zeta < 0.0 || zeta >= 1.0) throw std::invalid_argument("empirical_trace_inv_bound: zeta out of range");
  bool any = false;
  double best = 0.0;
  auto consider = [&](double candidate) {
    if (!any || candidate < best) best = candidate;
    any = true;
  };
  if (energy_bound) consider(4.0 * *energy_bound);
  consider(v_hat.trace());
  const double eta = 2.0 * zeta / (1.0 - zeta);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(v_hat);
  VectorXd shifted = es.eigenvalues().array() - eta;
  if (shifted.minCoeff() > 1e-12 * std::max(1.0, v_hat.cwiseAbs().maxCoeff()))
    consider((1.0 + eta) * shifted.cwiseInverse().sum());
  if (!any)
    throw std::runtime_error("empirical_trace_inv_bound: no applicable bound; supply an energy bound");
  return best;
}

inline double confidence_chi(int n, double delta) {
  if (n < 1) throw std::invalid_argument("confidence: mode count must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence: delta must be in (0,1)");
  return std::sqrt(2.0 * n) + std::sqrt(2.0 * std::log(2.0 / delta));
}

inline double confidence_zeta(double chi, long n_samples) {
  if (n_samples < 1) throw std::invalid_argument("confidence: sample count must be >= 1");
  double rn = std::sqrt(static_cast<double>(n_samples));
  return 2.0 * chi / rn + 2.0 * chi * chi / static_cast<double>(n_samples);
}

/// Number of adaptive unsqueezing rounds for an a-priori bound on
/// ||V^{-1}||_inf.
inline int adaptive_rounds(double inv_opnorm_bound) {
  if (inv_opnorm_bound <= 2.0) return 0;
  return static_cast<int>(std::ceil(std::log2(std::log2(inv_opnorm_bound))));
}

struct SamplePlan {
  std::string protocol;
  int n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  long N_h = 0;
  int k = 0;
  long N_t = 0;
  long N_total = 0;
};

namespace detail {
inline long ceil_to_long(double x) {
  if (!(x < 9e18)) throw std::invalid_argument("plan_samples: required sample count overflows");
  return static_cast<long>(std::ceil(x));
}
}  // namespace detail

/// Sample-complexity planner.
///   heterodyne: N = ceil((4.3 (2n + T) chi / eps)^2), T a Tr(V^{-1}) bound;
///   adaptive:   k = ceil(log2 log2 B), B a ||V^{-1}||_inf bound; per-round
///               budget delta/(k+1); N_h = ceil(80 chi^2);
///               N_t = ceil((21.5 n chi / eps)^2);
///   transpose:  N = ceil((8.55 n chi / eps)^2).
inline SamplePlan plan_samples(const std::string& protocol, int n, double epsilon, double delta,
                               std::optional<double> bound = std::nullopt) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("plan_samples: epsilon must be in (0,1)");
  SamplePlan p;
  p.protocol = protocol;
  p.n = n;
  p.epsilon = epsilon;
  p.delta = delta;
  if (protocol == "heterodyne") {
    if (!bound) throw std::invalid_argument("plan_samples: heterodyne needs a Tr(V^{-1}) bound");
    double chi = confidence_chi(n, delta);
    p.N_t = detail::ceil_to_long(std::pow(4.3 * (2.0 * n + *bound) * chi / epsilon, 2.0));
    p.N_total = p.N_t;
  } else if (protocol == "adaptive") {
    if (!bound) throw std::invalid_argument("plan_samples: adaptive needs a ||V^{-1}||_inf bound");
    p.k = adaptive_rounds(*bound);
    double chi = confidence_chi(n, delta / (p.k + 1));
    p.N_h = detail::ceil_to_long(80.0 * chi * chi);
    p.N_t = detail::ceil_to_long(std::pow(21.5 * n * chi / epsilon, 2.0));
    p.N_total = p.k * p.N_h + p.N_t;
  } else if (protocol == "transpose") {
    double chi = confidence_chi(n, delta);
    p.N_t = detail::ceil_to_long(std::pow(8.55 * n * chi / epsilon, 2.0));
    p.N_total = p.N_t;
  } else {
    throw std::invalid_argument("plan_samples: unknown protocol '" + protocol + "'");
  }
  return p;
}

}  // namespace gausstomo

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
#include <string>
#include <utility>
#include <vector>

#include "gausstomo/bounds.hpp"
#include "gausstomo/measurement.hpp"

namespace gausstomo {

struct MomentEstimate {
  VectorXd mu_hat;
  MatrixXd sigma_hat;
  long N = 0;
};

/// Empirical mean and covariance, no Bessel correction:
/// sigma_hat = (1/N) sum (x_i - mu_hat)(x_i - mu_hat)^T.
inline MomentEstimate empirical_moments(const MatrixXd& data) {
  const long n_samples = data.rows();
  if (n_samples < 2) throw std::invalid_argument("empirical_moments: need at least two samples");
  MomentEstimate e;
  e.N = n_samples;
  e.mu_hat = data.colwise().mean();
  MatrixXd centered = data.rowwise() - e.mu_hat.transpose();
  e.sigma_hat = (centered.transpose() * centered) / static_cast<double>(n_samples);
  e.sigma_hat = 0.5 * (e.sigma_hat + e.sigma_hat.transpose().eval());
  return e;
}

inline MomentEstimate empirical_moments(const SampleBatch& b) { return empirical_moments(b.data); }

struct ConfidenceParams {
  int n = 0;
  double delta = 0.0;
  long N = 0;
  double chi = 0.0;
  double zeta = 0.0;
};

inline ConfidenceParams confidence(int n, double delta, long n_samples) {
  ConfidenceParams c;
  c.n = n;
  c.delta = delta;
  c.N = n_samples;
  c.chi = confidence_chi(n, delta);
  c.zeta = confidence_zeta(c.chi, n_samples);
  return c;
}

/// Estimator inversion formulas, kept separate from the sampling so that
/// consistency can be checked on analytic moments.
inline std::pair<VectorXd, MatrixXd> heterodyne_invert(const VectorXd& mu, const MatrixXd& sigma,
                                                       double zeta) {
  MatrixXd v = 2.0 * sigma / (1.0 - zeta) - MatrixXd::Identity(sigma.rows(), sigma.cols());
  return {mu, v};
}

inline std::pair<VectorXd, MatrixXd> transpose_invert(const VectorXd& mu, const MatrixXd& sigma,
                                                      double zeta) {
  return {0.5 * mu, sigma / (1.0 - zeta)};
}

/// Projection of a raw covariance estimate onto the set of valid covariance
/// matrices: Williamson-decompose and clamp nu_j to [1, inf). On the
/// high-probability event of the estimation lemmas V_hat >= V holds and the
/// projection is the identity; it only fires on the failure event.
inline GaussianState project_to_valid(MatrixXd v_raw, const VectorXd& m) {
  v_raw = 0.5 * (v_raw + v_raw.transpose().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(v_raw);
  double floor = 1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < floor) {
    v_raw = es.eigenvectors() * es.eigenvalues().cwiseMax(floor).asDiagonal() *
            es.eigenvectors().transpose();
    v_raw = 0.5 * (v_raw + v_raw.transpose().eval());
  }
  WilliamsonDecomposition wd = williamson(v_raw);
  VectorXd d(v_raw.rows());
  for (int j = 0; j < wd.nu.size(); ++j) d(2 * j) = d(2 * j + 1) = std::max(wd.nu(j), 1.0);
  MatrixXd v = wd.S * d.asDiagonal() * wd.S.transpose();
  return GaussianState(0.5 * (v + v.transpose().eval()), m);
}

struct RoundLog {
  int round = 0;
  MatrixXd S_hat;              // Williamson factor of the round's estimate
  double inv_opnorm_before = 0.0;  // true ||V^{-1}||_inf before the round's unsqueezing
  double inv_opnorm_after = 0.0;   // and after it
  long N = 0;
};

struct TomographyResult {
  GaussianState estimate;
  std::string protocol;
  std::optional<double> epsilon_certificate;
  double delta = 0.0;
  std::vector<RoundLog> rounds;
  long total_samples = 0;
  std::uint64_t seed = 0;
  std::string k_policy;       // adaptive only
  bool k_exhausted = false;   // empirical policy ran out of rounds
};

/// Sampling access to an unknown state: protocols may draw heterodyne
/// samples of U_S rho U_S^dag and push further transforms, but never read
/// the covariance directly. The truth accessors exist for diagnostics,
/// logging and oracle policies in simulation studies.
class StateHandle {
 public:
  explicit StateHandle(GaussianState truth)
      : truth_(std::move(truth)), s_acc_(MatrixXd::Identity(2 * truth_.n(), 2 * truth_.n())) {}

  int n() const { return truth_.n(); }

  SampleBatch sample_heterodyne(long n_samples, Rng& rng) const {
    return gausstomo::sample_heterodyne(current(), n_samples, rng);
  }

  void push_transform(const MatrixXd& s) {
    if (!is_symplectic(s)) throw std::invalid_argument("StateHandle: transform is not symplectic");
    s_acc_ = s * s_acc_;
  }

  const MatrixXd& accumulated() const { return s_acc_; }
  const GaussianState& truth() const { return truth_; }
  GaussianState current() const { return apply_symplectic(truth_, s_acc_); }

  /// ||V^{-1}||_inf of the current transformed state. Logging diagnostic:
  /// no conditioning floor, so it stays usable at extreme squeezing where
  /// an actual inversion would be rejected.
  double true_inv_opnorm() const {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(current().V(), Eigen::EigenvaluesOnly);
    return 1.0 / es.eigenvalues().minCoeff();
  }

 private:
  GaussianState truth_;
  MatrixXd s_acc_;
};

namespace detail {

/// 1 / lambda_min without the conditioning floor of diagnostics().
inline double inv_opnorm_nofloor(const MatrixXd& v) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(v, Eigen::EigenvaluesOnly);
  return 1.0 / es.eigenvalues().minCoeff();
}

struct HeterodyneFit {
  GaussianState estimate;
  MatrixXd v_raw;
  double zeta = 0.0;
  double chi = 0.0;
};

inline HeterodyneFit heterodyne_fit(const MatrixXd& data, int n, double delta) {
  ConfidenceParams c = confidence(n, delta, data.rows());
  if (c.zeta >= 1.0)
    throw std::invalid_argument("heterodyne_tomography: zeta >= 1, increase the sample count");
  MomentEstimate mom = empirical_moments(data);
  auto [m_hat, v_raw] = heterodyne_invert(mom.mu_hat, mom.sigma_hat, c.zeta);
  HeterodyneFit fit{project_to_valid(v_raw, m_hat), v_raw, c.zeta, c.chi};
  return fit;
}

inline double heterodyne_certificate(const HeterodyneFit& fit, int n, long n_samples,
                                     std::optional<double> energy_bound) {
  double t_bound = empirical_trace_inv_bound(fit.v_raw, fit.zeta, energy_bound);
  return 4.3 * (2.0 * n + t_bound) * fit.chi / std::sqrt(static_cast<double>(n_samples));
}

}  // namespace detail

/// Algorithm: draw N heterodyne samples, set m_hat = mu_hat and
/// V_hat = 2 Sigma_hat / (1 - zeta) - 1, project to a valid state, and attach
/// the certificate 4.3 (2n + T_hat) chi / sqrt(N) with T_hat the empirical
/// Tr(V^{-1}) bound.
inline TomographyResult heterodyne_tomography(const StateHandle& handle, long n_samples, double delta,
                                              Rng& rng,
                                              std::optional<double> energy_bound = std::nullopt) {
  SampleBatch batch = handle.sample_heterodyne(n_samples, rng);
  detail::HeterodyneFit fit = detail::heterodyne_fit(batch.data, handle.n(), delta);
  TomographyResult r{fit.estimate, "heterodyne",
                     detail::heterodyne_certificate(fit, handle.n(), n_samples, energy_bound),
                     delta,
                     {},
                     n_samples,
                     batch.seed,
                     "",
                     false};
  return r;
}

/// Same estimator on a pre-drawn heterodyne batch.
inline TomographyResult heterodyne_tomography(const SampleBatch& batch, double delta,
                                              std::optional<double> energy_bound = std::nullopt) {
  const int n = static_cast<int>(batch.data.cols()) / 2;
  detail::HeterodyneFit fit = detail::heterodyne_fit(batch.data, n, delta);
  TomographyResult r{fit.estimate, "heterodyne",
                     detail::heterodyne_certificate(fit, n, batch.data.rows(), energy_bound),
                     delta,
                     {},
                     batch.data.rows(),
                     batch.seed,
                     "",
                     false};
  return r;
}

/// One adaptive unsqueezing step: estimate the current state with N_h
/// heterodyne samples, Williamson-decompose the estimate V_hat = S D S^T and
/// return S^{-1} as the next unsqueezing transform. Does not mutate the
/// handle; the caller applies the transform.
inline std::pair<MatrixXd, RoundLog> adaptive_round(const StateHandle& handle, long n_h, double delta,
                                                    Rng& rng) {
  double chi = confidence_chi(handle.n(), delta);
  long n_required = static_cast<long>(std::ceil(80.0 * chi * chi));
  if (n_h < n_required)
    throw std::invalid_argument("adaptive_round: N_h below 80 chi^2 = " + std::to_string(n_required));
  TomographyResult est = heterodyne_tomography(handle, n_h, delta, rng);
  WilliamsonDecomposition wd = williamson(est.estimate.V());
  MatrixXd unsqueeze = wd.S.inverse();

  RoundLog log;
  log.S_hat = wd.S;
  log.N = n_h;
  log.inv_opnorm_before = handle.true_inv_opnorm();
  GaussianState after = apply_symplectic(handle.current(), unsqueeze);
  log.inv_opnorm_after = detail::inv_opnorm_nofloor(after.V());
  return {unsqueeze, log};
}

enum class KPolicy { oracle, energy_bound, empirical };

inline const char* k_policy_name(KPolicy p) {
  switch (p) {
    case KPolicy::oracle: return "oracle";
    case KPolicy::energy_bound: return "energy_bound";
    case KPolicy::empirical: return "empirical";
  }
  return "?";
}

inline constexpr int kEmpiricalRoundCap = 10;      // recurrence lemma: a_0 <= 1e300 gives a_10 <= 2
inline constexpr double kEmpiricalStopSlack = 0.2; // stop once ||V_hat^{-1}||_inf <= 2 (1 + slack)

/// Adaptive unsqueezing tomography.
///
/// Runs adaptive rounds at N_h = ceil(80 chi^2) with per-round failure budget
/// delta/(k+1), then a final heterodyne estimation with
/// N_t = ceil((21.5 n chi / eps)^2), and pulls the estimate back through the
/// accumulated transform: returns (S^{-1} m_hat, S^{-1} V_hat S^{-T}).
///
/// The number of rounds k comes from the policy: `oracle` reads
/// ceil(log2 log2 ||V^{-1}||_inf) off the simulation truth, `energy_bound`
/// computes the same from a user-supplied bound, and `empirical` (default)
/// stops once the round estimate satisfies ||V_hat^{-1}||_inf <= 2 (1+slack),
/// capped at 10 rounds; running into the cap is reported via k_exhausted.
inline TomographyResult adaptive_tomography(StateHandle& handle, double epsilon, double delta,
                                            KPolicy policy, Rng& rng,
                                            std::optional<double> inv_opnorm_bound = std::nullopt) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("adaptive_tomography: epsilon and delta must be in (0,1)");
  const int n = handle.n();

  int k_budget = 0;
  bool empirical = false;
  switch (policy) {
    case KPolicy::oracle:
      k_budget = adaptive_rounds(handle.true_inv_opnorm());
      break;
    case KPolicy::energy_bound:
      if (!inv_opnorm_bound)
        throw std::invalid_argument("adaptive_tomography: energy_bound policy needs a bound");
      k_budget = adaptive_rounds(*inv_opnorm_bound);
      break;
    case KPolicy::empirical:
      k_budget = kEmpiricalRoundCap;
      empirical = true;
      break;
  }

  const double delta_round = delta / (k_budget + 1);
  const double chi = confidence_chi(n, delta_round);
  const long n_h = static_cast<long>(std::ceil(80.0 * chi * chi));

  TomographyResult result{handle.truth(), "adaptive", std::nullopt, delta, {}, 0, rng.key(),
                          k_policy_name(policy), false};

  long used = 0;
  int applied = 0;
  while (applied < k_budget) {
    if (empirical) {
      // A fresh estimate decides whether squeezing remains.
      TomographyResult probe = heterodyne_tomography(handle, n_h, delta_round, rng);
      used += n_h;
      double inv_hat = detail::inv_opnorm_nofloor(probe.estimate.V());
      if (inv_hat <= 2.0 * (1.0 + kEmpiricalStopSlack)) break;
      WilliamsonDecomposition wd = williamson(probe.estimate.V());
      MatrixXd unsqueeze = wd.S.inverse();
      RoundLog log;
      log.round = applied + 1;
      log.S_hat = wd.S;
      log.N = n_h;
      log.inv_opnorm_before = handle.true_inv_opnorm();
      handle.push_transform(unsqueeze);
      log.inv_opnorm_after = handle.true_inv_opnorm();
      result.rounds.push_back(std::move(log));
      ++applied;
      if (applied == k_budget) result.k_exhausted = true;  // cap hit without reaching the regime
    } else {
      auto [unsqueeze, log] = adaptive_round(handle, n_h, delta_round, rng);
      log.round = applied + 1;
      used += n_h;
      handle.push_transform(unsqueeze);
      result.rounds.push_back(std::move(log));
      ++applied;
    }
  }
  if (result.k_exhausted) {
    // One more probe distinguishes "stopped at the cap" from "converged at it".
    TomographyResult probe = heterodyne_tomography(handle, n_h, delta_round, rng);
    used += n_h;
    if (detail::inv_opnorm_nofloor(probe.estimate.V()) <= 2.0 * (1.0 + kEmpiricalStopSlack))
      result.k_exhausted = false;
  }

  const long n_t = static_cast<long>(std::ceil(std::pow(21.5 * n * chi / epsilon, 2.0)));
  TomographyResult final_fit = heterodyne_tomography(handle, n_t, delta_round, rng);
  used += n_t;

  MatrixXd s_acc_inv = handle.accumulated().inverse();
  MatrixXd v = s_acc_inv * final_fit.estimate.V() * s_acc_inv.transpose();
  VectorXd m = s_acc_inv * final_fit.estimate.m();
  result.estimate = GaussianState(0.5 * (v + v.transpose().eval()), m);
  result.epsilon_certificate = final_fit.epsilon_certificate;
  result.total_samples = used;
  return result;
}

/// Transpose-access tomography: sample N outcomes of the transpose scheme,
/// set m_hat = mu_hat / 2 and V_hat = Sigma_hat / (1 - zeta), project, and
/// attach the energy-independent certificate 8.55 n chi / sqrt(N).
inline TomographyResult transpose_tomography(const GaussianState& truth, long n_samples, double delta,
                                             Rng& rng) {
  const int n = truth.n();
  ConfidenceParams c = confidence(n, delta, n_samples);
  if (c.zeta >= 1.0)
    throw std::invalid_argument("transpose_tomography: zeta >= 1, increase the sample count");
  SampleBatch batch = sample_transpose_scheme(truth, n_samples, rng);
  MomentEstimate mom = empirical_moments(batch);
  auto [m_hat, v_raw] = transpose_invert(mom.mu_hat, mom.sigma_hat, c.zeta);
  double cert = 8.55 * n * c.chi / std::sqrt(static_cast<double>(n_samples));
  return {project_to_valid(v_raw, m_hat), "transpose", cert, delta, {}, n_samples, batch.seed, "", false};
}

struct RecurrenceReport {
  bool ok = true;
  double slack = 0.0;
  std::vector<int> violations;  // indices into the round sequence
};

/// Checks the logged true ||V_k^{-1}||_inf sequence against the adaptive-step
/// bound a_{k+1} <= sqrt(5/3 + (2/3) a_k), with multiplicative slack covering
/// the delta-probability estimation failures.
inline RecurrenceReport recurrence_check(const std::vector<RoundLog>& rounds, double slack = 0.2) {
  RecurrenceReport rep;
  rep.slack = slack;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    double a_k = rounds[i].inv_opnorm_before;
    double a_next = rounds[i].inv_opnorm_after;
    double bound = std::sqrt(5.0 / 3.0 + 2.0 / 3.0 * a_k) * (1.0 + slack);
    if (a_next > bound) {
      rep.ok = false;
      rep.violations.push_back(static_cast<int>(i));
    }
  }
  return rep;
}

}  // namespace gausstomo

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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gausstomo/estimation.hpp"

namespace gausstomo {

using nlohmann::json;

/// JSON state schema: {n, m: [2n floats], V: [2n x 2n row-major floats]}.
inline json state_to_json(const GaussianState& s) {
  json j;
  j["n"] = s.n();
  j["m"] = std::vector<double>(s.m().data(), s.m().data() + s.m().size());
  std::vector<double> v;
  v.reserve(s.V().size());
  for (int r = 0; r < s.V().rows(); ++r)
    for (int c = 0; c < s.V().cols(); ++c) v.push_back(s.V()(r, c));
  j["V"] = v;
  return j;
}

inline GaussianState state_from_json(const json& j) {
  int n = j.at("n").get<int>();
  auto mv = j.at("m").get<std::vector<double>>();
  auto vv = j.at("V").get<std::vector<double>>();
  if (static_cast<int>(mv.size()) != 2 * n || static_cast<int>(vv.size()) != 4 * n * n)
    throw std::invalid_argument("state_from_json: field sizes inconsistent with n");
  VectorXd m(2 * n);
  for (int i = 0; i < 2 * n; ++i) m(i) = mv[i];
  MatrixXd v(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) v(r, c) = vv[2 * n * r + c];
  return GaussianState(v, m);
}

inline json result_to_json(const TomographyResult& r) {
  json j;
  j["protocol"] = r.protocol;
  j["n"] = r.estimate.n();
  j["N_total"] = r.total_samples;
  if (r.epsilon_certificate)
    j["epsilon_certificate"] = *r.epsilon_certificate;
  else
    j["epsilon_certificate"] = nullptr;
  j["delta"] = r.delta;
  j["estimate"] = {{"m", state_to_json(r.estimate)["m"]}, {"V", state_to_json(r.estimate)["V"]}};
  json rounds = json::array();
  for (const auto& rl : r.rounds)
    rounds.push_back({{"i", rl.round}, {"a_before", rl.inv_opnorm_before}, {"a_after", rl.inv_opnorm_after},
                      {"N", rl.N}});
  j["rounds"] = rounds;
  j["seed"] = r.seed;
  if (!r.k_policy.empty()) {
    j["k_policy"] = r.k_policy;
    j["k_exhausted"] = r.k_exhausted;
  }
  return j;
}

inline json plan_to_json(const SamplePlan& p) {
  return json{{"protocol", p.protocol}, {"n", p.n},     {"epsilon", p.epsilon}, {"delta", p.delta},
              {"N_h", p.N_h},           {"k", p.k},     {"N_t", p.N_t},         {"N_total", p.N_total}};
}

/// Named test-state families used by the CLI and the experiment harness:
/// vacuum, thermal(nu), squeezed(z), squeezed_thermal(z,nu),
/// random(n,squeeze_max,temp_max), file(path). Single-mode families are
/// tensored to `modes` copies.
inline GaussianState make_named_state(const std::string& spec, int modes, Rng& rng) {
  auto open = spec.find('(');
  std::string name = spec.substr(0, open);
  std::vector<double> args;
  std::string payload;
  if (open != std::string::npos) {
    auto close = spec.rfind(')');
    if (close == std::string::npos || close < open)
      throw std::invalid_argument("state spec '" + spec + "': unbalanced parentheses");
    payload = spec.substr(open + 1, close - open - 1);
    if (name != "file") {
      std::stringstream ss(payload);
      std::string tok;
      while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
    }
  }
  auto need = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("state spec '" + spec + "': expected " + std::to_string(k) + " parameter(s)");
  };
  auto replicate = [&](const GaussianState& single) {
    GaussianState s = single;
    for (int i = 1; i < modes; ++i) s = tensor(s, single);
    return s;
  };

  if (name == "vacuum") {
    need(0);
    return GaussianState(MatrixXd::Identity(2 * modes, 2 * modes), VectorXd::Zero(2 * modes));
  }
  if (name == "thermal") {
    need(1);
    return replicate(GaussianState(args[0] * MatrixXd::Identity(2, 2), VectorXd::Zero(2)));
  }
  if (name == "squeezed") {
    need(1);
    MatrixXd v(2, 2);
    v << args[0] * args[0], 0, 0, 1.0 / (args[0] * args[0]);
    return replicate(GaussianState(v, VectorXd::Zero(2)));
  }
  if (name == "squeezed_thermal") {
    need(2);
    MatrixXd v(2, 2);
    v << args[1] * args[0] * args[0], 0, 0, args[1] / (args[0] * args[0]);
    return replicate(GaussianState(v, VectorXd::Zero(2)));
  }
  if (name == "random") {
    need(3);
    int n = static_cast<int>(args[0]);
    return GaussianState(random_covariance(n, args[1], args[2], rng), VectorXd::Zero(2 * n));
  }
  if (name == "file") {
    std::ifstream in(payload);
    if (!in) throw std::invalid_argument("state spec: cannot open '" + payload + "'");
    json j;
    in >> j;
    return state_from_json(j);
  }
  throw std::invalid_argument("state spec '" + spec + "': unknown family '" + name + "'");
}

}  // namespace gausstomo

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

#include "gausstomo/io.hpp"

#include <catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>

using namespace gausstomo;
using Catch::Approx;

TEST_CASE("state json round trip") {
  Rng rng(601);
  VectorXd m(4);
  for (int i = 0; i < 4; ++i) m(i) = rng.normal();
  GaussianState s(random_covariance(2, 4.0, 3.0, rng), m);
  json j = state_to_json(s);
  REQUIRE(j["n"] == 2);
  REQUIRE(j["m"].size() == 4);
  REQUIRE(j["V"].size() == 16);
  // row-major layout
  REQUIRE(j["V"][1].get<double>() == s.V()(0, 1));

  GaussianState back = state_from_json(j);
  REQUIRE((back.V() - s.V()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((back.m() - s.m()).cwiseAbs().maxCoeff() == 0.0);

  json bad = j;
  bad["m"] = std::vector<double>{1.0};
  REQUIRE_THROWS_AS(state_from_json(bad), std::invalid_argument);
}

TEST_CASE("tomography result json schema") {
  Rng rng(602);
  GaussianState truth(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  StateHandle h(truth);
  TomographyResult r = heterodyne_tomography(h, 5000, 0.05, rng);
  json j = result_to_json(r);
  for (const char* key : {"protocol", "n", "N_total", "epsilon_certificate", "delta", "estimate", "rounds",
                          "seed"})
    REQUIRE(j.contains(key));
  REQUIRE(j["protocol"] == "heterodyne");
  REQUIRE(j["N_total"] == 5000);
  REQUIRE(j["estimate"].contains("m"));
  REQUIRE(j["estimate"].contains("V"));
}

TEST_CASE("plan json") {
  json j = plan_to_json(plan_samples("adaptive", 1, 0.1, 0.05, 1e6));
  REQUIRE(j["k"] == 5);
  REQUIRE(j["N_total"] == j["k"].get<long>() * j["N_h"].get<long>() + j["N_t"].get<long>());
}

TEST_CASE("named state families") {
  Rng rng(603);
  GaussianState vac = make_named_state("vacuum", 2, rng);
  REQUIRE(vac.n() == 2);
  REQUIRE((vac.V() - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  GaussianState th = make_named_state("thermal(3)", 1, rng);
  REQUIRE(th.V()(0, 0) == Approx(3.0));

  GaussianState sq = make_named_state("squeezed(10)", 1, rng);
  REQUIRE(sq.V()(0, 0) == Approx(100.0));
  REQUIRE(sq.V()(1, 1) == Approx(0.01));

  GaussianState sth = make_named_state("squeezed_thermal(2,3)", 1, rng);
  REQUIRE(sth.V()(0, 0) == Approx(12.0));
  REQUIRE(sth.V()(1, 1) == Approx(0.75));
  REQUIRE(symplectic_eigenvalues(sth.V())(0) == Approx(3.0));

  GaussianState rnd = make_named_state("random(3,5,2)", 1, rng);
  REQUIRE(rnd.n() == 3);

  // tensoring single-mode families
  GaussianState sq2 = make_named_state("squeezed(2)", 3, rng);
  REQUIRE(sq2.n() == 3);

  REQUIRE_THROWS_AS(make_named_state("coherentish", 1, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(make_named_state("thermal(3,4)", 1, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(make_named_state("thermal(3", 1, rng), std::invalid_argument);
}

TEST_CASE("state family file round trip") {
  Rng rng(604);
  GaussianState s = make_named_state("random(2,4,3)", 1, rng);
  std::string path = "tmp_state_roundtrip.json";
  {
    std::ofstream out(path);
    out << state_to_json(s);
  }
  GaussianState back = make_named_state("file(" + path + ")", 1, rng);
  REQUIRE((back.V() - s.V()).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(make_named_state("file(/nonexistent/x.json)", 1, rng), std::invalid_argument);
}

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

#include "gausstomo/state.hpp"

#include <catch_amalgamated.hpp>

using namespace gausstomo;
using Catch::Approx;

namespace {
GaussianState random_state(int n, double squeeze_max, double temp_max, Rng& rng) {
  VectorXd m(2 * n);
  for (int i = 0; i < 2 * n; ++i) m(i) = rng.normal();
  return GaussianState(random_covariance(n, squeeze_max, temp_max, rng), m);
}
}  // namespace

TEST_CASE("state validation") {
  REQUIRE_NOTHROW(GaussianState(MatrixXd::Identity(2, 2), VectorXd::Zero(2)));

  MatrixXd sub = 0.5 * MatrixXd::Identity(2, 2);
  REQUIRE_THROWS_WITH(GaussianState(sub, VectorXd::Zero(2)),
                      Catch::Matchers::ContainsSubstring("uncertainty"));

  double z = 10.0;
  MatrixXd v(2, 2);
  v << z * z, 0, 0, 1.0 / (z * z);
  VectorXd m(2);
  m << 1, 0;
  REQUIRE_NOTHROW(GaussianState(v, m));

  REQUIRE_THROWS_AS(GaussianState(MatrixXd::Identity(2, 2), VectorXd::Zero(4)), std::invalid_argument);
  REQUIRE_THROWS_AS(GaussianState(MatrixXd::Identity(3, 3), VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("energy") {
  GaussianState vac(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  REQUIRE(energy(vac) == Approx(0.5));

  double z = 10.0;
  MatrixXd v(2, 2);
  v << z * z, 0, 0, 1.0 / (z * z);
  REQUIRE(energy(GaussianState(v, VectorXd::Zero(2))) == Approx(25.0025));

  VectorXd m(2);
  m << 2, 0;
  REQUIRE(energy(GaussianState(MatrixXd::Identity(2, 2), m)) == Approx(2.5));
}

TEST_CASE("apply_symplectic") {
  GaussianState vac(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  SECTION("identity is a no-op") {
    GaussianState out = apply_symplectic(vac, MatrixXd::Identity(2, 2));
    REQUIRE((out.V() - vac.V()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(out.m().cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("squeezing the vacuum") {
    double z = 3.0;
    MatrixXd s(2, 2);
    s << z, 0, 0, 1.0 / z;
    GaussianState out = apply_symplectic(vac, s);
    REQUIRE(out.V()(0, 0) == Approx(z * z));
    REQUIRE(out.V()(1, 1) == Approx(1.0 / (z * z)));
  }
  SECTION("preserves the symplectic spectrum") {
    Rng rng(101);
    GaussianState st = random_state(3, 5.0, 3.0, rng);
    MatrixXd s = random_symplectic(3, 5.0, rng);
    VectorXd nu0 = symplectic_eigenvalues(st.V());
    VectorXd nu1 = symplectic_eigenvalues(apply_symplectic(st, s).V());
    REQUIRE((nu0 - nu1).cwiseAbs().maxCoeff() < 1e-8 * nu0.maxCoeff());
  }
  SECTION("displacement and energy conservation under passive action") {
    Rng rng(102);
    GaussianState st = random_state(2, 4.0, 3.0, rng);
    MatrixXd o = random_orthogonal_symplectic(2, rng);
    REQUIRE(energy(apply_symplectic(st, o)) == Approx(energy(st)).epsilon(1e-12));
    VectorXd d(4);
    d << 1, 2, 3, 4;
    GaussianState moved = apply_symplectic(st, MatrixXd::Identity(4, 4), d);
    REQUIRE((moved.m() - (st.m() + d)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("rejects non-symplectic transforms") {
    REQUIRE_THROWS_AS(apply_symplectic(vac, 2.0 * MatrixXd::Identity(2, 2)), std::invalid_argument);
  }
}

TEST_CASE("transpose_state") {
  MatrixXd v(2, 2);
  v << 2.0, 0.7, 0.7, 1.5;
  GaussianState st(v, VectorXd::Zero(2));
  GaussianState t = transpose_state(st);
  REQUIRE(t.V()(0, 0) == Approx(2.0));
  REQUIRE(t.V()(1, 1) == Approx(1.5));
  REQUIRE(t.V()(0, 1) == Approx(-0.7));

  // diagonal V with zero mean is a fixed point
  GaussianState th(3.0 * MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  REQUIRE((transpose_state(th).V() - th.V()).cwiseAbs().maxCoeff() == 0.0);

  // involution, and conserved quantities
  Rng rng(103);
  GaussianState r = random_state(2, 5.0, 3.0, rng);
  GaussianState tt = transpose_state(transpose_state(r));
  REQUIRE((tt.V() - r.V()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((tt.m() - r.m()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(energy(transpose_state(r)) == Approx(energy(r)));
  VectorXd nu0 = symplectic_eigenvalues(r.V());
  VectorXd nu1 = symplectic_eigenvalues(transpose_state(r).V());
  REQUIRE((nu0 - nu1).cwiseAbs().maxCoeff() < 1e-9 * nu0.maxCoeff());
}

TEST_CASE("tensor") {
  GaussianState vac(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  GaussianState two = tensor(vac, vac);
  REQUIRE(two.n() == 2);
  REQUIRE((two.V() - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(104);
  GaussianState a = random_state(1, 4.0, 3.0, rng);
  GaussianState b = random_state(2, 4.0, 3.0, rng);
  GaussianState ab = tensor(a, b);
  REQUIRE(energy(ab) == Approx(energy(a) + energy(b)));

  VectorXd nu = symplectic_eigenvalues(ab.V());
  std::vector<double> expect;
  VectorXd na = symplectic_eigenvalues(a.V()), nb = symplectic_eigenvalues(b.V());
  for (int i = 0; i < na.size(); ++i) expect.push_back(na(i));
  for (int i = 0; i < nb.size(); ++i) expect.push_back(nb(i));
  std::sort(expect.begin(), expect.end(), std::greater<double>());
  for (int i = 0; i < nu.size(); ++i) REQUIRE(nu(i) == Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("diagnostics") {
  GaussianState vac(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  StateDiagnostics d = diagnostics(vac);
  REQUIRE(d.energy == Approx(0.5));
  REQUIRE(d.inv_V_opnorm == Approx(1.0));
  REQUIRE(d.trace_inv_V == Approx(2.0));
  REQUIRE(d.min_eig == Approx(1.0));

  double z = 10.0;
  MatrixXd v(2, 2);
  v << z * z, 0, 0, 1.0 / (z * z);
  StateDiagnostics ds = diagnostics(GaussianState(v, VectorXd::Zero(2)));
  REQUIRE(ds.inv_V_opnorm == Approx(100.0));
  REQUIRE(ds.trace_inv_V == Approx(100.01));

  // chain inequality ||V^{-1}|| <= ||V|| <= Tr V <= 4 E on random states
  Rng rng(105);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianState st = random_state(2, 6.0, 4.0, rng);
    StateDiagnostics dd = diagnostics(st);
    double vnorm = op_norm(st.V());
    REQUIRE(dd.inv_V_opnorm <= vnorm * (1 + 1e-12));
    REQUIRE(vnorm <= st.V().trace() * (1 + 1e-12));
    REQUIRE(st.V().trace() <= 4.0 * dd.energy * (1 + 1e-12));
    REQUIRE(dd.trace_inv_V <= 2 * st.n() * dd.inv_V_opnorm * (1 + 1e-12));
    REQUIRE(dd.inv_V_opnorm <= 4.0 * dd.energy * (1 + 1e-12));
  }
}

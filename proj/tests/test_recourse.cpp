// Copyright 2026 The snbr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "snbr/builders.hpp"
#include "snbr/error.hpp"
#include "snbr/recourse.hpp"

using namespace snbr;

namespace {

// Shortfall recourse: q = (over, under) with x + over - under = omega.
std::shared_ptr<RecourseProblem> shortfall(double t_coeff, double c_over, double c_under,
                                           double quad = -1.0) {
  auto p = std::make_shared<RecourseProblem>();
  p->kind = quad >= 0.0 ? RecourseKind::kQuadratic : RecourseKind::kLinear;
  p->dim = 1;
  p->support = {{0.0, 1.0}};
  p->scenario = [=](std::span<const double> omega) {
    ScenarioData s;
    s.d = Eigen::Vector2d(c_over, c_under);
    s.T = Eigen::MatrixXd::Constant(1, 1, t_coeff);
    s.h = Eigen::VectorXd::Constant(1, omega[0]);
    s.W.resize(1, 2);
    s.W << 1.0, -1.0;
    if (quad >= 0.0) s.H = quad * Eigen::MatrixXd::Identity(2, 2);
    return s;
  };
  p->ms = std::abs(t_coeff) * (std::max(c_over, c_under) + std::max(quad, 0.0));
  return p;
}

double value_at(const RecourseProblem& p, double x, double omega) {
  const double xs[1] = {x};
  const double om[1] = {omega};
  return recourse_value(p, xs, om);
}

double sub_at(const RecourseProblem& p, double x, double omega) {
  const double xs[1] = {x};
  const double om[1] = {omega};
  return recourse_subgradient(p, xs, om)[0];
}

double capacity_value(double x, double d, double h) {
  auto p = make_capacity_recourse(0.3, 0.4, 0.45, 0.55);
  const double xs[1] = {x};
  const double om[2] = {d, h};
  return recourse_value(*p, xs, om);
}

double capacity_sub(double x, double d, double h) {
  auto p = make_capacity_recourse(0.3, 0.4, 0.45, 0.55);
  const double xs[1] = {x};
  const double om[2] = {d, h};
  return recourse_subgradient(*p, xs, om)[0];
}

}  // namespace

TEST_SUITE("recourse") {
  TEST_CASE("capacity value and subgradient") {
    CHECK(capacity_value(0.3, 0.35, 0.5) == doctest::Approx(0.0825));
    CHECK(capacity_sub(0.3, 0.35, 0.5) == doctest::Approx(0.20));
    CHECK(capacity_sub(0.8, 0.35, 0.5) == 0.0);
    CHECK(capacity_sub(0.0, 0.35, 0.5) == doctest::Approx(0.35));
  }

  TEST_CASE("capacity subgradient matches finite differences") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ud(0.3, 0.4), uh(0.45, 0.55);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = ux(gen), d = ud(gen), h = uh(gen);
      if (std::abs(x - d / h) < 1e-4) continue;
      const double step = 1e-6;
      const double fd = (capacity_value(x + step, d, h) - capacity_value(x - step, d, h)) / (2 * step);
      CHECK(std::abs(fd - capacity_sub(x, d, h)) <= 1e-6);
    }
  }

  TEST_CASE("capacity expectation by quadrature") {
    auto p = make_capacity_recourse(0.3, 0.4, 0.45, 0.55);
    // Below the smallest kink d/h = 0.3/0.55 every scenario is active.
    for (double x : {0.0, 0.2, 0.5}) {
      const double xs[1] = {x};
      CHECK(expected_subgradient(*p, xs, 64)[0] == doctest::Approx(0.35 - 0.5 * x).epsilon(1e-12));
      CHECK(expected_subgradient(*p, xs, 128)[0] ==
            doctest::Approx(expected_subgradient(*p, xs, 64)[0]).epsilon(1e-12));
    }
    const double xs[1] = {0.3};
    // E[d x - h x^2 / 2] at x = 0.3.
    CHECK(expected_value(*p, xs) == doctest::Approx(0.35 * 0.3 - 0.25 * 0.09).epsilon(1e-12));
    CHECK_THROWS_AS(expected_value(*p, xs, 32), Error);
  }

  TEST_CASE("capacity dual QP agrees with the closed form") {
    for (double d : {0.3, 0.35, 0.4})
      for (double h : {0.45, 0.5, 0.55})
        for (double x : {0.0, 0.2, 0.5, 0.7, 0.9, 1.2}) {
          const SolveOutcome o = qp_active_set(capacity_dual(d, h, x));
          REQUIRE(o.status == SolveStatus::kOptimal);
          CHECK(std::abs(o.objective - scalar_box_qp(d, h, x).value) <= 1e-8);
          CHECK(std::abs(o.primal(1) - capacity_sub(x, d, h)) <= 1e-8);
        }
  }

  TEST_CASE("linear recourse closed form") {
    auto p = shortfall(1.0, 2.0, 3.0);
    // 2 max(omega - x, 0) + 3 max(x - omega, 0).
    CHECK(value_at(*p, 0.2, 0.5) == doctest::Approx(0.6));
    CHECK(value_at(*p, 0.7, 0.5) == doctest::Approx(0.6));
    CHECK(sub_at(*p, 0.2, 0.5) == doctest::Approx(-2.0));
    CHECK(sub_at(*p, 0.7, 0.5) == doctest::Approx(3.0));
  }

  TEST_CASE("LP with T = 0 does not depend on x") {
    auto p = shortfall(0.0, 2.0, 3.0);
    CHECK(value_at(*p, 0.1, 0.4) == doctest::Approx(value_at(*p, 0.9, 0.4)));
    CHECK(sub_at(*p, 0.1, 0.4) == 0.0);
  }

  TEST_CASE("QP with H = 0 reduces to the LP") {
    auto lp = shortfall(1.0, 2.0, 3.0);
    auto qp = shortfall(1.0, 2.0, 3.0, 0.0);
    for (double x : {0.0, 0.3, 0.8})
      for (double w : {0.1, 0.5, 0.9}) {
        CHECK(value_at(*qp, x, w) == doctest::Approx(value_at(*lp, x, w)).epsilon(1e-9));
        const double xs[1] = {x};
        const ScenarioData s = lp->scenario(std::vector<double>{w});
        const SolveOutcome o = qp_active_set(dorn_dual(s, xs));
        REQUIRE(o.status == SolveStatus::kOptimal);
        CHECK(o.objective == doctest::Approx(value_at(*lp, x, w)).epsilon(1e-9));
      }
  }

  TEST_CASE("Dorn dual closes the gap") {
    // 1x1 strictly convex: min 2 q + q^2 / 2, q = h - x >= 0.
    ScenarioData s;
    s.d = Eigen::VectorXd::Constant(1, 2.0);
    s.T = Eigen::MatrixXd::Constant(1, 1, 1.0);
    s.h = Eigen::VectorXd::Constant(1, 3.0);
    s.W = Eigen::MatrixXd::Constant(1, 1, 1.0);
    s.H = Eigen::MatrixXd::Constant(1, 1, 1.0);
    const double xs[1] = {1.0};
    const SolveOutcome o = qp_active_set(dorn_dual(s, xs));
    REQUIRE(o.status == SolveStatus::kOptimal);
    CHECK(o.objective == doctest::Approx(2.0 * 2.0 + 0.5 * 4.0));

    auto p = shortfall(1.0, 0.5, 1.5, 0.8);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double x = u(gen), w = u(gen);
      const double xv[1] = {x};
      const ScenarioData sc = p->scenario(std::vector<double>{w});
      const SolveOutcome d = qp_active_set(dorn_dual(sc, xv));
      REQUIRE(d.status == SolveStatus::kOptimal);
      CHECK(std::abs(d.objective - value_at(*p, x, w)) <= 1e-8);
    }
  }

  TEST_CASE("subgradient inequality and convexity") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto p : {shortfall(1.0, 2.0, 3.0), shortfall(-0.7, 1.0, 0.4), shortfall(1.0, 0.5, 1.5, 0.8)}) {
      for (int trial = 0; trial < 100; ++trial) {
        const double w = u(gen), x = u(gen), y = u(gen), lam = u(gen);
        const double s = sub_at(*p, x, w);
        CHECK(value_at(*p, y, w) >= value_at(*p, x, w) + s * (y - x) - 1e-8);
        CHECK(value_at(*p, lam * x + (1 - lam) * y, w) <=
              lam * value_at(*p, x, w) + (1 - lam) * value_at(*p, y, w) + 1e-8);
        CHECK(std::abs(s) <= p->ms + 1e-12);
      }
    }
  }

  TEST_CASE("infeasible second stage is reported") {
    auto p = std::make_shared<RecourseProblem>();
    p->kind = RecourseKind::kLinear;
    p->support = {{0.0, 1.0}};
    p->scenario = [](std::span<const double> omega) {
      ScenarioData s;
      s.d = Eigen::VectorXd::Constant(1, 1.0);
      s.T = Eigen::MatrixXd::Constant(1, 1, 1.0);
      s.h = Eigen::VectorXd::Constant(1, omega[0]);
      s.W = Eigen::MatrixXd::Constant(1, 1, 1.0);
      return s;
    };
    try {
      value_at(*p, 2.0, 0.5);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInfeasible);
    }
  }

  TEST_CASE("recourse SA reaches the grid-search minimizer") {
    CapacityConfig cfg;
    cfg.d_low = cfg.d_high = 0.35;
    cfg.h_low = cfg.h_high = 0.5;
    BuiltGame built = build_capacity(cfg, 2.0);
    const GameSpec& game = built.game;
    Profile anchor(game.dims(), 0.1);
    const std::size_t i = 2;
    const double eta = capacity_eta(cfg)[i];
    const double cap = capacity_caps(cfg)[i];
    double others = 0.0;
    for (std::size_t j = 0; j < game.size(); ++j)
      if (j != i) others += anchor.block(j)[0];
    auto objective = [&](double z) {
      return 0.5 * eta * z * z - cfg.a * z + cfg.b * z * others + cfg.b * z * z +
             0.5 * game.mu * (z - 0.1) * (z - 0.1) + scalar_box_qp(0.35, 0.5, z).value;
    };
    double best_z = 0.0, best = objective(0.0);
    const int grid = 1000000;
    for (int g = 1; g <= grid; ++g) {
      const double z = cap * g / grid;
      const double v = objective(z);
      if (v < best) best = v, best_z = z;
    }
    SampleStream stream(5, {0, StreamTag::kGradient, i, 0});
    const double start[1] = {0.0};
    const Vec z = sa_solve_recourse(game, i, anchor, start, 20000, stream);
    CHECK(std::abs(z[0] - best_z) <= 1e-4);

    SampleStream again(5, {0, StreamTag::kGradient, i, 0});
    CHECK(sa_solve_recourse(game, i, anchor, start, 1, again)[0] == 0.0);
  }

  TEST_CASE("capacity subgradient second moment respects M_s") {
    auto p = make_capacity_recourse(0.3, 0.4, 0.45, 0.55);
    SampleStream stream(9, {0, StreamTag::kAuxiliary, 0, 0});
    double acc = 0.0;
    const int n = 10000;
    Vec u(2), omega(2);
    for (int k = 0; k < n; ++k) {
      stream.fill_uniform(u);
      p->map_sample(u, omega);
      const double x[1] = {stream.uniform() * 0.6};
      const double s = recourse_subgradient(*p, x, omega)[0];
      CHECK(std::abs(s) <= p->ms);
      acc += s * s;
    }
    CHECK(acc / n <= p->ms * p->ms);
    CHECK(p->ms == doctest::Approx(0.4));
  }

  TEST_CASE("recourse factories validate supports") {
    CHECK_THROWS_AS(make_capacity_recourse(0.0, 0.4, 0.45, 0.55), Error);
    CHECK_THROWS_AS(make_capacity_recourse(0.3, 0.2, 0.45, 0.55), Error);
    CHECK_THROWS_AS(capacity_dual(0.3, 0.0, 0.5), Error);
  }
}

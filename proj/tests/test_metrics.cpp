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
#include "fixtures.hpp"
#include "snbr/builders.hpp"
#include "snbr/error.hpp"
#include "snbr/metrics.hpp"

using namespace snbr;
using snbr::testing::make_profile;
using snbr::testing::quadratic_game;

namespace {

TrajectoryRecord record_of(const std::vector<Profile>& xs) {
  TrajectoryRecord r;
  r.x = xs;
  const std::size_t n = xs.front().players();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    r.beta.emplace_back(n, k);
    r.sg_cum.emplace_back(n, 10 * k);
    r.comm_rounds.push_back(k);
  }
  return r;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("error series at the equilibrium vanish") {
    const Profile xs = make_profile({{0.5}, {0.2, 0.1}});
    const auto r = record_of({xs, xs, xs});
    const auto u = compute_u_k({r, r}, xs);
    for (double v : u) CHECK(v == 0.0);
    for (double v : compute_variance({r, r})) CHECK(v == 0.0);
  }

  TEST_CASE("single trajectory and two-trajectory means") {
    const Profile xs = make_profile({{0.0}, {0.0}});
    const auto a = record_of({make_profile({{0.3}, {0.4}})});
    CHECK(compute_u_k({a}, xs)[0] == doctest::Approx(0.5));
    CHECK(compute_inf_metric({a}, xs)[0] == doctest::Approx(0.4));
    const double eps = 0.125;
    const auto z = record_of({make_profile({{0.0}, {0.0}})});
    const auto b = record_of({make_profile({{2.0 * eps}, {0.0}})});
    CHECK(compute_u_k({z, b}, xs)[0] == doctest::Approx(eps));
    // Sample variance of {0, 2 eps} about its mean, summed over coordinates.
    CHECK(compute_variance({z, b})[0] == doctest::Approx(2.0 * eps * eps));
    const RunMetrics m = compute_metrics({z, b}, xs);
    CHECK(m.u_se[0] == doctest::Approx(eps));
    CHECK(m.sg_max(0) == 0.0);
  }

  TEST_CASE("metrics use the common prefix") {
    const Profile xs = make_profile({{0.0}});
    const auto a = record_of({make_profile({{1.0}}), make_profile({{0.5}}), make_profile({{0.25}})});
    const auto b = record_of({make_profile({{1.0}}), make_profile({{0.5}})});
    const RunMetrics m = compute_metrics({a, b}, xs);
    CHECK(m.size() == 2);
    CHECK(m.sg_max(1) == 10.0);
    CHECK(m.comm_rounds[1] == 1.0);
  }

  TEST_CASE("K(eps) lookup") {
    const std::vector<double> u{1.0, 0.1, 0.01};
    const std::vector<double> counts{10, 110, 1110};
    const auto k = k_of_epsilon(u, counts, {0.05, 2.0, 1e-3});
    CHECK(k[0].value() == 1110);
    CHECK(k[1].value() == 10);
    CHECK_FALSE(k[2].has_value());
    // The threshold is strict.
    CHECK(k_of_epsilon(u, counts, {0.1})[0].value() == 1110);
  }

  TEST_CASE("K(eps) of a geometric series matches direct summation") {
    const double q_const = 4.0, eta = 0.8, ratio = 0.7;
    std::vector<double> u, counts;
    double cum = 0.0;
    for (int k = 0; k < 30; ++k) {
      u.push_back(std::pow(ratio, k));
      counts.push_back(cum);
      cum += std::ceil(q_const / std::pow(eta, 2.0 * (k + 1)));
    }
    for (double eps : {0.5, 0.1, 0.01}) {
      const int kstar = static_cast<int>(std::floor(std::log(eps) / std::log(ratio))) + 1;
      double expect = 0.0;
      for (int j = 0; j < kstar; ++j) expect += std::ceil(q_const / std::pow(eta, 2.0 * (j + 1)));
      CHECK(k_of_epsilon(u, counts, {eps})[0].value() == expect);
    }
  }

  TEST_CASE("epsilon grid shape") {
    const auto g = epsilon_grid(1.0);
    CHECK(g.size() == 12);
    CHECK(g.front() == doctest::Approx(0.5));
    CHECK(g.back() == 2.5e-3);
    for (std::size_t j = 1; j < g.size(); ++j) CHECK(g[j] < g[j - 1]);
    CHECK_THROWS_AS(epsilon_grid(4e-3), Error);
  }

  TEST_CASE("inverse-square fits") {
    const auto eps = epsilon_grid(0.5);
    std::vector<std::optional<double>> exact, noisy, linear, logd;
    std::mt19937_64 gen(12);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (double e : eps) {
      exact.push_back(7.0 / (e * e));
      noisy.push_back(7.0 / (e * e) * (1.0 + 0.01 * n01(gen)));
      linear.push_back(7.0 / e);
      logd.push_back(std::log(1.0 / e));
    }
    const auto f = fit_inverse_square(eps, exact);
    CHECK(f.coefficient == doctest::Approx(7.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.points == 12);
    const auto g = fit_inverse_square(eps, noisy);
    CHECK(std::abs(g.coefficient - 7.0) <= 0.35);
    CHECK(g.r2 > 0.99);
    const auto h = fit_inverse_square(eps, linear);
    CHECK(h.r2 < 0.95);
    CHECK(h.r2 < g.r2);
    CHECK(fit_inverse_square(eps, logd).r2 < 0.9);
    CHECK_THROWS_AS(fit_inverse_square({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS(fit_inverse_square({0.1, 0.2}, {1.0, 2.0}), Error);
  }

  TEST_CASE("log-linear fit recovers the ratio") {
    std::vector<double> s;
    for (int k = 0; k < 20; ++k) s.push_back(3.0 * std::pow(0.6, k));
    const auto f = log_linear_fit(s, 0, s.size());
    CHECK(f.ratio() == doctest::Approx(0.6));
    CHECK(f.r2 == doctest::Approx(1.0));
  }

  TEST_CASE("geometric_weight constant") {
    const double d = geometric_weight_constant(0.5, 0.6);
    CHECK(d == doctest::Approx(1.0 / (std::exp(1.0) * std::log(1.2))));
    CHECK(d == doctest::Approx(2.0176).epsilon(1e-4));
    const double zmax = -1.0 / std::log(0.5 / 0.6);
    CHECK(zmax * std::pow(0.5 / 0.6, zmax) == doctest::Approx(d).epsilon(1e-12));
    CHECK_THROWS_AS(geometric_weight_constant(0.6, 0.5), Error);
    CHECK_THROWS_AS(geometric_weight_constant(0.5, 1.0), Error);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int trial = 0; trial < 100; ++trial) {
      double c = u(gen), q = u(gen);
      if (c > q) std::swap(c, q);
      if (q - c < 1e-3) continue;
      const double dd = geometric_weight_constant(c, q);
      for (int g = 0; g <= 4000; ++g) {
        const double z = 0.05 * g;
        CHECK(z * std::pow(c, z) <= dd * std::pow(q, z) * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("reference equilibrium of a decoupled game") {
    const GameSpec game = quadratic_game({{0.2}, {0.5, -0.1}}, -1.0, 1.0, 1.0);
    const auto ref = reference_equilibrium(game, game.lower_profile());
    CHECK(ref.x.block(0)[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ref.x.block(1)[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ref.x.block(1)[1] == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(ref.residual <= 1e-10);
  }

  TEST_CASE("reference equilibrium of a two-player capacity game") {
    CapacityConfig cfg;
    cfg.players = 2;
    cfg.eta = {1.0, 1.0};
    cfg.cap = {1.0, 1.0};
    cfg.recourse = false;
    const BuiltGame built = build_capacity(cfg, 1.0);
    const auto ref = reference_equilibrium(built.game, built.game.lower_profile());
    CHECK(ref.x.block(0)[0] == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(ref.x.block(1)[0] == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(ref.residual <= 1e-10);
    CHECK(ref.cross_check_gap >= 0.0);
    CHECK(ref.cross_check_gap <= 1e-8);
  }

  TEST_CASE("portfolio equilibrium agrees across methods") {
    const BuiltGame built = build_portfolio(PortfolioConfig{}, 2.0);
    const auto ref = reference_equilibrium(built.game, built.game.lower_profile());
    CHECK(ref.residual <= 1e-10);
    REQUIRE(ref.cross_check_gap >= 0.0);
    CHECK(ref.cross_check_gap <= 1e-8);
    // Fixed point of the proximal best response is a Nash equilibrium:
    // the projected gradient step leaves it in place.
    for (std::size_t i = 0; i < built.game.size(); ++i) {
      const Vec g = det_grad(built.game, i, ref.x);
      Vec moved(g.size());
      for (std::size_t l = 0; l < g.size(); ++l) moved[l] = ref.x.block(i)[l] - 0.1 * g[l];
      const Vec p = project(built.game.players[i].set, moved);
      for (std::size_t l = 0; l < g.size(); ++l) CHECK(std::abs(p[l] - ref.x.block(i)[l]) <= 1e-9);
    }
  }

  TEST_CASE("capacity equilibrium with recourse reports quadrature error") {
    const BuiltGame built = build_capacity(CapacityConfig{}, 2.0);
    const auto ref = reference_equilibrium(built.game, built.game.lower_profile(), false);
    CHECK(ref.residual <= 1e-10);
    CHECK(ref.quadrature_error <= 1e-10);
    CHECK(built.game.feasible(ref.x));
  }
}

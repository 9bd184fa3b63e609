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
#include "snbr/game.hpp"

using namespace snbr;

TEST_SUITE("game") {
  TEST_CASE("projection clamps coordinatewise") {
    const BoxSet unit({0.0, 0.0}, {1.0, 1.0});
    CHECK(project(unit, Vec{0.5, 0.5}) == Vec{0.5, 0.5});
    CHECK(project(unit, Vec{-2.0, 3.0}) == Vec{0.0, 1.0});
    CHECK(project(BoxSet({0.0}, {0.5}), Vec{0.7}) == Vec{0.5});
    CHECK_THROWS_AS(project(unit, Vec{1.0}), Error);
  }

  TEST_CASE("projection is idempotent and nonexpansive") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> wide(-3.0, 3.0);
    const BoxSet box({-1.0, 0.0, 0.5}, {1.0, 2.0, 0.5});
    for (int trial = 0; trial < 1000; ++trial) {
      Vec u{wide(gen), wide(gen), wide(gen)};
      Vec v{wide(gen), wide(gen), wide(gen)};
      const Vec pu = project(box, u);
      const Vec pv = project(box, v);
      CHECK(project(box, pu) == pu);
      double din = 0.0, dout = 0.0;
      for (int l = 0; l < 3; ++l) {
        din += (u[l] - v[l]) * (u[l] - v[l]);
        dout += (pu[l] - pv[l]) * (pu[l] - pv[l]);
      }
      CHECK(dout <= din);
    }
  }

  TEST_CASE("box diameter") {
    CHECK(diameter(BoxSet(Vec(4, 0.0), Vec(4, 0.5))) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(diameter(BoxSet({0.3, 0.3}, {0.3, 0.3})) == 0.0);
    CHECK(diameter(BoxSet({0.0}, {1.0})) == 1.0);
    CHECK_THROWS_AS(BoxSet({1.0}, {0.0}), Error);
  }

  TEST_CASE("profiles address blocks by offset") {
    Profile x({2, 1, 3}, 0.0);
    CHECK(x.players() == 3);
    CHECK(x.size() == 6);
    x.block(2)[0] = 4.0;
    CHECK(x.flat()[3] == 4.0);
    Profile y = x;
    y.block(0)[1] = 3.0;
    CHECK(distance(x, y) == 3.0);
    CHECK(block_distance(x, y, 0) == 3.0);
    CHECK(block_distance(x, y, 2) == 0.0);
  }

  TEST_CASE("sample streams are keyed and reproducible") {
    SampleStream a(42, {3, StreamTag::kGradient, 1, 7});
    SampleStream b(42, {3, StreamTag::kGradient, 1, 7});
    SampleStream c(42, {3, StreamTag::kGradient, 1, 8});
    SampleStream d(42, {3, StreamTag::kDelay, 1, 7});
    bool differs_c = false, differs_d = false;
    for (int t = 0; t < 64; ++t) {
      const auto va = a.next();
      CHECK(va == b.next());
      differs_c = differs_c || va != c.next();
      differs_d = differs_d || va != d.next();
    }
    CHECK(differs_c);
    CHECK(differs_d);
  }

  TEST_CASE("uniform draws lie in [0,1) and below() in range") {
    SampleStream s(5, {});
    double sum = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
      const double u = s.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    for (int t = 0; t < 1000; ++t) CHECK(s.below(7) < 7);
    CHECK_THROWS_AS(s.below(0), Error);
  }

  TEST_CASE("portfolio gradient at the holdings equals -nu") {
    PortfolioConfig cfg;
    const BuiltGame built = build_portfolio(cfg, 2.0);
    const Profile x0 = built.game.lower_profile();
    for (std::size_t i = 0; i < built.game.size(); ++i) {
      const Vec g = det_grad(built.game, i, x0);
      for (std::size_t l = 0; l < cfg.assets; ++l) CHECK(g[l] == doctest::Approx(-cfg.nu[l]));
    }
  }

  TEST_CASE("portfolio sample with phi frozen at its mean equals det_grad") {
    PortfolioConfig cfg;
    cfg.phi_low = cfg.phi_high = 0.15;
    const BuiltGame built = build_portfolio(cfg, 2.0);
    Profile x(built.game.dims(), 0.2);
    x.block(1)[2] = 0.45;
    SampleStream s(1, {});
    for (std::size_t i = 0; i < built.game.size(); ++i)
      CHECK(sample_stoch_grad(built.game, i, x, s) == det_grad(built.game, i, x));
  }

  TEST_CASE("portfolio samples are unbiased and within the second-moment bound") {
    const BuiltGame built = build_portfolio(PortfolioConfig{}, 2.0);
    const GameSpec& g = built.game;
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> box(0.0, 0.5);
    for (int point = 0; point < 3; ++point) {
      Profile x(g.dims());
      for (double& v : x.flat()) v = box(gen);
      const std::size_t i = static_cast<std::size_t>(point) % g.size();
      const Vec mean = det_grad(g, i, x);
      SampleStream s(9, {static_cast<std::uint64_t>(point), StreamTag::kGradient, i, 0});
      const int n = 100000;
      Vec sum(4, 0.0), sumsq(4, 0.0);
      double norm2 = 0.0, norm4 = 0.0;
      for (int t = 0; t < n; ++t) {
        const Vec v = sample_stoch_grad(g, i, x, s);
        double nn = 0.0;
        for (int l = 0; l < 4; ++l) {
          sum[l] += v[l];
          sumsq[l] += v[l] * v[l];
          nn += v[l] * v[l];
        }
        norm2 += nn;
        norm4 += nn * nn;
      }
      for (int l = 0; l < 4; ++l) {
        const double m = sum[l] / n;
        const double var = sumsq[l] / n - m * m;
        CHECK(std::abs(m - mean[l]) <= 3.0 * std::sqrt(var / n) + 1e-15);
      }
      const double m2 = norm2 / n;
      const double sd = std::sqrt((norm4 / n - m2 * m2) / n);
      CHECK(m2 <= g.players[i].grad_bound * g.players[i].grad_bound + 3.0 * sd);
    }
  }

  TEST_CASE("capacity first-stage gradient matches hand differentiation") {
    CapacityConfig cfg;
    const BuiltGame built = build_capacity(cfg, 1.0);
    const Profile x = testing::make_profile({{0.1}, {0.2}, {0.3}, {0.15}, {0.05}});
    const double total = 0.8;
    SampleStream s(1, {});
    for (std::size_t i = 0; i < 5; ++i) {
      const double xi = x.block(i)[0];
      const double expect = 1.25 * xi - 2.0 + 0.5 * total + 0.5 * xi;
      CHECK(det_grad(built.game, i, x)[0] == doctest::Approx(expect).epsilon(1e-14));
      CHECK(sample_stoch_grad(built.game, i, x, s)[0] == doctest::Approx(expect).epsilon(1e-14));
    }
  }

  TEST_CASE("game validation rejects inconsistent fields") {
    GameSpec g = testing::quadratic_game({{0.5}}, 0.0, 1.0, 1.0);
    CHECK_NOTHROW(g.validate());
    g.mu = 0.0;
    CHECK_THROWS_AS(g.validate(), Error);
    g.mu = 1.0;
    g.players[0].dim = 2;
    CHECK_THROWS_AS(g.validate(), Error);
    GameSpec empty;
    CHECK_THROWS_AS(empty.validate(), Error);
  }
}

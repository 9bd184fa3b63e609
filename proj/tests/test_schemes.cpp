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

#include "doctest.h"
#include "fixtures.hpp"
#include "snbr/builders.hpp"
#include "snbr/error.hpp"
#include "snbr/schemes.hpp"

using namespace snbr;

namespace {

InnerSchedule sync_schedule(const GameSpec& g, double eta) {
  InnerSchedule s;
  s.kind = ScheduleKind::kSynchronous;
  s.eta = eta;
  s.q = q_constants(g);
  s.players = g.size();
  return s;
}

double max_diff(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  REQUIRE(a.x.size() == b.x.size());
  double m = 0.0;
  for (std::size_t k = 0; k < a.x.size(); ++k) m = std::max(m, distance(a.x[k], b.x[k]));
  return m;
}

}  // namespace

TEST_SUITE("schemes") {
  TEST_CASE("decoupled quadratic converges geometrically to the targets") {
    const GameSpec g = testing::quadratic_game({{0.2}, {0.7}}, 0.0, 1.0, 1.0);
    SchemeConfig c;
    c.iterations = 25;
    const auto rec = run_synchronous(g, c, sync_schedule(g, 0.6), 0, g.lower_profile());
    const Profile target = testing::make_profile({{0.2}, {0.7}});
    CHECK(distance(rec.x.back(), target) < 1e-4);
    for (std::size_t k = 5; k + 5 < rec.x.size(); k += 5)
      CHECK(distance(rec.x[k + 5], target) < distance(rec.x[k], target));
  }

  TEST_CASE("zero iterations keep only the start") {
    const GameSpec g = testing::quadratic_game({{0.2}}, 0.0, 1.0, 1.0);
    SchemeConfig c;
    c.iterations = 0;
    const auto rec = run_synchronous(g, c, sync_schedule(g, 0.5), 0, g.lower_profile());
    CHECK(rec.x.size() == 1);
    CHECK(rec.iterations() == 0);
  }

  TEST_CASE("synchronous bookkeeping") {
    const GameSpec g = testing::quadratic_game({{0.2}, {0.4}, {0.9}}, 0.0, 1.0, 1.0, 0.1, 0.2);
    SchemeConfig c;
    c.iterations = 8;
    const InnerSchedule s = sync_schedule(g, 0.7);
    const auto rec = run_synchronous(g, c, s, 2, g.lower_profile());
    for (std::size_t k = 0; k < rec.x.size(); ++k) {
      CHECK(g.feasible(rec.x[k]));
      CHECK(rec.comm_rounds[k] == k);
      for (std::size_t i = 0; i < 3; ++i) CHECK(rec.beta[k][i] == k);
      if (k > 0)
        for (std::size_t i = 0; i < 3; ++i)
          CHECK(rec.sg_cum[k][i] == rec.sg_cum[k - 1][i] + steps_for(s, i, k - 1, 0) - 1);
    }
    const auto again = run_synchronous(g, c, s, 2, g.lower_profile());
    CHECK(max_diff(rec, again) == 0.0);
    const auto other = run_synchronous(g, c, s, 3, g.lower_profile());
    CHECK(max_diff(rec, other) > 0.0);
  }

  TEST_CASE("randomized with p = 1 reproduces the synchronous run") {
    const BuiltGame built = build_portfolio(PortfolioConfig{}, 2.0);
    const GameSpec& g = built.game;
    SchemeConfig sync;
    sync.iterations = 6;
    sync.seed = 77;
    SchemeConfig rnd = sync;
    rnd.kind = SchemeKind::kRandomized;
    rnd.p.assign(g.size(), 1.0);
    const InnerSchedule s = sync_schedule(g, 0.9);
    const auto a = run_synchronous(g, sync, s, 4, g.lower_profile());
    const auto b = run_randomized(g, rnd, s, 4, g.lower_profile());
    CHECK(max_diff(a, b) <= 1e-12);
    CHECK(a.sg_cum == b.sg_cum);
  }

  TEST_CASE("asynchronous with full sets and no delay reproduces the synchronous run") {
    const BuiltGame built = build_portfolio(PortfolioConfig{}, 2.0);
    const GameSpec& g = built.game;
    SchemeConfig sync;
    sync.iterations = 6;
    sync.seed = 5;
    SchemeConfig as = sync;
    as.kind = SchemeKind::kAsynchronous;
    as.b1 = 1;
    as.b2 = 0;
    const InnerSchedule s = sync_schedule(g, 0.9);
    const auto sets = scheme_update_sets(as, g.size());
    for (const auto& set : sets) CHECK(set.size() == g.size());
    const auto a = run_synchronous(g, sync, s, 1, g.lower_profile());
    const auto b = run_asynchronous(g, as, s, sets, 1, g.lower_profile());
    CHECK(max_diff(a, b) <= 1e-12);
  }

  TEST_CASE("Bernoulli activation frequencies") {
    const GameSpec g = testing::quadratic_game({{0.2}, {0.4}}, 0.0, 1.0, 1.0);
    SchemeConfig c;
    c.kind = SchemeKind::kRandomized;
    c.p = {0.5, 0.5};
    c.iterations = 10000;
    InnerSchedule s;
    s.kind = ScheduleKind::kFixed;
    s.count = 1;
    s.q = q_constants(g);
    const auto rec = run_randomized(g, c, s, 0, g.lower_profile());
    const double sd = std::sqrt(0.25 / 10000.0);
    for (std::size_t i = 0; i < 2; ++i) {
      const double freq = static_cast<double>(rec.beta.back()[i]) / 10000.0;
      CHECK(std::abs(freq - 0.5) <= 3.0 * sd);
    }
  }

  TEST_CASE("Poisson clock selects one player with probability proportional to its rate") {
    const GameSpec g = testing::quadratic_game({{0.2}, {0.4}, {0.6}}, 0.0, 1.0, 1.0);
    SchemeConfig c;
    c.kind = SchemeKind::kPoissonClock;
    c.rates = {1.0, 1.0, 2.0};
    c.iterations = 10000;
    InnerSchedule s;
    s.kind = ScheduleKind::kFixed;
    s.q = q_constants(g);
    const auto rec = run_randomized(g, c, s, 0, g.lower_profile());
    for (const auto& u : rec.updated) CHECK(u.size() == 1);
    const Vec expect{0.25, 0.25, 0.5};
    for (std::size_t i = 0; i < 3; ++i) {
      const double freq = static_cast<double>(rec.beta.back()[i]) / 10000.0;
      CHECK(std::abs(freq - expect[i]) <= 3.0 * std::sqrt(expect[i] * (1 - expect[i]) / 10000.0));
    }
  }

  TEST_CASE("cyclic update counters") {
    const GameSpec g = testing::quadratic_game({{0.2}, {0.4}, {0.6}}, 0.0, 1.0, 1.0);
    SchemeConfig c;
    c.kind = SchemeKind::kCyclic;
    c.iterations = 12;
    InnerSchedule s = sync_schedule(g, 0.8);
    s.kind = ScheduleKind::kCyclic;
    const auto sets = scheme_update_sets(c, 3);
    const auto rec = run_asynchronous(g, c, s, sets, 0, g.lower_profile());
    for (std::size_t k = 0; k < 12; ++k) {
      REQUIRE(rec.updated[k] == std::vector<std::size_t>{k % 3});
      CHECK(rec.beta[k + 1][k % 3] == (k + 1 + 2) / 3);
    }
  }

  TEST_CASE("delay buffer clamps at the start of history") {
    const Profile x0 = testing::make_profile({{0.0}, {0.0}, {0.0}});
    DelayBuffer buf(2, x0);
    const Profile x1 = testing::make_profile({{1.0}, {1.0}, {1.0}});
    buf.push(x1);
    CHECK(buf.at_age(2) == x0);
    CHECK(buf.at_age(1) == x0);
    CHECK(buf.at_age(0) == x1);
    const std::vector<std::size_t> tau{0, 2, 0};
    const Profile v = delayed_view(buf, 0, tau);
    CHECK(v.block(1)[0] == 0.0);
    CHECK(v.block(2)[0] == 1.0);
  }

  TEST_CASE("delayed view assembles blocks by age") {
    std::vector<Profile> hist;
    for (int a = 0; a < 4; ++a)
      hist.push_back(testing::make_profile({{10.0 * a}, {10.0 * a + 1}, {10.0 * a + 2}}));
    DelayBuffer buf(2, hist[0]);
    for (int a = 1; a < 4; ++a) buf.push(hist[a]);
    const std::vector<std::size_t> tau{2, 1, 2};
    const Profile v = delayed_view(buf, 1, tau);
    CHECK(v.block(0)[0] == 10.0);  // age 2 -> hist[1]
    CHECK(v.block(1)[0] == 31.0);  // own block is current
    CHECK(v.block(2)[0] == 12.0);
    CHECK_THROWS_AS(delayed_view(buf, 1, std::vector<std::size_t>{3, 0, 0}), Error);
    const std::vector<std::size_t> zero{0, 0, 0};
    CHECK(delayed_view(buf, 0, zero) == hist[3]);
    DelayBuffer fresh(3, hist[0]);
    CHECK(delayed_view(fresh, 2, std::vector<std::size_t>{3, 1, 2}) == hist[0]);
  }

  TEST_CASE("generated update sets respect the B1 window") {
    SchemeConfig c;
    c.kind = SchemeKind::kAsynchronous;
    c.b1 = 3;
    c.update_prob = 0.2;
    c.iterations = 50;
    const auto sets = generate_update_sets(c, 5);
    CHECK_NOTHROW(validate_update_sets(sets, 5, 3));
    CHECK(sets == generate_update_sets(c, 5));
    UpdateSets bad(6, std::vector<std::size_t>{0});
    CHECK_THROWS_AS(validate_update_sets(bad, 2, 3), Error);
    c.update_sets = bad;
    CHECK_THROWS_AS(generate_update_sets(c, 2), Error);
  }

  TEST_CASE("step ceiling aborts with a partial record") {
    const GameSpec g = testing::quadratic_game({{0.2}}, 0.0, 1.0, 1.0);
    SchemeConfig c;
    c.iterations = 30;
    InnerSchedule s = sync_schedule(g, 0.5);
    s.ceiling = 5000;
    const auto rec = run_synchronous(g, c, s, 0, g.lower_profile());
    CHECK(rec.aborted);
    CHECK(rec.iterations() < 30);
    CHECK_FALSE(rec.error.empty());
  }

  TEST_CASE("SG baseline counts one step per player per round") {
    const GameSpec g = testing::quadratic_game({{0.2}, {0.5}}, 0.0, 1.0, 1.0, 0.0, 0.1);
    const auto rec = run_sg_baseline(g, 200, 1.0, 3, 0, g.lower_profile());
    for (std::size_t k = 0; k < rec.x.size(); ++k)
      for (std::uint64_t s : rec.sg_cum[k]) CHECK(s == rec.comm_rounds[k]);
    CHECK(distance(rec.x.back(), testing::make_profile({{0.2}, {0.5}})) < 0.05);
    CHECK_THROWS_AS(run_sg_baseline(g, 10, 0.0, 3, 0, g.lower_profile()), Error);
  }

  TEST_CASE("configuration validation") {
    SchemeConfig c;
    c.kind = SchemeKind::kRandomized;
    c.p = {0.5};
    CHECK_THROWS_AS(c.validate(2), Error);
    c.p = {0.5, 0.0};
    CHECK_THROWS_AS(c.validate(2), Error);
    c.p = {0.5, 1.0};
    CHECK_NOTHROW(c.validate(2));
    c.kind = SchemeKind::kPoissonClock;
    CHECK_THROWS_AS(c.validate(2), Error);
  }
}

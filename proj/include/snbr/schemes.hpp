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

#ifndef SNBR_SCHEMES_HPP_
#define SNBR_SCHEMES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snbr/game.hpp"
#include "snbr/sa.hpp"

namespace snbr {

enum class SchemeKind { kSynchronous, kRandomized, kPoissonClock, kAsynchronous, kCyclic };
enum class DelayMode { kUniform, kFixed };

const char* scheme_kind_name(SchemeKind kind);

using UpdateSets = std::vector<std::vector<std::size_t>>;

struct SchemeConfig {
  SchemeKind kind = SchemeKind::kSynchronous;
  Vec p;      // activation probabilities (kRandomized)
  Vec rates;  // clock rates (kPoissonClock)
  std::size_t b1 = 1;
  std::size_t b2 = 0;
  double update_prob = 0.5;  // inclusion probability for generated I_k
  DelayMode delay = DelayMode::kUniform;
  UpdateSets update_sets;  // explicit I_k; generated when empty
  std::size_t iterations = 40;
  std::size_t trajectories = 50;
  std::uint64_t seed = 1;

  void validate(std::size_t players) const;
  bool operator==(const SchemeConfig&) const = default;
};

// Ring of the most recent b2 + 1 profiles.
class DelayBuffer {
 public:
  DelayBuffer(std::size_t b2, const Profile& x0);

  void push(const Profile& x);
  // Profile of age min(age, k) where k is the number of pushes so far.
  const Profile& at_age(std::size_t age) const;
  std::size_t bound() const { return b2_; }
  std::uint64_t current_k() const { return k_; }

 private:
  std::size_t b2_;
  std::uint64_t k_ = 0;
  std::vector<Profile> ring_;
};

// Block j taken at age tau[j] (clamped to the available history); block i
// at age 0. Throws invalid-argument when a delay exceeds the buffer bound.
Profile delayed_view(const DelayBuffer& buffer, std::size_t i, std::span<const std::size_t> tau);

struct TrajectoryRecord {
  std::vector<Profile> x;                          // x_0 .. x_K
  std::vector<std::vector<std::uint64_t>> beta;    // beta[k][i]
  std::vector<std::vector<std::uint64_t>> sg_cum;  // SG steps taken before x_k
  std::vector<std::uint64_t> comm_rounds;          // communication rounds before x_k
  std::vector<std::vector<std::size_t>> updated;   // players updated at iteration k
  bool aborted = false;
  std::string error;

  std::size_t iterations() const { return x.empty() ? 0 : x.size() - 1; }
};

// Generates I_0 .. I_{K-1} for the asynchronous scheme and repairs it so that
// every B1-window contains each player.
UpdateSets generate_update_sets(const SchemeConfig& config, std::size_t players);
void validate_update_sets(const UpdateSets& sets, std::size_t players, std::size_t b1);

// Dispatches to the recourse-aware solver when the player has recourse.
Vec inner_solve(const GameSpec& game, std::size_t i, const Profile& anchor,
                std::span<const double> start, std::uint64_t steps, SampleStream& stream);

TrajectoryRecord run_synchronous(const GameSpec& game, const SchemeConfig& config,
                                 const InnerSchedule& schedule, std::size_t trajectory,
                                 const Profile& x0);
TrajectoryRecord run_randomized(const GameSpec& game, const SchemeConfig& config,
                                const InnerSchedule& schedule, std::size_t trajectory,
                                const Profile& x0);
TrajectoryRecord run_asynchronous(const GameSpec& game, const SchemeConfig& config,
                                  const InnerSchedule& schedule, const UpdateSets& sets,
                                  std::size_t trajectory, const Profile& x0);
// Runs the scheme selected by config.kind.
TrajectoryRecord run_scheme(const GameSpec& game, const SchemeConfig& config,
                            const InnerSchedule& schedule, const UpdateSets& sets,
                            std::size_t trajectory, const Profile& x0);
// Update sets used by run_scheme for config.kind (empty for non-asynchronous).
UpdateSets scheme_update_sets(const SchemeConfig& config, std::size_t players);

// Delay-free stochastic gradient baseline: one projected step per player
// per communication round with step 1/(modulus (k+1)).
TrajectoryRecord run_sg_baseline(const GameSpec& game, std::size_t rounds, double modulus,
                                 std::uint64_t seed, std::size_t trajectory, const Profile& x0);

}  // namespace snbr

#endif  // SNBR_SCHEMES_HPP_

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

#ifndef SNBR_SA_HPP_
#define SNBR_SA_HPP_

#include <cstdint>
#include <span>

#include "snbr/game.hpp"

namespace snbr {

enum class ScheduleKind {
  kSynchronous,
  kRandomized,
  kAsynchronous,
  kCyclic,
  kPolynomialUnsummable,
  kFixed,
  // j = ceil(eta^-(power * (m + offset))) with m = k, or m = beta when
  // use_beta is set. Covers the fixed experiment protocols.
  kProtocol,
};

const char* schedule_kind_name(ScheduleKind kind);

inline constexpr std::uint64_t kDefaultStepCeiling = 10'000'000;

struct InnerSchedule {
  ScheduleKind kind = ScheduleKind::kSynchronous;
  double eta = 0.5;
  Vec q;                       // Q_i per player
  std::size_t players = 1;     // N, used by kCyclic
  double exponent = 2.0;       // kPolynomialUnsummable
  std::uint64_t count = 1;     // kFixed
  double power = 2.0;          // kProtocol
  double offset = 0.0;         // kProtocol
  bool use_beta = false;       // kProtocol
  std::uint64_t ceiling = kDefaultStepCeiling;

  void validate() const;
};

double q_constant_smooth(double grad_bound, double mu, double diam);
double q_constant_recourse(double ms, double mc, double grad_bound, double mu, double diam);
// Q_i for every player; the recourse form is used when a player has one.
Vec q_constants(const GameSpec& game);

// Inner steps for player i at major iteration k with update count beta.
// Throws step-ceiling when the count exceeds schedule.ceiling.
std::uint64_t steps_for(const InnerSchedule& schedule, std::size_t i, std::uint64_t k,
                        std::uint64_t beta);
// Accuracy alpha_{i,k}; for the non-geometric variants this is the value
// sqrt(Q_i / j) implied by the inner error bound.
double accuracy_for(const InnerSchedule& schedule, std::size_t i, std::uint64_t k,
                    std::uint64_t beta);

// Projected stochastic approximation on the proximal subproblem of player i.
// Block i of `anchor` is the proximal centre; the other blocks fix the
// rivals. Performs steps - 1 updates from `start`.
Vec sa_solve(const GameSpec& game, std::size_t i, const Profile& anchor,
             std::span<const double> start, std::uint64_t steps, SampleStream& stream);

}  // namespace snbr

#endif  // SNBR_SA_HPP_

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

// Experiment configuration: YAML schema, validation and serialization.

#ifndef SNBR_CONFIG_HPP_
#define SNBR_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "snbr/builders.hpp"
#include "snbr/sa.hpp"
#include "snbr/schemes.hpp"

namespace snbr {

enum class GameKind { kPortfolio, kCapacity };
// Norm whose value is raised to kappa / 2 to form eta.
enum class EtaNorm { kTwo, kInf, kSpectral };

const char* game_kind_name(GameKind kind);

struct GameConfig {
  GameKind kind = GameKind::kPortfolio;
  double mu = 2.0;
  PortfolioConfig portfolio;
  CapacityConfig capacity;

  bool operator==(const GameConfig&) const = default;
};

struct InnerConfig {
  ScheduleKind schedule = ScheduleKind::kSynchronous;
  std::optional<double> eta;    // explicit base
  std::optional<double> kappa;  // eta = norm^{kappa / 2}
  EtaNorm eta_norm = EtaNorm::kTwo;
  double exponent = 2.0;
  std::uint64_t count = 1;
  double power = 2.0;
  double offset = 0.0;
  bool use_beta = false;
  std::uint64_t ceiling = kDefaultStepCeiling;

  bool operator==(const InnerConfig&) const = default;
};

struct RunConfig {
  std::size_t trajectories = 50;
  std::uint64_t seed = 1;
  double eps_stop = 2.5e-3;
  std::size_t eps_points = 12;
  bool bound_audit = true;
  bool write_trajectories = true;
  // Communication rounds of the SG baseline; 0 matches the per-player SG
  // steps of the synchronous run.
  std::size_t sg_rounds = 0;

  bool operator==(const RunConfig&) const = default;
};

struct ExperimentConfig {
  GameConfig game;
  SchemeConfig scheme;
  InnerConfig inner;
  RunConfig run;

  bool operator==(const ExperimentConfig&) const = default;
  // Cross-field checks; throws invalid-argument.
  void validate() const;
};

// Throws Error(kParse) on malformed YAML, unknown keys or wrong types.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

}  // namespace snbr

#endif  // SNBR_CONFIG_HPP_

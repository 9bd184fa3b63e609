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

// Builders for the portfolio and two-stage capacity example games.

#ifndef SNBR_BUILDERS_HPP_
#define SNBR_BUILDERS_HPP_

#include <string>
#include <vector>

#include "snbr/contraction.hpp"
#include "snbr/game.hpp"

namespace snbr {

struct PortfolioConfig {
  std::size_t players = 6;
  std::size_t assets = 4;
  Vec nu{0.5, 0.35, 0.4, 0.3};
  Vec risk_diag{0.16, 0.1, 0.12, 0.09};  // diagonal of R
  double phi_low = 0.12;
  double phi_high = 0.18;
  Vec rho;  // empty: rho_i = 3 + i / N
  double cap = 0.5;
  double holdings = 0.0;  // x^0_{ij}

  bool operator==(const PortfolioConfig&) const = default;
};

struct CapacityConfig {
  std::size_t players = 5;
  double a = 2.0;
  double b = 0.5;
  Vec cap;  // empty: 0.3 + 0.1 sqrt(i)
  Vec eta;  // empty: (N - 2.5) b
  double d_low = 0.3;
  double d_high = 0.4;
  double h_low = 0.45;
  double h_high = 0.55;
  bool recourse = true;

  bool operator==(const CapacityConfig&) const = default;
};

struct BuiltGame {
  GameSpec game;
  CurvatureBounds curvature;
  // Sufficient contraction condition of the builder (warning only).
  bool condition_ok = true;
  std::vector<std::string> warnings;
};

Vec portfolio_rho(const PortfolioConfig& cfg);
Vec capacity_caps(const CapacityConfig& cfg);
Vec capacity_eta(const CapacityConfig& cfg);

BuiltGame build_portfolio(const PortfolioConfig& cfg, double mu);
BuiltGame build_capacity(const CapacityConfig& cfg, double mu);

}  // namespace snbr

#endif  // SNBR_BUILDERS_HPP_

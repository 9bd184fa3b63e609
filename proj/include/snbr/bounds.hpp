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

// Closed-form error envelopes and iteration-complexity bounds.
//
// Every function checks its inputs against the hypotheses of the bound it
// evaluates and reports the intermediate constants alongside the value.

#ifndef SNBR_BOUNDS_HPP_
#define SNBR_BOUNDS_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "snbr/game.hpp"

namespace snbr {

struct BoundInputs {
  double a = 0.0;      // ||Gamma||_2
  double a_inf = 0.0;  // ||Gamma||_inf
  double eta = 0.5;
  double mu = 1.0;
  std::size_t players = 1;
  double c0 = 0.0;  // C: bound on the initial blockwise error
  std::size_t b1 = 1;
  std::size_t b2 = 0;
  Vec p;        // activation probabilities
  Vec q_const;  // Q_i
  double delta = 0.5;       // exponent slack of the delta recipes
  double confidence = 0.1;  // probability level of the eps-P-delta bound
  std::optional<double> q;  // geometric ratio; default (c + 1) / 2

  void validate() const;
};

struct BoundValue {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> constants;
};

// scale * q^k
struct Envelope {
  double scale = 0.0;
  double q = 0.0;
  std::map<std::string, double> constants;
  double at(std::size_t k) const;
};

struct RandomizedConstants {
  double p_min = 0.0;
  double p_max = 0.0;
  double a_tilde = 0.0;
  double eta_tilde = 0.0;
  double eta0_tilde = 0.0;
  double c_tilde = 0.0;
  double big_c_tilde = 0.0;  // C (sum_i 1/(N p_i))^{1/2}
};

struct AsyncEnvelope {
  double c0 = 0.0;
  double rho = 0.0;
  std::size_t n0 = 0;
  std::size_t b1 = 1;
  Envelope second;  // rho^{-(B1-1)/B1} (C + D) q^k
  double first(std::size_t k) const;  // (C + k) rho^{floor(k / B1)}
};

// q = override or (c + 1) / 2, validated to lie in (c, 1).
double select_q(double c, const std::optional<double>& q);

Envelope sync_envelope(const BoundInputs& in);
RandomizedConstants randomized_constants(const BoundInputs& in);
// Bound on u_k: (N p_max)^{1/2} (C~ + D~) q~^k.
Envelope randomized_envelope(const BoundInputs& in);
AsyncEnvelope async_envelope(const BoundInputs& in);

// Per-player iteration-complexity bounds for an eps-NE (player index i).
BoundValue sync_complexity(const BoundInputs& in, std::size_t i, double eps);
BoundValue sync_complexity_delta(const BoundInputs& in, std::size_t i, double eps);
BoundValue sync_complexity_fixed_eta(const BoundInputs& in, std::size_t i, double eps);
BoundValue probabilistic_complexity(const BoundInputs& in, std::size_t i, double eps);
BoundValue randomized_complexity(const BoundInputs& in, std::size_t i, double eps);
BoundValue randomized_complexity_delta(const BoundInputs& in, std::size_t i, double eps);
BoundValue async_complexity(const BoundInputs& in, std::size_t i, double eps);
BoundValue async_complexity_delta(const BoundInputs& in, std::size_t i, double eps);
BoundValue cyclic_complexity(const BoundInputs& in, std::size_t i, double eps);
BoundValue cyclic_complexity_delta(const BoundInputs& in, std::size_t i, double eps);

struct DominanceRow {
  std::size_t k = 0;
  double empirical = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool dominated = true;
};

// Row k is dominated when empirical - sigmas * se <= bound(k).
std::vector<DominanceRow> dominance_report(const std::vector<double>& empirical,
                                           const std::vector<double>& se,
                                           const std::function<double(std::size_t)>& bound,
                                           double sigmas = 3.0);

nlohmann::json to_json(const BoundValue& b);
nlohmann::json to_json(const Envelope& e);
nlohmann::json to_json(const std::vector<DominanceRow>& rows);

}  // namespace snbr

#endif  // SNBR_BOUNDS_HPP_

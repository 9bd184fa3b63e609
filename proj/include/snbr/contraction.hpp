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

#ifndef SNBR_CONTRACTION_HPP_
#define SNBR_CONTRACTION_HPP_

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "snbr/game.hpp"

namespace snbr {

using Matrix = std::vector<Vec>;

struct CurvatureBounds {
  Vec zeta_min;
  Matrix zeta_offmax;  // N x N, zero diagonal

  std::size_t size() const { return zeta_min.size(); }
  void validate() const;
};

struct ContractionReport {
  Matrix gamma;
  double a2 = 0.0;
  double a_inf = 0.0;
  double rho = 0.0;
  bool ok_2norm = false;
  bool ok_infnorm = false;
  bool ok_diag_dom = false;
  // Set when a norm lies within the tie tolerance of 1.
  bool near_one = false;
  int power_iterations_2norm = 0;
  int power_iterations_rho = 0;
};

Matrix build_gamma(const CurvatureBounds& bounds, double mu);

double norm_inf(const Matrix& m);
// Power iteration on M^T M with Collatz-Wielandt stopping, tolerance 1e-12.
double norm_2(const Matrix& m);
// Perron root of a nonnegative matrix by power iteration, tolerance 1e-12.
double spectral_radius(const Matrix& m);

// Fills the assumption flags of `report` from its norms and `bounds`.
void check_assumptions(ContractionReport& report, const CurvatureBounds& bounds);

ContractionReport contraction_report(const CurvatureBounds& bounds, double mu);

// Heuristic curvature estimate from finite-difference Hessians of the
// deterministic gradients at `samples` random feasible profiles. Not certified.
CurvatureBounds estimate_curvature(const GameSpec& game, std::size_t samples, std::uint64_t seed);

nlohmann::json to_json(const ContractionReport& report);

}  // namespace snbr

#endif  // SNBR_CONTRACTION_HPP_

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

// Small dense LP and convex QP solvers.
//
// Both solvers target problems with a handful of variables and constraints.
// The simplex method works on a dense tableau and uses Bland's rule
// throughout, so the pivot sequence is a deterministic function of the input.

#ifndef SNBR_SUBSOLVERS_HPP_
#define SNBR_SUBSOLVERS_HPP_

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace snbr {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

const char* solve_status_name(SolveStatus status);

// min c^T x  s.t.  A x = b, x >= 0.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

enum class Sense { kMin, kMax };

// kMin: min 1/2 z^T H z + d^T z.  kMax: max d^T z - 1/2 z^T H z.
// Subject to G z <= g and, optionally, A_eq z = b_eq. H must be PSD.
struct QuadraticProgram {
  Eigen::MatrixXd H;
  Eigen::VectorXd d;
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Sense sense = Sense::kMin;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kIterLimit;
  Eigen::VectorXd primal;
  // LP: multipliers y of A x = b (A^T y <= c at optimum).
  // QP: multipliers of G z <= g (nonnegative at optimum).
  Eigen::VectorXd dual;
  // QP only: multipliers of A_eq z = b_eq.
  Eigen::VectorXd dual_eq;
  double objective = 0.0;
  int iterations = 0;
  // (leaving row, entering column) for every simplex pivot.
  std::vector<std::pair<int, int>> pivots;
};

inline constexpr double kLpTolerance = 1e-9;
inline constexpr double kQpTolerance = 1e-8;

SolveOutcome simplex_solve(const LinearProgram& lp, int max_pivots = 100000);

SolveOutcome qp_active_set(const QuadraticProgram& qp, int max_changes = 10000);

struct ScalarQpResult {
  double q;
  double value;
};

// max_{0 <= q <= x} d q - (h/2) q^2.
ScalarQpResult scalar_box_qp(double d, double h, double x);

}  // namespace snbr

#endif  // SNBR_SUBSOLVERS_HPP_

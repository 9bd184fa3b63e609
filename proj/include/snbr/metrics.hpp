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

// Reference equilibria, empirical error series and iteration-complexity
// measurements.

#ifndef SNBR_METRICS_HPP_
#define SNBR_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "snbr/game.hpp"
#include "snbr/schemes.hpp"

namespace snbr {

struct ReferenceEquilibrium {
  Profile x;
  std::string method;
  // ||x - xhat(x)|| for the exact proximal best-response map.
  double residual = 0.0;
  // Distance to the stacked projected-gradient solution (negative when the
  // cross-check was not applicable).
  double cross_check_gap = -1.0;
  // |64-node - 128-node| recourse gradient difference at x (0 without recourse).
  double quadrature_error = 0.0;
  int iterations = 0;
};

// Deterministic gradient of player i including first-stage cost and the
// expected recourse subgradient, by Gauss-Legendre quadrature.
Vec expected_gradient(const GameSpec& game, std::size_t i, const Profile& x, int nodes = 64);

// Exact proximal best response of player i at anchor y, by projected gradient.
Vec exact_best_response(const GameSpec& game, std::size_t i, const Profile& y,
                        double tol = 1e-12, int nodes = 64);
Profile best_response_map(const GameSpec& game, const Profile& y, double tol = 1e-12,
                          int nodes = 64);

struct StackedGradientResult {
  Profile x;
  bool applicable = false;
  double modulus = 0.0;    // lambda_min of the symmetrized Jacobian
  double lipschitz = 0.0;  // largest singular value of the Jacobian
  int iterations = 0;
};

// Projected gradient on the stacked game map with step m / L^2, where m and L
// come from a central-difference Jacobian at the box midpoint.
StackedGradientResult stacked_projected_gradient(const GameSpec& game, const Profile& x0,
                                                 double tol = 1e-13, int max_iter = 1000000,
                                                 int nodes = 64);

ReferenceEquilibrium reference_equilibrium(const GameSpec& game, const Profile& x0,
                                           bool cross_check = true);

struct RunMetrics {
  std::vector<double> u;         // mean stacked error
  std::vector<double> u_se;      // its standard error
  std::vector<double> inf;       // max_i mean blockwise error
  std::vector<double> inf_se;    // standard error of the maximizing block
  std::vector<double> variance;  // mean squared distance to the sample mean
  std::vector<std::vector<double>> block_mean;  // [k][i]
  std::vector<std::vector<double>> sg_mean;     // [k][i] mean cumulative SG steps
  std::vector<double> comm_rounds;              // mean communication rounds
  std::size_t trajectories = 0;

  std::size_t size() const { return u.size(); }
  // Max over players of the mean cumulative SG count at k.
  double sg_max(std::size_t k) const;
};

std::vector<double> compute_u_k(const std::vector<TrajectoryRecord>& records, const Profile& xstar);
std::vector<double> compute_inf_metric(const std::vector<TrajectoryRecord>& records,
                                       const Profile& xstar);
std::vector<double> compute_variance(const std::vector<TrajectoryRecord>& records);
// Aggregates over the common prefix of all records.
RunMetrics compute_metrics(const std::vector<TrajectoryRecord>& records, const Profile& xstar);

// Geometric grid from u0 / 2 down to eps_min.
std::vector<double> epsilon_grid(double u0, double eps_min = 2.5e-3, std::size_t points = 12);

// First count at which u_k < eps, per grid point.
std::vector<std::optional<double>> k_of_epsilon(const std::vector<double>& u,
                                                const std::vector<double>& counts,
                                                const std::vector<double>& eps);
std::vector<double> sg_max_series(const RunMetrics& metrics);

struct InverseSquareFit {
  double coefficient = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// Least squares K = coefficient / eps^2 + intercept over the defined entries.
InverseSquareFit fit_inverse_square(const std::vector<double>& eps,
                                    const std::vector<std::optional<double>>& k);

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double ratio() const;
};

// Least squares of log(series[k]) on k over [begin, end).
LogLinearFit log_linear_fit(const std::vector<double>& series, std::size_t begin, std::size_t end);

// D = 1 / (e ln(q / c)), the smallest D with z c^z <= D q^z for all z >= 0.
double geometric_weight_constant(double c, double q);

}  // namespace snbr

#endif  // SNBR_METRICS_HPP_

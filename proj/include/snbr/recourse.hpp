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

// Two-stage recourse: scenario values, dual-based subgradients and the
// recourse-aware inner solver.

#ifndef SNBR_RECOURSE_HPP_
#define SNBR_RECOURSE_HPP_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "snbr/game.hpp"
#include "snbr/subsolvers.hpp"

namespace snbr {

enum class RecourseKind { kLinear, kQuadratic, kCapacity };

// Data of one second-stage scenario:
//   min d^T q + 1/2 q^T H q  s.t.  T x + W q = h, q >= 0.
// H is empty for linear recourse.
struct ScenarioData {
  Eigen::VectorXd d;
  Eigen::MatrixXd T;
  Eigen::VectorXd h;
  Eigen::MatrixXd W;
  Eigen::MatrixXd H;
};

struct UniformFactor {
  double lo = 0.0;
  double hi = 1.0;
};

struct RecourseProblem {
  RecourseKind kind = RecourseKind::kLinear;
  std::size_t dim = 1;  // first-stage dimension
  // omega has one independent uniform component per factor.
  std::vector<UniformFactor> support;
  // Scenario data for kLinear / kQuadratic.
  std::function<ScenarioData(std::span<const double> omega)> scenario;
  double ms = 0.0;  // bound on the recourse subgradient
  double mc = 0.0;  // bound on the first-stage cost gradient
  // Optional first-stage cost gradient added to the inner direction.
  std::function<void(std::span<const double> x, std::span<double> out)> cost_grad;

  std::size_t sample_dim() const { return support.size(); }
  // Maps uniforms on [0,1) to a scenario omega on the support.
  void map_sample(std::span<const double> u, std::span<double> omega) const;
};

// Capacity second stage max_{0<=q<=x} d q - (h/2) q^2 with
// omega = (d, h) ~ U[d_lo, d_hi] x U[h_lo, h_hi].
std::shared_ptr<RecourseProblem> make_capacity_recourse(double d_lo, double d_hi, double h_lo,
                                                        double h_hi);

double recourse_value(const RecourseProblem& problem, std::span<const double> x,
                      std::span<const double> omega);
Vec recourse_subgradient(const RecourseProblem& problem, std::span<const double> x,
                         std::span<const double> omega);

// max (h - T x)^T pi - 1/2 u^T H u  s.t.  W^T pi - H u <= d, over (u, pi).
QuadraticProgram dorn_dual(const ScenarioData& data, std::span<const double> x);
// min (h/2) u^2 + x v  s.t.  h u + v >= d, v >= 0, over (u, v).
QuadraticProgram capacity_dual(double d, double h, double x);

// Expectation of the recourse subgradient / value by tensor Gauss-Legendre
// quadrature over the uniform support. `nodes` is 64 or 128.
Vec expected_subgradient(const RecourseProblem& problem, std::span<const double> x,
                         int nodes = 64);
double expected_value(const RecourseProblem& problem, std::span<const double> x, int nodes = 64);

// Projected SA whose direction adds the first-stage cost gradient and one
// fresh recourse subgradient sample per step.
Vec sa_solve_recourse(const GameSpec& game, std::size_t i, const Profile& anchor,
                      std::span<const double> start, std::uint64_t steps, SampleStream& stream);

}  // namespace snbr

#endif  // SNBR_RECOURSE_HPP_

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

#ifndef SNBR_EXPERIMENT_HPP_
#define SNBR_EXPERIMENT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "snbr/bounds.hpp"
#include "snbr/builders.hpp"
#include "snbr/config.hpp"
#include "snbr/contraction.hpp"
#include "snbr/metrics.hpp"
#include "snbr/schemes.hpp"

namespace snbr {

struct Experiment {
  ExperimentConfig config;
  BuiltGame built;
  ContractionReport contraction;
  SchemeConfig scheme;  // p, rates, seed and trajectories resolved
  InnerSchedule schedule;
  UpdateSets update_sets;
  bool preflight_ok = false;
  std::string preflight_message;

  const GameSpec& game() const { return built.game; }
};

Experiment prepare_experiment(const ExperimentConfig& config);
nlohmann::json preflight_json(const Experiment& experiment);

// Norm of Gamma selected by the config's eta_norm.
double selected_norm(const ContractionReport& report, EtaNorm norm);

BoundInputs bound_inputs(const Experiment& experiment, const Profile& x0, const Profile& xstar);

struct ExperimentResult {
  ReferenceEquilibrium reference;
  Profile x0;
  std::vector<TrajectoryRecord> records;
  RunMetrics metrics;
  std::vector<double> eps;
  std::vector<std::optional<double>> k_of_eps;   // major iterations
  std::vector<std::optional<double>> sg_of_eps;  // max mean per-player SG steps
  nlohmann::json bounds;
};

// Throws Error(kPreflight) when the preflight fails and `force` is unset.
ExperimentResult run_experiment(const Experiment& experiment, bool force = false);

nlohmann::json bound_audit(const Experiment& experiment, const ExperimentResult& result);
// Envelope over the configured horizon and complexity bounds on the default
// grid, from the reference equilibrium alone.
nlohmann::json theoretical_bounds(const Experiment& experiment);
nlohmann::json manifest_json(const Experiment& experiment, const ExperimentResult& result);

std::string metrics_csv(const ExperimentResult& result);
std::string k_of_eps_csv(const ExperimentResult& result);
std::string trajectory_csv(const TrajectoryRecord& record, const Profile& xstar);

// Writes preflight.json, metrics.csv, k_of_eps.csv, bounds.json, manifest.json
// and, when enabled, trajectories/traj_NNNN.csv under `dir`.
void write_outputs(const Experiment& experiment, const ExperimentResult& result,
                   const std::string& dir);

struct Comparison {
  RunMetrics synchronous;
  RunMetrics baseline;
  double baseline_modulus = 0.0;
  std::size_t rounds = 0;
  bool sync_rounds_equal_iterations = true;
  bool baseline_rounds_equal_steps = true;
};

Comparison compare_with_sg(const Experiment& experiment, const ExperimentResult& sync);
nlohmann::json to_json(const Comparison& comparison);

struct CsvFit {
  std::string source;
  InverseSquareFit inverse_square;
  std::optional<LogLinearFit> log_linear;
};

// Accepts metrics.csv (log-linear fit of u_k plus inverse-square fit of K(eps)
// over the default grid) or k_of_eps.csv (inverse-square fit only).
CsvFit fit_csv(const std::string& path);
nlohmann::json to_json(const CsvFit& fit);

std::string format_double(double v);

}  // namespace snbr

#endif  // SNBR_EXPERIMENT_HPP_

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

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "snbr/snbr.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPreflight = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::string out = "out";
  std::string in;
  bool force = false;
};

int exit_code(snbr_status status) {
  switch (status) {
    case SNBR_OK: return kExitOk;
    case SNBR_E_PARSE: return kExitUsage;
    case SNBR_E_PREFLIGHT: return kExitPreflight;
    default: return kExitRuntime;
  }
}

int report(snbr_status status) {
  if (status != SNBR_OK)
    std::fprintf(stderr, "snbr: %s: %s\n", snbr_status_name(status), snbr_last_error());
  return exit_code(status);
}

void emit(char* text) {
  std::fputs(text, stdout);
  std::fputc('\n', stdout);
  snbr_string_free(text);
}

class Session {
 public:
  ~Session() {
    snbr_game_free(game_);
    snbr_config_free(config_);
  }

  snbr_status open(const Options& opt) {
    snbr_status s = snbr_config_load(opt.config.c_str(), &config_);
    if (s != SNBR_OK) return s;
    if (opt.seed && (s = snbr_config_set_seed(config_, *opt.seed)) != SNBR_OK) return s;
    if (opt.trajectories &&
        (s = snbr_config_set_trajectories(config_, *opt.trajectories)) != SNBR_OK)
      return s;
    return snbr_game_create(config_, &game_);
  }

  const snbr_game* game() const { return game_; }

 private:
  snbr_config* config_ = nullptr;
  snbr_game* game_ = nullptr;
};

int cmd_preflight(const Options& opt) {
  Session session;
  if (snbr_status s = session.open(opt); s != SNBR_OK) return report(s);
  char* json = nullptr;
  int ok = 0;
  if (snbr_status s = snbr_preflight(session.game(), &json, &ok); s != SNBR_OK) return report(s);
  emit(json);
  return ok ? kExitOk : kExitPreflight;
}

int cmd_run(const Options& opt) {
  Session session;
  if (snbr_status s = session.open(opt); s != SNBR_OK) return report(s);
  char* json = nullptr;
  snbr_status s = snbr_run(session.game(), opt.out.c_str(), opt.force ? 1 : 0, &json);
  if (s != SNBR_OK) return report(s);
  emit(json);
  return kExitOk;
}

int cmd_bounds(const Options& opt) {
  Session session;
  if (snbr_status s = session.open(opt); s != SNBR_OK) return report(s);
  char* json = nullptr;
  if (snbr_status s = snbr_bounds(session.game(), &json); s != SNBR_OK) return report(s);
  emit(json);
  return kExitOk;
}

int cmd_compare(const Options& opt) {
  Session session;
  if (snbr_status s = session.open(opt); s != SNBR_OK) return report(s);
  char* json = nullptr;
  snbr_status s = snbr_compare(session.game(), opt.force ? 1 : 0, &json);
  if (s != SNBR_OK) return report(s);
  emit(json);
  return kExitOk;
}

int cmd_fit(const Options& opt) {
  char* json = nullptr;
  if (snbr_status s = snbr_fit(opt.in.c_str(), &json); s != SNBR_OK) return report(s);
  emit(json);
  return kExitOk;
}

void add_experiment_flags(CLI::App* cmd, Options& opt, bool with_out) {
  cmd->add_option("--config", opt.config, "experiment configuration (YAML)")->required();
  cmd->add_option("--seed", opt.seed, "master seed override");
  cmd->add_option("--trajectories", opt.trajectories, "trajectory count override");
  cmd->add_flag("--force", opt.force, "run even when the contraction preflight fails");
  if (with_out) cmd->add_option("--out", opt.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inexact proximal best-response solvers for stochastic Nash games"};
  app.set_version_flag("--version", snbr_version());
  app.require_subcommand(1);
  Options opt;

  auto* preflight = app.add_subcommand("preflight", "contraction report as JSON");
  add_experiment_flags(preflight, opt, false);
  auto* run = app.add_subcommand("run", "run all trajectories and write artifacts");
  add_experiment_flags(run, opt, true);
  auto* bounds = app.add_subcommand("bounds", "theoretical envelopes and complexity bounds");
  add_experiment_flags(bounds, opt, false);
  auto* compare = app.add_subcommand("compare", "synchronous scheme versus the SG baseline");
  add_experiment_flags(compare, opt, false);
  auto* fit = app.add_subcommand("fit", "fit a metrics.csv or k_of_eps.csv table");
  fit->add_option("--in", opt.in, "input CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (preflight->parsed()) return cmd_preflight(opt);
  if (run->parsed()) return cmd_run(opt);
  if (bounds->parsed()) return cmd_bounds(opt);
  if (compare->parsed()) return cmd_compare(opt);
  if (fit->parsed()) return cmd_fit(opt);
  std::cerr << app.help();
  return kExitUsage;
}

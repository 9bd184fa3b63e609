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

#include "snbr/snbr.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "snbr/config.hpp"
#include "snbr/error.hpp"
#include "snbr/experiment.hpp"

struct snbr_config {
  snbr::ExperimentConfig value;
};

struct snbr_game {
  snbr::Experiment value;
};

namespace {

thread_local std::string g_last_error;

snbr_status map_code(snbr::ErrorCode code) {
  switch (code) {
    case snbr::ErrorCode::kInvalidArgument: return SNBR_E_INVALID_ARGUMENT;
    case snbr::ErrorCode::kNumericFailure: return SNBR_E_NUMERIC;
    case snbr::ErrorCode::kStepCeiling: return SNBR_E_STEP_CEILING;
    case snbr::ErrorCode::kInfeasible: return SNBR_E_INFEASIBLE;
    case snbr::ErrorCode::kUnbounded: return SNBR_E_UNBOUNDED;
    case snbr::ErrorCode::kIterLimit: return SNBR_E_ITER_LIMIT;
    case snbr::ErrorCode::kPreflight: return SNBR_E_PREFLIGHT;
    case snbr::ErrorCode::kParse: return SNBR_E_PARSE;
    case snbr::ErrorCode::kIo: return SNBR_E_IO;
  }
  return SNBR_E_INTERNAL;
}

template <typename F>
snbr_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SNBR_OK;
  } catch (const snbr::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SNBR_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SNBR_E_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require_ptr(const void* p, const char* name) {
  if (!p) snbr::throw_invalid(std::string(name) + " must not be null");
}

}  // namespace

extern "C" {

const char* snbr_version(void) { return SNBR_VERSION; }

const char* snbr_status_name(snbr_status status) {
  switch (status) {
    case SNBR_OK: return "ok";
    case SNBR_E_INVALID_ARGUMENT: return "invalid-argument";
    case SNBR_E_NUMERIC: return "numeric-failure";
    case SNBR_E_STEP_CEILING: return "step-ceiling";
    case SNBR_E_INFEASIBLE: return "infeasible";
    case SNBR_E_UNBOUNDED: return "unbounded";
    case SNBR_E_ITER_LIMIT: return "iteration-limit";
    case SNBR_E_PREFLIGHT: return "preflight-failure";
    case SNBR_E_PARSE: return "parse-error";
    case SNBR_E_IO: return "io-error";
    case SNBR_E_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* snbr_last_error(void) { return g_last_error.c_str(); }

void snbr_string_free(char* s) { std::free(s); }

snbr_status snbr_config_parse(const char* yaml, snbr_config** out) {
  return guarded([&] {
    require_ptr(yaml, "yaml");
    require_ptr(out, "out");
    *out = new snbr_config{snbr::parse_config(yaml)};
  });
}

snbr_status snbr_config_load(const char* path, snbr_config** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = new snbr_config{snbr::load_config(path)};
  });
}

snbr_status snbr_config_set_seed(snbr_config* config, uint64_t seed) {
  return guarded([&] {
    require_ptr(config, "config");
    config->value.run.seed = seed;
  });
}

snbr_status snbr_config_set_trajectories(snbr_config* config, size_t trajectories) {
  return guarded([&] {
    require_ptr(config, "config");
    if (trajectories < 1) snbr::throw_invalid("trajectories must be at least 1");
    config->value.run.trajectories = trajectories;
  });
}

snbr_status snbr_config_serialize(const snbr_config* config, char** yaml) {
  return guarded([&] {
    require_ptr(config, "config");
    require_ptr(yaml, "yaml");
    *yaml = dup_string(snbr::serialize_config(config->value));
  });
}

void snbr_config_free(snbr_config* config) { delete config; }

snbr_status snbr_game_create(const snbr_config* config, snbr_game** out) {
  return guarded([&] {
    require_ptr(config, "config");
    require_ptr(out, "out");
    *out = new snbr_game{snbr::prepare_experiment(config->value)};
  });
}

void snbr_game_free(snbr_game* game) { delete game; }

snbr_status snbr_preflight(const snbr_game* game, char** json, int* ok) {
  return guarded([&] {
    require_ptr(game, "game");
    require_ptr(json, "json");
    *json = dup_string(snbr::preflight_json(game->value).dump(2));
    if (ok) *ok = game->value.preflight_ok ? 1 : 0;
  });
}

snbr_status snbr_run(const snbr_game* game, const char* out_dir, int force, char** summary_json) {
  return guarded([&] {
    require_ptr(game, "game");
    require_ptr(out_dir, "out_dir");
    const auto result = snbr::run_experiment(game->value, force != 0);
    snbr::write_outputs(game->value, result, out_dir);
    if (summary_json) {
      nlohmann::json s;
      s["out"] = out_dir;
      s["trajectories"] = result.records.size();
      s["iterations"] = result.metrics.size() == 0 ? 0 : result.metrics.size() - 1;
      if (result.metrics.size() > 0) {
        s["final_u"] = result.metrics.u.back();
        s["final_inf_metric"] = result.metrics.inf.back();
        s["sg_steps_per_player"] = result.metrics.sg_max(result.metrics.size() - 1);
      }
      std::size_t aborted = 0;
      for (const auto& r : result.records) aborted += r.aborted ? 1 : 0;
      s["aborted_trajectories"] = aborted;
      if (result.bounds.contains("all_dominated")) s["all_dominated"] = result.bounds["all_dominated"];
      *summary_json = dup_string(s.dump(2));
    }
  });
}

snbr_status snbr_bounds(const snbr_game* game, char** json) {
  return guarded([&] {
    require_ptr(game, "game");
    require_ptr(json, "json");
    *json = dup_string(snbr::theoretical_bounds(game->value).dump(2));
  });
}

snbr_status snbr_compare(const snbr_game* game, int force, char** json) {
  return guarded([&] {
    require_ptr(game, "game");
    require_ptr(json, "json");
    if (game->value.scheme.kind != snbr::SchemeKind::kSynchronous)
      snbr::throw_invalid("compare needs a synchronous scheme configuration");
    const auto sync = snbr::run_experiment(game->value, force != 0);
    const auto cmp = snbr::compare_with_sg(game->value, sync);
    *json = dup_string(snbr::to_json(cmp).dump(2));
  });
}

snbr_status snbr_fit(const char* csv_path, char** json) {
  return guarded([&] {
    require_ptr(csv_path, "csv_path");
    require_ptr(json, "json");
    *json = dup_string(snbr::to_json(snbr::fit_csv(csv_path)).dump(2));
  });
}

}  // extern "C"

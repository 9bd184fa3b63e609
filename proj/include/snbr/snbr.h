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

#ifndef SNBR_SNBR_H_
#define SNBR_SNBR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SNBR_BUILDING_LIBRARY)
#define SNBR_API __attribute__((visibility("default")))
#else
#define SNBR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum snbr_status {
  SNBR_OK = 0,
  SNBR_E_INVALID_ARGUMENT = 1,
  SNBR_E_NUMERIC = 2,
  SNBR_E_STEP_CEILING = 3,
  SNBR_E_INFEASIBLE = 4,
  SNBR_E_UNBOUNDED = 5,
  SNBR_E_ITER_LIMIT = 6,
  SNBR_E_PREFLIGHT = 7,
  SNBR_E_PARSE = 8,
  SNBR_E_IO = 9,
  SNBR_E_INTERNAL = 10
} snbr_status;

typedef struct snbr_config snbr_config;
typedef struct snbr_game snbr_game;

SNBR_API const char* snbr_version(void);
SNBR_API const char* snbr_status_name(snbr_status status);
// Message of the most recent failure on the calling thread; empty when none.
SNBR_API const char* snbr_last_error(void);

// Strings returned through char** are owned by the caller.
SNBR_API void snbr_string_free(char* s);

SNBR_API snbr_status snbr_config_parse(const char* yaml, snbr_config** out);
SNBR_API snbr_status snbr_config_load(const char* path, snbr_config** out);
SNBR_API snbr_status snbr_config_set_seed(snbr_config* config, uint64_t seed);
SNBR_API snbr_status snbr_config_set_trajectories(snbr_config* config, size_t trajectories);
SNBR_API snbr_status snbr_config_serialize(const snbr_config* config, char** yaml);
SNBR_API void snbr_config_free(snbr_config* config);

// Builds the game, the contraction report and the inner schedule.
SNBR_API snbr_status snbr_game_create(const snbr_config* config, snbr_game** out);
SNBR_API void snbr_game_free(snbr_game* game);

// ok is set to 1 when the contraction preflight passes.
SNBR_API snbr_status snbr_preflight(const snbr_game* game, char** json, int* ok);
// Runs all trajectories and writes the artifact files under out_dir.
SNBR_API snbr_status snbr_run(const snbr_game* game, const char* out_dir, int force,
                              char** summary_json);
SNBR_API snbr_status snbr_bounds(const snbr_game* game, char** json);
SNBR_API snbr_status snbr_compare(const snbr_game* game, int force, char** json);
SNBR_API snbr_status snbr_fit(const char* csv_path, char** json);

#ifdef __cplusplus
}
#endif

#endif  // SNBR_SNBR_H_

// Copyright 2026 The SRPO Lab Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the SRPO toolkit. Objects are opaque handles released by
 * their _free function. Every call returns an srpo_status; on failure the
 * message is available from srpo_last_error() on the calling thread.
 * Strings returned through char** outputs are owned by the caller and must
 * be released with srpo_string_free(). */

#ifndef SRPOLAB_SRPOLAB_H_
#define SRPOLAB_SRPOLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SRPO_API __declspec(dllexport)
#else
#define SRPO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srpo_status {
  SRPO_OK = 0,
  SRPO_ERR_INVALID_ARGUMENT = 1,
  SRPO_ERR_STRUCTURAL = 2,
  SRPO_ERR_CONVERGENCE = 3,
  SRPO_ERR_NUMERICAL = 4,
  SRPO_ERR_DOMAIN = 5,
  SRPO_ERR_INSUFFICIENT_DATA = 6,
  SRPO_ERR_CONFIG = 7,
  SRPO_ERR_IO = 8,
  SRPO_ERR_INTERNAL = 99
} srpo_status;

typedef enum srpo_algorithm {
  SRPO_ALGO_SRPO = 0,
  SRPO_ALGO_BASELINE = 1,
  SRPO_ALGO_BEHAVIOR_REG = 2
} srpo_algorithm;

typedef struct srpo_family srpo_family;
typedef struct srpo_training srpo_training;

SRPO_API const char* srpo_version(void);
/* Message of the last failed call on this thread; "" if none. */
SRPO_API const char* srpo_last_error(void);
SRPO_API void srpo_string_free(char* s);
/* level: "error", "info" or "debug". */
SRPO_API srpo_status srpo_set_log_level(const char* level);

/* Builds the family described by the "env" section of a run config. */
SRPO_API srpo_status srpo_family_from_config(const char* config_json, srpo_family** out);
SRPO_API srpo_status srpo_family_from_json(const char* family_json, srpo_family** out);
SRPO_API srpo_status srpo_family_to_json(const srpo_family* family, char** out);
SRPO_API void srpo_family_free(srpo_family* family);
SRPO_API srpo_status srpo_family_shape(const srpo_family* family, int* n_members,
                                       int* n_states, int* n_actions);

/* Optimal values and greedy actions (arrays of n_states) and the expected
 * return from rho0. Any output pointer may be NULL. */
SRPO_API srpo_status srpo_solve_member(const srpo_family* family, int member,
                                       double* values, int* actions,
                                       double* expected_return);
/* Occupancy of the optimal policy, n_states entries. */
SRPO_API srpo_status srpo_occupancy_member(const srpo_family* family, int member,
                                           double* occupancy);

/* Theory report suite as JSON lines. all_pass is 1 when every
 * premise-holding check is satisfied. */
SRPO_API srpo_status srpo_verify_theory(const srpo_family* family, int n_pairs,
                                        int n_random_policies, uint64_t seed,
                                        char** reports_jsonl, int* all_pass);

/* Trains on the family. config_json may be NULL for defaults; otherwise its
 * "srpo" and "learner" sections are used. */
SRPO_API srpo_status srpo_train(const srpo_family* family, srpo_algorithm algorithm,
                                const char* config_json, uint64_t seed,
                                srpo_training** out);
/* returns has one entry per member; either output may be NULL. */
SRPO_API srpo_status srpo_training_final_returns(const srpo_training* training,
                                                 double* returns, double* mean);
SRPO_API srpo_status srpo_training_log_csv(const srpo_training* training, char** out);
SRPO_API srpo_status srpo_training_policies_json(const srpo_training* training,
                                                 char** out);
SRPO_API void srpo_training_free(srpo_training* training);

/* Runs the experiment in the config file. Optional overrides (NULL or 0 to
 * keep the config value): experiment name, comma-separated seeds, output
 * directory, parallelism. exit_code receives 0 (all seeds succeeded),
 * 1 (config error) or 2 (some seeds failed). manifest_json may be NULL. */
SRPO_API srpo_status srpo_run(const char* config_path, const char* experiment,
                              const char* seeds, const char* output_dir, int parallel,
                              int* exit_code, char** manifest_json);

/* Summary of one or more manifest files: readable text plus per-config and
 * paired CSV tables. Outputs may be NULL. */
SRPO_API srpo_status srpo_summarize(const char* const* manifest_paths, size_t n_paths,
                                    char** text, char** configs_csv, char** paired_csv);

#ifdef __cplusplus
}
#endif

#endif /* SRPOLAB_SRPOLAB_H_ */

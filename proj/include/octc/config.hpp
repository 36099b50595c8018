/*
   Copyright 2026 The octc authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

/* Run configuration: a JSON file with sections {alphabet, network,
   window, optimizer, anneal, train, data, paths}, every field
   defaulted, plus dotted-path command-line overrides (e.g.
   "train.workers=4"). */

#ifndef OCTC_CONFIG_HPP_
#define OCTC_CONFIG_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "octc/trainer.hpp"

namespace octc {

struct RunConfig {
  /* alphabet: tokens of L; may stay empty and come from the manifest */
  std::vector<std::string> alphabet;

  /* network; input_dim 0 means "derive from the data" and is filled in
     before the config lands in a checkpoint */
  int input_dim = 0;
  int layers = 1;
  int cells = 32;
  double dropout = 0.0;
  uint64_t net_seed = 1;

  /* window: h and h' */
  int64_t unroll = 64;
  int64_t step = 32;
  int n_streams = 1;

  OptimizerConfig optimizer;
  AnnealConfig anneal;

  /* train */
  bool allow_em = true;
  int64_t pretrain_frames = 0;
  bool average_streams = true;
  int n_workers = 1;
  int64_t max_passes = 50;
  int64_t eval_interval_frames = 0;  /* 0: one evaluation per pass */
  int64_t gap_frames = 0;
  uint64_t order_seed = 1;
  bool carry_state = true;  /* false: fresh RNN state per sequence */

  /* data */
  std::string train_manifest;
  std::string dev_manifest;
  bool normalize = true;

  /* paths */
  std::string checkpoint_path = "model.octc";
  std::string metrics_path = "metrics.jsonl";
};

/* Both directions; from_json validates (h >= h', n_streams >= 1,
   known optimizer kind, positive rates) and rejects unknown keys. */
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& c);

/* "a.b.c=value"; the value is parsed as JSON when possible, else kept
   as a string. Intermediate objects are created on demand. */
void apply_override(nlohmann::json* j, const std::string& spec);

/* Reads the file (or starts from {} when path is empty), applies the
   overrides in order, then parses. */
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides);

}  // namespace octc

#endif  /* OCTC_CONFIG_HPP_ */

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

/* Model checkpoints ("OCTC"): magic, format version u32, embedded JSON
   run configuration, frame counter, parameters and optimizer state as
   little-endian 32-bit floats, normalization statistics as 64-bit
   floats. save -> load -> save reproduces identical bytes. */

#ifndef OCTC_CHECKPOINT_HPP_
#define OCTC_CHECKPOINT_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "octc/dataset.hpp"
#include "octc/trainer.hpp"

namespace octc {

constexpr uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  nlohmann::json config;   /* the run configuration that produced it */
  std::vector<double> params;
  OptimizerState opt_state;
  int64_t frames_seen = 0;
  NormStats norm;
};

void save_checkpoint(const std::string& path, const Checkpoint& c);
/* Throws on bad magic, unsupported version, or truncation. Loaded
   f32-backed values are widened to double. */
Checkpoint load_checkpoint(const std::string& path);

}  // namespace octc

#endif  /* OCTC_CHECKPOINT_HPP_ */

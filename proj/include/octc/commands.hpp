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

/* The five commands behind the CLI. Each returns a process exit status
   and reports failures on stderr; results and progress go to stdout or
   to the configured artifact files. */

#ifndef OCTC_COMMANDS_HPP_
#define OCTC_COMMANDS_HPP_

#include <string>
#include <vector>

#include "octc/config.hpp"
#include "octc/datagen.hpp"

namespace octc {

struct DatagenCommand {
  std::string out_dir;
  DatagenSpec spec;
  uint64_t seed = 1;
};

struct TrainCommand {
  std::string config_path;                /* empty: defaults + overrides */
  std::vector<std::string> overrides;     /* "section.key=value" */
};

struct DecodeCommand {
  std::string checkpoint_path;
  std::string manifest_path;
  std::string output_path;                /* one hypothesis line per sequence */
  bool stream_mode = false;               /* carry RNN state across sequences */
  int64_t chunk_frames = 4096;
};

struct EvalCommand {
  std::string checkpoint_path;
  std::string manifest_path;
  std::string report_path;                /* empty: stdout only */
  bool stream_mode = false;
};

struct CoverageCommand {
  std::vector<std::string> lengths;       /* "T" or "T:count" entries */
  std::string histogram_path;             /* JSON object {"length": count} */
  int64_t unroll = 0;
  int64_t step = 0;
  std::string output_path;                /* empty: stdout only */
};

int run_datagen(const DatagenCommand& cmd);
int run_train(const TrainCommand& cmd);
int run_decode(const DecodeCommand& cmd);
int run_eval(const EvalCommand& cmd);
int run_coverage(const CoverageCommand& cmd);

}  // namespace octc

#endif  /* OCTC_COMMANDS_HPP_ */

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

#include <CLI11.hpp>

#include "octc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Online CTC sequence training over continuous streams"};
  app.require_subcommand(1);

  octc::DatagenCommand datagen;
  CLI::App* dg = app.add_subcommand(
      "datagen", "Generate a synthetic one-hot-plus-noise dataset");
  dg->add_option("--out", datagen.out_dir, "Output directory")->required();
  dg->add_option("--alphabet", datagen.spec.n_symbols,
                 "Alphabet size (= feature dimension)")->required();
  dg->add_option("--sequences", datagen.spec.n_sequences,
                 "Number of sequences")->required();
  dg->add_option("--min-symbols", datagen.spec.min_symbols,
                 "Minimum symbols per sequence");
  dg->add_option("--max-symbols", datagen.spec.max_symbols,
                 "Maximum symbols per sequence");
  dg->add_option("--min-frames", datagen.spec.min_frames,
                 "Minimum frames per symbol");
  dg->add_option("--max-frames", datagen.spec.max_frames,
                 "Maximum frames per symbol");
  dg->add_option("--sigma", datagen.spec.noise_sigma,
                 "Gaussian noise standard deviation");
  dg->add_option("--seed", datagen.seed, "Generator seed");

  octc::TrainCommand train;
  CLI::App* tr = app.add_subcommand("train", "Train a network");
  tr->add_option("--config", train.config_path, "JSON run configuration");
  tr->add_option("--set", train.overrides,
                 "Config override section.key=value (repeatable)");

  octc::DecodeCommand decode;
  CLI::App* de = app.add_subcommand("decode", "Write best-path hypotheses");
  de->add_option("--checkpoint", decode.checkpoint_path, "Model checkpoint")
      ->required();
  de->add_option("--manifest", decode.manifest_path, "Dataset manifest")
      ->required();
  de->add_option("--out", decode.output_path, "Hypothesis file")->required();
  de->add_flag("--stream", decode.stream_mode,
               "Carry the RNN state across sequences");
  de->add_option("--chunk", decode.chunk_frames, "Forward chunk, in frames");

  octc::EvalCommand eval;
  CLI::App* ev = app.add_subcommand("eval", "Score a checkpoint");
  ev->add_option("--checkpoint", eval.checkpoint_path, "Model checkpoint")
      ->required();
  ev->add_option("--manifest", eval.manifest_path, "Dataset manifest")
      ->required();
  ev->add_option("--report", eval.report_path, "Report file (JSON)");
  ev->add_flag("--stream", eval.stream_mode,
               "Carry the RNN state across sequences");

  octc::CoverageCommand coverage;
  CLI::App* co = app.add_subcommand(
      "coverage", "Truncated-criterion coverage for a length histogram");
  co->add_option("--length", coverage.lengths,
                 "Sequence length entry T or T:count (repeatable)");
  co->add_option("--histogram", coverage.histogram_path,
                 "JSON histogram file {\"length\": count}");
  co->add_option("--unroll", coverage.unroll, "Window length h")->required();
  co->add_option("--step", coverage.step, "Window shift h'")->required();
  co->add_option("--out", coverage.output_path, "Report file (JSON)");

  CLI11_PARSE(app, argc, argv);

  if (dg->parsed()) return octc::run_datagen(datagen);
  if (tr->parsed()) return octc::run_train(train);
  if (de->parsed()) return octc::run_decode(decode);
  if (ev->parsed()) return octc::run_eval(eval);
  return octc::run_coverage(coverage);
}

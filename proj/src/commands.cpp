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

#include "octc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "octc/checkpoint.hpp"

namespace octc {

namespace {

int fail(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return 1;
}

int feature_dim(const std::vector<SequenceData>& dataset) {
  return static_cast<int>(dataset.at(0).features.size() /
                          dataset.at(0).n_frames);
}

/* One stream holding the dataset in manifest order; for decoding and
   evaluation, where the shuffling of build_streams is unwanted. */
std::vector<TrainingStream> ordered_stream(const std::vector<SequenceData>& data,
                                           int input_dim, int n_labels) {
  std::vector<TrainingStream> streams;
  streams.emplace_back(input_dim, n_labels);
  for (size_t i = 0; i < data.size(); ++i)
    streams[0].append_sequence(data[i], i);
  return streams;
}

/* Everything run_decode / run_eval reconstruct from a checkpoint. */
struct LoadedModel {
  Checkpoint ck;
  RunConfig cfg;
  std::unique_ptr<Alphabet> alphabet;
  std::unique_ptr<LstmNetwork> net;
};

LoadedModel load_model(const std::string& checkpoint_path) {
  LoadedModel m;
  m.ck = load_checkpoint(checkpoint_path);
  m.cfg = run_config_from_json(m.ck.config);
  check(!m.cfg.alphabet.empty(), "checkpoint config has no alphabet");
  check(m.cfg.input_dim >= 1, "checkpoint config has no input dimension");
  m.alphabet = std::make_unique<Alphabet>(m.cfg.alphabet);

  NetworkConfig ncfg;
  ncfg.input_dim = m.cfg.input_dim;
  ncfg.layers = m.cfg.layers;
  ncfg.cells = m.cfg.cells;
  ncfg.output_dim = m.alphabet->extended_size();
  ncfg.dropout = m.cfg.dropout;
  ncfg.seed = m.cfg.net_seed;
  m.net = std::make_unique<LstmNetwork>(ncfg);
  check(m.net->param_count() == m.ck.params.size(),
        "checkpoint parameter count does not match its network config");
  return m;
}

std::vector<SequenceData> load_model_dataset(const LoadedModel& m,
                                             const std::string& manifest) {
  std::vector<SequenceData> data = load_dataset(manifest, *m.alphabet);
  check(feature_dim(data) == m.cfg.input_dim,
        "dataset dimension does not match the checkpoint");
  if (!m.ck.norm.mean.empty()) apply_normalization(&data, m.ck.norm);
  return data;
}

/* Argmax label per frame over [lo, hi] of a stream, chunked forwards. */
std::vector<int> argmax_path(const LstmNetwork& net,
                             const std::vector<double>& params,
                             const TrainingStream& stream, int64_t lo,
                             int64_t hi, RnnState* state, int64_t chunk) {
  std::vector<int> path;
  path.reserve(hi - lo + 1);
  SoftmaxSeq y;
  for (int64_t t = lo; t <= hi; t += chunk) {
    const int64_t n = std::min(chunk, hi - t + 1);
    net.forward(params, stream.frame(t), n, t, state, nullptr, &y, false, 0);
    for (int64_t f = t; f < t + n; ++f) {
      const double* row = y.row(f);
      int best = 0;
      for (int k = 1; k < y.width; ++k)
        if (row[k] > row[best]) best = k;
      path.push_back(best);
    }
  }
  return path;
}

/* Best-path hypotheses per sequence of a single ordered stream. */
std::vector<LabelSeq> decode_hypotheses(const LstmNetwork& net,
                                        const std::vector<double>& params,
                                        const TrainingStream& stream,
                                        bool stream_mode, int64_t chunk) {
  std::vector<LabelSeq> hyps;
  std::vector<int> path;
  RnnState state = net.initial_state();
  if (stream_mode)
    path = argmax_path(net, params, stream, 1, stream.total_frames(), &state,
                       chunk);
  for (const SequenceEntry& e : stream.boundaries()) {
    if (e.is_gap) continue;
    if (stream_mode) {
      hyps.push_back(collapse_path(std::vector<int>(
          path.begin() + (e.start - 1), path.begin() + e.end)));
    } else {
      RnnState fresh = net.initial_state();
      hyps.push_back(collapse_path(
          argmax_path(net, params, stream, e.start, e.end, &fresh, chunk)));
    }
  }
  return hyps;
}

void write_metrics_record(std::ofstream& out, const nlohmann::json& rec) {
  out << rec.dump() << "\n";
  out.flush();
}

nlohmann::json eval_to_json(const EvalResult& r) {
  return {{"error_rate", r.error_rate},
          {"substitutions", r.ops.sub},
          {"insertions", r.ops.ins},
          {"deletions", r.ops.del},
          {"reference_tokens", r.ref_tokens},
          {"sequences", r.sequences},
          {"frames", r.frames}};
}

}  // namespace

int run_datagen(const DatagenCommand& cmd) {
  try {
    check(!cmd.out_dir.empty(), "datagen needs an output directory");
    const std::vector<SequenceData> data = generate_dataset(cmd.spec, cmd.seed);
    const Alphabet alphabet(datagen_alphabet(cmd.spec.n_symbols));
    const std::string manifest = write_dataset(cmd.out_dir, data, alphabet);
    int64_t frames = 0;
    for (const SequenceData& s : data) frames += s.n_frames;
    const nlohmann::json summary = {{"manifest", manifest},
                                    {"sequences", data.size()},
                                    {"frames", frames}};
    std::printf("%s\n", summary.dump().c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_train(const TrainCommand& cmd) {
  try {
    RunConfig cfg = load_run_config(cmd.config_path, cmd.overrides);
    check(!cfg.train_manifest.empty(), "config: data.train_manifest required");

    if (cfg.alphabet.empty())
      cfg.alphabet = read_manifest(cfg.train_manifest).alphabet;
    check(!cfg.alphabet.empty(),
          "no alphabet in the config or the train manifest");
    const Alphabet alphabet(cfg.alphabet);

    std::vector<SequenceData> train = load_dataset(cfg.train_manifest,
                                                   alphabet);
    const int dim = feature_dim(train);
    if (cfg.input_dim == 0) cfg.input_dim = dim;
    check(cfg.input_dim == dim, "config input_dim does not match the data");

    NormStats norm;
    if (cfg.normalize) {
      norm = compute_norm_stats(train);
      apply_normalization(&train, norm);
    }

    std::vector<TrainingStream> dev_streams;
    if (!cfg.dev_manifest.empty()) {
      std::vector<SequenceData> dev = load_dataset(cfg.dev_manifest, alphabet);
      check(feature_dim(dev) == dim, "dev dimension does not match train");
      if (cfg.normalize) apply_normalization(&dev, norm);
      dev_streams = ordered_stream(dev, dim, alphabet.size());
    }

    NetworkConfig ncfg;
    ncfg.input_dim = dim;
    ncfg.layers = cfg.layers;
    ncfg.cells = cfg.cells;
    ncfg.output_dim = alphabet.extended_size();
    ncfg.dropout = cfg.dropout;
    ncfg.seed = cfg.net_seed;
    const LstmNetwork net(ncfg);
    std::vector<double> params = net.init_params();

    TrainerConfig tcfg;
    tcfg.unroll = cfg.unroll;
    tcfg.step = cfg.step;
    tcfg.n_workers = cfg.n_workers;
    tcfg.allow_em = cfg.allow_em;
    tcfg.pretrain_frames = cfg.pretrain_frames;
    tcfg.average_streams = cfg.average_streams;
    Trainer trainer(net, tcfg);

    OptimizerConfig ocfg = cfg.optimizer;
    OptimizerState opt = OptimizerState::for_params(params.size(), ocfg.kind);
    AnnealSchedule sched(cfg.anneal, ocfg.learning_rate);

    std::ofstream metrics(cfg.metrics_path, std::ios::trunc);
    check(metrics.good(), "cannot write metrics log: " + cfg.metrics_path);
    log_info("training: " + std::to_string(train.size()) + " sequences, dim " +
             std::to_string(dim) + ", |L| " + std::to_string(alphabet.size()) +
             ", total unroll " + std::to_string(cfg.n_streams * cfg.unroll));

    const Checkpoint base{run_config_to_json(cfg), {}, {}, 0, norm};
    double best_error = std::numeric_limits<double>::infinity();
    bool saved = false;
    bool stopped = false;
    int64_t next_eval = cfg.eval_interval_frames;

    auto save = [&](const std::vector<double>& p) {
      Checkpoint ck = base;
      ck.params = p;
      ck.opt_state = opt;
      ck.frames_seen = trainer.frames_seen();
      save_checkpoint(cfg.checkpoint_path, ck);
      saved = true;
    };

    auto evaluate = [&]() {
      if (dev_streams.empty()) return;
      const EvalResult r = evaluate_utterances(net, params, dev_streams);
      nlohmann::json rec = eval_to_json(r);
      rec["event"] = "eval";
      rec["frames_seen"] = trainer.frames_seen();
      rec["lr"] = sched.learning_rate();
      write_metrics_record(metrics, rec);
      if (r.error_rate < best_error) {
        best_error = r.error_rate;
        save(params);
      }
      std::vector<double> restore;
      const AnnealAction act = sched.update(r.error_rate, params, &restore);
      if (act != AnnealAction::kContinue) {
        params = restore;
        opt = OptimizerState::for_params(params.size(), ocfg.kind);
        ocfg.learning_rate = sched.learning_rate();
        write_metrics_record(metrics,
                             {{"event", "anneal"},
                              {"frames_seen", trainer.frames_seen()},
                              {"lr", sched.learning_rate()},
                              {"stopped", act == AnnealAction::kStopped}});
        if (act == AnnealAction::kStopped) stopped = true;
      }
    };

    /* Runs one group of streams to completion, evaluating on the frame
       cadence when one is configured. */
    auto run_streams = [&](std::vector<TrainingStream>& streams,
                           double* loss_sum, int64_t* finalized) {
      trainer.reset_stream_state(streams);
      for (;;) {
        const StepMetrics m = trainer.step(&params, &opt, ocfg, streams);
        *loss_sum += m.loss_sum;
        *finalized += m.finalized_sequences;
        if (cfg.eval_interval_frames > 0 &&
            trainer.frames_seen() >= next_eval) {
          evaluate();
          next_eval += cfg.eval_interval_frames;
        }
        if (stopped || m.all_finished) break;
      }
    };

    for (int64_t pass = 0; pass < cfg.max_passes && !stopped; ++pass) {
      double loss_sum = 0.0;
      int64_t finalized = 0;
      if (cfg.carry_state) {
        std::vector<TrainingStream> streams =
            build_streams(train, dim, alphabet.size(), cfg.n_streams,
                          cfg.order_seed + pass, cfg.gap_frames);
        run_streams(streams, &loss_sum, &finalized);
      } else {
        /* Fresh state per sequence: one single-sequence stream each,
           trained in groups of n_streams. */
        std::vector<TrainingStream> all =
            build_streams(train, dim, alphabet.size(),
                          static_cast<int>(train.size()),
                          cfg.order_seed + pass, 0);
        for (size_t g = 0; g < all.size() && !stopped;
             g += cfg.n_streams) {
          const size_t hi = std::min(all.size(), g + cfg.n_streams);
          std::vector<TrainingStream> group(
              std::make_move_iterator(all.begin() + g),
              std::make_move_iterator(all.begin() + hi));
          run_streams(group, &loss_sum, &finalized);
        }
      }
      write_metrics_record(
          metrics,
          {{"event", "train"},
           {"pass", pass},
           {"frames_seen", trainer.frames_seen()},
           {"loss_per_sequence",
            finalized > 0 ? loss_sum / static_cast<double>(finalized) : 0.0},
           {"lr", sched.learning_rate()}});
      if (!stopped && cfg.eval_interval_frames == 0) evaluate();
    }

    if (!saved || dev_streams.empty()) save(params);
    const nlohmann::json summary = {
        {"checkpoint", cfg.checkpoint_path},
        {"metrics", cfg.metrics_path},
        {"frames_seen", trainer.frames_seen()},
        {"peak_live_frames", trainer.peak_live_frames()},
        {"best_dev_error",
         std::isfinite(best_error) ? nlohmann::json(best_error)
                                   : nlohmann::json()},
        {"stopped_by_schedule", stopped}};
    std::printf("%s\n", summary.dump().c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_decode(const DecodeCommand& cmd) {
  try {
    check(!cmd.output_path.empty(), "decode needs an output path");
    check(cmd.chunk_frames >= 1, "chunk size must be positive");
    const LoadedModel m = load_model(cmd.checkpoint_path);
    const std::vector<SequenceData> data =
        load_model_dataset(m, cmd.manifest_path);
    const std::vector<TrainingStream> streams =
        ordered_stream(data, m.cfg.input_dim, m.alphabet->size());

    const std::vector<LabelSeq> hyps = decode_hypotheses(
        *m.net, m.ck.params, streams[0], cmd.stream_mode, cmd.chunk_frames);

    std::ofstream out(cmd.output_path, std::ios::trunc);
    check(out.good(), "cannot write hypotheses: " + cmd.output_path);
    for (const LabelSeq& h : hyps) {
      const std::vector<std::string> toks = m.alphabet->decode(h);
      for (size_t i = 0; i < toks.size(); ++i)
        out << (i ? " " : "") << toks[i];
      out << "\n";
    }
    check(out.good(), "hypothesis write failed: " + cmd.output_path);
    const nlohmann::json summary = {{"hypotheses", cmd.output_path},
                                    {"sequences", hyps.size()},
                                    {"stream_mode", cmd.stream_mode}};
    std::printf("%s\n", summary.dump().c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_eval(const EvalCommand& cmd) {
  try {
    const LoadedModel m = load_model(cmd.checkpoint_path);
    const std::vector<SequenceData> data =
        load_model_dataset(m, cmd.manifest_path);
    const std::vector<TrainingStream> streams =
        ordered_stream(data, m.cfg.input_dim, m.alphabet->size());

    const EvalResult r = cmd.stream_mode
                             ? evaluate_streams(*m.net, m.ck.params, streams)
                             : evaluate_utterances(*m.net, m.ck.params, streams);
    nlohmann::json report = eval_to_json(r);
    report["stream_mode"] = cmd.stream_mode;
    if (!cmd.report_path.empty()) {
      std::ofstream out(cmd.report_path, std::ios::trunc);
      check(out.good(), "cannot write report: " + cmd.report_path);
      out << report.dump(2) << "\n";
    }
    std::printf("%s\n", report.dump().c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_coverage(const CoverageCommand& cmd) {
  try {
    std::map<int64_t, int64_t> hist;
    for (const std::string& spec : cmd.lengths) {
      const size_t colon = spec.find(':');
      const int64_t length = std::stoll(spec.substr(0, colon));
      const int64_t count =
          colon == std::string::npos ? 1 : std::stoll(spec.substr(colon + 1));
      check(length >= 1 && count >= 1, "bad length entry: " + spec);
      hist[length] += count;
    }
    if (!cmd.histogram_path.empty()) {
      std::ifstream f(cmd.histogram_path);
      check(f.good(), "cannot open histogram: " + cmd.histogram_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw Error("bad histogram " + cmd.histogram_path + ": " + e.what());
      }
      check(j.is_object(), "histogram must be a JSON object {length: count}");
      for (const auto& [key, value] : j.items()) {
        const int64_t length = std::stoll(key);
        const int64_t count = value.get<int64_t>();
        check(length >= 1 && count >= 1, "bad histogram entry: " + key);
        hist[length] += count;
      }
    }
    check(!hist.empty(), "coverage needs at least one sequence length");

    const CoverageReport rep = coverage_report(hist, cmd.unroll, cmd.step);
    nlohmann::json j = {{"unroll", cmd.unroll},
                        {"step", cmd.step},
                        {"average_coverage", rep.average},
                        {"maximum_coverage", rep.maximum}};
    j["per_length"] = nlohmann::json::array();
    for (const CoverageReport::PerLength& p : rep.per_length)
      j["per_length"].push_back({{"length", p.length},
                                 {"count", p.count},
                                 {"average", p.average},
                                 {"maximum", p.maximum}});
    if (!cmd.output_path.empty()) {
      std::ofstream out(cmd.output_path, std::ios::trunc);
      check(out.good(), "cannot write coverage report: " + cmd.output_path);
      out << j.dump(2) << "\n";
    }
    std::printf("%s\n", j.dump().c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace octc

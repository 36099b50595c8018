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

/* The training loop: optimizers with Nesterov momentum, learning-rate
   annealing with checkpoint restore, and the synchronized multi-stream
   window step that ties network, windows, and streams together. */

#ifndef OCTC_TRAINER_HPP_
#define OCTC_TRAINER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "octc/decoder.hpp"
#include "octc/network.hpp"
#include "octc/streaming.hpp"

namespace octc {

enum class OptimizerKind { kSgd, kAdadelta };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double learning_rate = 1e-4;
  double momentum = 0.9;
  double rms_decay = 0.99;     /* accumulator decay (kAdadelta) */
  double epsilon = 1e-6;       /* accumulator floor (kAdadelta) */
  double max_grad_norm = 0.0;  /* 0 disables the norm guard */
};

struct OptimizerState {
  std::vector<double> velocity;
  std::vector<double> rms_grad;    /* kAdadelta only */
  std::vector<double> rms_update;  /* kAdadelta only */
  int64_t rejected_steps = 0;

  static OptimizerState for_params(size_t n, OptimizerKind kind);
};

/* v <- mu v - lambda g; w <- w + mu v - lambda g, with the updated v.
   A non-finite gradient rejects the step: params and accumulators stay
   untouched, rejected_steps grows, and the call returns false. */
bool sgd_nesterov_step(std::vector<double>* params,
                       const std::vector<double>& grad, OptimizerState* state,
                       const OptimizerConfig& cfg);

/* The per-parameter delta is preconditioned by the two running RMS
   accumulators (decay rms_decay, floor epsilon) and then still scaled by
   the learning rate and passed through the same Nesterov velocity. */
bool adadelta_step(std::vector<double>* params, const std::vector<double>& grad,
                   OptimizerState* state, const OptimizerConfig& cfg);

/* Dispatch on cfg.kind; applies the optional gradient-norm guard. */
bool optimizer_step(std::vector<double>* params, const std::vector<double>& grad,
                    OptimizerState* state, const OptimizerConfig& cfg);

/* Learning-rate annealing driven by evaluation scores (lower = better).
   Tracks the two lowest-score checkpoints seen so far. After `patience`
   consecutive non-improving evaluations the learning rate divides by
   lr_decay_factor and training resumes from the newer of the two best
   checkpoints; training stops once the rate falls below lr_floor. */
struct AnnealConfig {
  int patience = 6;
  double lr_decay_factor = 2.0;
  double lr_floor = 1e-6;
};

enum class AnnealAction { kContinue, kDecayed, kStopped };

class AnnealSchedule {
 public:
  AnnealSchedule(AnnealConfig cfg, double lr_initial);

  /* On kDecayed/kStopped, *restore_params receives the checkpoint to
     resume from (the newer of the two best). The caller also resets the
     optimizer state: momentum from before the restore is stale. */
  AnnealAction update(double eval_score, const std::vector<double>& params,
                      std::vector<double>* restore_params);

  double learning_rate() const { return lr_; }
  int consecutive_bad() const { return bad_; }
  double best_score() const;

 private:
  struct Snapshot {
    double score = 0.0;
    uint64_t index = 0;  /* evaluation counter, for newer-of-two */
    std::vector<double> params;
  };

  AnnealConfig cfg_;
  double lr_;
  int bad_ = 0;
  uint64_t evals_ = 0;
  std::optional<Snapshot> best_, second_;
};

/* One synchronized multi-stream iteration. */
struct TrainerConfig {
  int64_t unroll = 64;          /* h  */
  int64_t step = 32;            /* h' */
  int n_workers = 1;
  bool allow_em = true;
  int64_t pretrain_frames = 0;  /* truncated-only until this many frames */
  bool average_streams = true;  /* false: reduce by sum */
};

struct StepMetrics {
  int64_t frames_processed = 0;
  int n_active_streams = 0;
  double loss_sum = 0.0;        /* sum of -ln p(z|x) over finalized sequences */
  int64_t finalized_sequences = 0;
  int64_t tr_segments = 0;
  int64_t em_segments = 0;
  int64_t degenerate_segments = 0;
  int64_t skipped_segments = 0;
  bool all_finished = false;
};

class Trainer {
 public:
  Trainer(const LstmNetwork& net, TrainerConfig cfg);

  /* Advances every unfinished stream by one window (h' new frames),
     reduces the per-stream gradients in fixed stream order, and applies
     one optimizer step. Streams must have been seeded with
     net.initial_state(); see reset_stream_state(). */
  StepMetrics step(std::vector<double>* params, OptimizerState* opt,
                   const OptimizerConfig& opt_cfg,
                   std::vector<TrainingStream>& streams);

  /* Rewinds every stream cursor, reseeds its RNN state, and drops the
     activation tapes. For the start of a pass or after a restore. */
  void reset_stream_state(std::vector<TrainingStream>& streams);

  const std::vector<double>& last_gradient() const { return merged_grad_; }
  int64_t frames_seen() const { return frames_seen_; }
  /* max over steps of the live activation frames summed over streams,
     measured after the forwards and before the tapes are trimmed. */
  int64_t peak_live_frames() const { return peak_live_; }
  bool em_active() const;

 private:
  const LstmNetwork* net_;
  TrainerConfig cfg_;
  std::vector<ActivationTape> tapes_;
  std::vector<std::vector<double>> stream_grads_;
  std::vector<double> merged_grad_;
  int64_t frames_seen_ = 0;
  int64_t peak_live_ = 0;
};

/* Best-path decoding over whole streams (RNN state flows across
   sequence boundaries), scored per sequence against the boundary
   table. chunk_frames bounds the forward buffering. */
struct EvalResult {
  EditOps ops;
  int64_t ref_tokens = 0;
  int64_t frames = 0;
  int64_t sequences = 0;
  double error_rate = 0.0;
};

EvalResult evaluate_streams(const LstmNetwork& net,
                            const std::vector<double>& params,
                            const std::vector<TrainingStream>& streams,
                            int64_t chunk_frames = 4096);

/* Same scoring, but every sequence is decoded from a fresh RNN state. */
EvalResult evaluate_utterances(const LstmNetwork& net,
                               const std::vector<double>& params,
                               const std::vector<TrainingStream>& streams,
                               int64_t chunk_frames = 4096);

}  // namespace octc

#endif  /* OCTC_TRAINER_HPP_ */

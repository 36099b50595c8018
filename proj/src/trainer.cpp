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

#include "octc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace octc {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

OptimizerState OptimizerState::for_params(size_t n, OptimizerKind kind) {
  OptimizerState s;
  s.velocity.assign(n, 0.0);
  if (kind == OptimizerKind::kAdadelta) {
    s.rms_grad.assign(n, 0.0);
    s.rms_update.assign(n, 0.0);
  }
  return s;
}

bool sgd_nesterov_step(std::vector<double>* params,
                       const std::vector<double>& grad, OptimizerState* state,
                       const OptimizerConfig& cfg) {
  check(params->size() == grad.size() && state->velocity.size() == grad.size(),
        "parameter/gradient/velocity size mismatch");
  if (!all_finite(grad)) {
    ++state->rejected_steps;
    log_info("optimizer: non-finite gradient, step rejected");
    return false;
  }
  const double mu = cfg.momentum, lr = cfg.learning_rate;
  for (size_t i = 0; i < grad.size(); ++i) {
    const double v = mu * state->velocity[i] - lr * grad[i];
    state->velocity[i] = v;
    (*params)[i] += mu * v - lr * grad[i];
  }
  return true;
}

bool adadelta_step(std::vector<double>* params, const std::vector<double>& grad,
                   OptimizerState* state, const OptimizerConfig& cfg) {
  check(params->size() == grad.size() && state->velocity.size() == grad.size() &&
            state->rms_grad.size() == grad.size() &&
            state->rms_update.size() == grad.size(),
        "parameter/gradient/accumulator size mismatch");
  if (!all_finite(grad)) {
    ++state->rejected_steps;
    log_info("optimizer: non-finite gradient, step rejected");
    return false;
  }
  const double rho = cfg.rms_decay, eps = cfg.epsilon;
  const double mu = cfg.momentum, lr = cfg.learning_rate;
  for (size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    state->rms_grad[i] = rho * state->rms_grad[i] + (1.0 - rho) * g * g;
    /* Preconditioned gradient; the learning rate and velocity are
       applied on top of it below. */
    const double ghat = g * std::sqrt(state->rms_update[i] + eps) /
                        std::sqrt(state->rms_grad[i] + eps);
    state->rms_update[i] = rho * state->rms_update[i] + (1.0 - rho) * ghat * ghat;
    const double v = mu * state->velocity[i] - lr * ghat;
    state->velocity[i] = v;
    (*params)[i] += mu * v - lr * ghat;
  }
  return true;
}

bool optimizer_step(std::vector<double>* params, const std::vector<double>& grad,
                    OptimizerState* state, const OptimizerConfig& cfg) {
  if (cfg.max_grad_norm > 0.0) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (std::isfinite(norm) && norm > cfg.max_grad_norm) {
      std::vector<double> scaled(grad);
      const double s = cfg.max_grad_norm / norm;
      for (double& g : scaled) g *= s;
      return cfg.kind == OptimizerKind::kSgd
                 ? sgd_nesterov_step(params, scaled, state, cfg)
                 : adadelta_step(params, scaled, state, cfg);
    }
  }
  return cfg.kind == OptimizerKind::kSgd
             ? sgd_nesterov_step(params, grad, state, cfg)
             : adadelta_step(params, grad, state, cfg);
}

AnnealSchedule::AnnealSchedule(AnnealConfig cfg, double lr_initial)
    : cfg_(cfg), lr_(lr_initial) {
  check(cfg_.patience >= 1, "patience must be at least 1");
  check(cfg_.lr_decay_factor > 1.0, "decay factor must exceed 1");
  check(cfg_.lr_floor < lr_initial, "floor must lie below the initial rate");
}

double AnnealSchedule::best_score() const {
  return best_ ? best_->score : std::numeric_limits<double>::infinity();
}

AnnealAction AnnealSchedule::update(double eval_score,
                                    const std::vector<double>& params,
                                    std::vector<double>* restore_params) {
  check(std::isfinite(eval_score), "evaluation score must be finite");
  ++evals_;
  const bool improved = !best_ || eval_score < best_->score;
  if (improved) {
    second_ = std::move(best_);
    best_ = Snapshot{eval_score, evals_, params};
    bad_ = 0;
    return AnnealAction::kContinue;
  }
  if (!second_ || eval_score < second_->score)
    second_ = Snapshot{eval_score, evals_, params};
  if (++bad_ < cfg_.patience) return AnnealAction::kContinue;

  /* Decay and resume from the newer of the two best checkpoints. */
  bad_ = 0;
  lr_ /= cfg_.lr_decay_factor;
  const Snapshot& pick =
      (second_ && second_->index > best_->index) ? *second_ : *best_;
  if (restore_params != nullptr) *restore_params = pick.params;
  return lr_ < cfg_.lr_floor ? AnnealAction::kStopped : AnnealAction::kDecayed;
}

Trainer::Trainer(const LstmNetwork& net, TrainerConfig cfg)
    : net_(&net), cfg_(cfg) {
  check(cfg_.step >= 1 && cfg_.unroll >= cfg_.step,
        "unroll must be at least the step");
  check(cfg_.n_workers >= 1, "need at least one worker");
  merged_grad_.assign(net.param_count(), 0.0);
}

bool Trainer::em_active() const {
  return cfg_.allow_em && frames_seen_ >= cfg_.pretrain_frames;
}

void Trainer::reset_stream_state(std::vector<TrainingStream>& streams) {
  tapes_.assign(streams.size(), ActivationTape{});
  for (TrainingStream& s : streams) {
    s.reset();
    s.rnn_state() = net_->initial_state();
  }
}

StepMetrics Trainer::step(std::vector<double>* params, OptimizerState* opt,
                          const OptimizerConfig& opt_cfg,
                          std::vector<TrainingStream>& streams) {
  const size_t n = streams.size();
  if (tapes_.size() != n) tapes_.assign(n, ActivationTape{});
  if (stream_grads_.size() != n)
    stream_grads_.assign(n, std::vector<double>(net_->param_count(), 0.0));

  std::vector<size_t> active;
  for (size_t k = 0; k < n; ++k)
    if (!streams[k].empty() && !streams[k].finished()) active.push_back(k);

  StepMetrics m;
  if (active.empty()) {
    m.all_finished = true;
    return m;
  }
  m.n_active_streams = static_cast<int>(active.size());
  const bool allow_em = em_active();

  struct StreamStats {
    int64_t new_frames = 0;
    int64_t live_frames = 0;
    double loss = 0.0;
    int64_t finalized = 0, tr = 0, em = 0, degenerate = 0, skipped = 0;
  };
  std::vector<StreamStats> stats(n);

  auto work = [&](size_t k) {
    TrainingStream& stream = streams[k];
    const WindowPlan plan =
        plan_window(stream.next_window_index(), cfg_.unroll, cfg_.step,
                    stream.total_frames());
    const int64_t lo = plan.prev_end + 1;
    net_->forward(*params, stream.frame(lo), plan.end - plan.prev_end, lo,
                  &stream.rnn_state(), &tapes_[k], nullptr,
                  /*train_mode=*/true, /*mask_stream=*/k);
    stats[k].live_frames = static_cast<int64_t>(tapes_[k].size());
    const SoftmaxSeq y = tapes_[k].window_logp(plan.begin, plan.end);
    std::vector<WindowSegment> segments;
    const WindowErrors we = stream.advance_window(y, plan, allow_em, &segments);
    std::fill(stream_grads_[k].begin(), stream_grads_[k].end(), 0.0);
    if (we.mode != WindowErrors::Mode::kNone)
      net_->backward(*params, tapes_[k], we, plan.begin, plan.end,
                     &stream_grads_[k]);
    tapes_[k].trim_before(plan.next_begin);

    stats[k].new_frames = plan.end - plan.prev_end;
    for (const WindowSegment& seg : segments) {
      if (seg.skipped) {
        ++stats[k].skipped;
        continue;
      }
      if (seg.degenerate) ++stats[k].degenerate;
      if (seg.mode == WindowErrors::Mode::kTr) {
        ++stats[k].tr;
        if (!seg.degenerate) {
          ++stats[k].finalized;
          stats[k].loss -= seg.log_prob;
        }
      } else if (seg.mode == WindowErrors::Mode::kEm) {
        ++stats[k].em;
      }
    }
  };

  if (cfg_.n_workers == 1 || active.size() == 1) {
    for (size_t k : active) work(k);
  } else {
    const int workers = std::min<int>(cfg_.n_workers,
                                      static_cast<int>(active.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = w; i < active.size(); i += workers) work(active[i]);
      });
    for (std::thread& t : pool) t.join();
  }

  /* Fixed-order reduction: identical result for any worker count. */
  std::fill(merged_grad_.begin(), merged_grad_.end(), 0.0);
  int64_t live_total = 0;
  for (size_t k : active) {
    const std::vector<double>& g = stream_grads_[k];
    for (size_t i = 0; i < merged_grad_.size(); ++i) merged_grad_[i] += g[i];
    live_total += stats[k].live_frames;
    m.frames_processed += stats[k].new_frames;
    m.loss_sum += stats[k].loss;
    m.finalized_sequences += stats[k].finalized;
    m.tr_segments += stats[k].tr;
    m.em_segments += stats[k].em;
    m.degenerate_segments += stats[k].degenerate;
    m.skipped_segments += stats[k].skipped;
  }
  if (cfg_.average_streams)
    for (double& g : merged_grad_) g /= static_cast<double>(active.size());
  peak_live_ = std::max(peak_live_, live_total);

  optimizer_step(params, merged_grad_, opt, opt_cfg);
  frames_seen_ += m.frames_processed;
  m.all_finished = std::all_of(streams.begin(), streams.end(),
                               [](const TrainingStream& s) {
                                 return s.empty() || s.finished();
                               });
  return m;
}

namespace {

/* Argmax path over a span of stream frames, forwarded in chunks. */
std::vector<int> argmax_path(const LstmNetwork& net,
                             const std::vector<double>& params,
                             const TrainingStream& stream, int64_t lo,
                             int64_t hi, RnnState* state, int64_t chunk_frames) {
  std::vector<int> path;
  path.reserve(hi - lo + 1);
  SoftmaxSeq y;
  for (int64_t t = lo; t <= hi; t += chunk_frames) {
    const int64_t n = std::min(chunk_frames, hi - t + 1);
    net.forward(params, stream.frame(t), n, t, state, nullptr, &y,
                /*train_mode=*/false, 0);
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

EvalResult evaluate_impl(const LstmNetwork& net,
                         const std::vector<double>& params,
                         const std::vector<TrainingStream>& streams,
                         int64_t chunk_frames, bool continuous) {
  check(chunk_frames >= 1, "chunk size must be positive");
  EvalResult r;
  for (const TrainingStream& stream : streams) {
    if (stream.empty()) continue;
    std::vector<int> path;
    RnnState state = net.initial_state();
    if (continuous)
      path = argmax_path(net, params, stream, 1, stream.total_frames(), &state,
                         chunk_frames);
    for (const SequenceEntry& e : stream.boundaries()) {
      if (e.is_gap) continue;
      LabelSeq hyp;
      if (continuous) {
        hyp = collapse_path(std::vector<int>(path.begin() + (e.start - 1),
                                             path.begin() + e.end));
      } else {
        RnnState fresh = net.initial_state();
        hyp = collapse_path(
            argmax_path(net, params, stream, e.start, e.end, &fresh,
                        chunk_frames));
      }
      const EditOps ops = edit_distance(e.labels, hyp);
      r.ops.sub += ops.sub;
      r.ops.ins += ops.ins;
      r.ops.del += ops.del;
      r.ref_tokens += static_cast<int64_t>(e.labels.size());
      r.frames += e.frames();
      ++r.sequences;
    }
  }
  r.error_rate = label_error_rate(r.ops, static_cast<size_t>(r.ref_tokens));
  return r;
}

}  // namespace

EvalResult evaluate_streams(const LstmNetwork& net,
                            const std::vector<double>& params,
                            const std::vector<TrainingStream>& streams,
                            int64_t chunk_frames) {
  return evaluate_impl(net, params, streams, chunk_frames, true);
}

EvalResult evaluate_utterances(const LstmNetwork& net,
                               const std::vector<double>& params,
                               const std::vector<TrainingStream>& streams,
                               int64_t chunk_frames) {
  return evaluate_impl(net, params, streams, chunk_frames, false);
}

}  // namespace octc

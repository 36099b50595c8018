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

#include "octc/ctc_online.hpp"

#include <algorithm>
#include <cassert>

namespace octc {

namespace {

SoftmaxSeq slice_frames(const SoftmaxSeq& y, int64_t lo, int64_t hi) {
  assert(lo >= y.first_frame && hi <= y.last_frame());
  SoftmaxSeq out(lo, hi - lo + 1, y.width);
  std::copy(y.row(lo), y.row(hi) + y.width, out.logp.begin());
  return out;
}

/* Copy retained carry rows [lo, hi] into a lattice for error products. */
Lattice carry_lattice(const CtcCarry& carry, int64_t lo, int64_t hi) {
  Lattice alpha(LatticeKind::kForward, lo, hi - lo + 1, carry.target().size());
  for (int64_t t = lo; t <= hi; ++t) {
    const std::vector<double>& row = carry.alpha_row(t);
    std::copy(row.begin(), row.end(), alpha.row(t));
  }
  return alpha;
}

}  // namespace

WindowPlan plan_window(int64_t n, int64_t unroll, int64_t step,
                       std::optional<int64_t> total_frames) {
  check(n >= 1, "window index must be positive");
  check(step >= 1, "step must be positive");
  check(unroll >= step, "unroll must be at least the step");
  WindowPlan plan;
  plan.index = n;
  plan.unroll = unroll;
  plan.step = step;
  plan.begin = std::max<int64_t>(1, n * step - unroll + 1);
  plan.prev_end = (n - 1) * step;
  plan.end = n * step;
  plan.next_begin = std::max<int64_t>(1, (n + 1) * step - unroll + 1);
  if (total_frames.has_value()) {
    check(plan.prev_end < *total_frames, "window starts past the end of the sequence");
    plan.end = std::min(plan.end, *total_frames);
    plan.is_final = plan.end == *total_frames;
  }
  return plan;
}

CtcCarry::CtcCarry(ExtendedSeq z) : z_(std::move(z)) {}

void CtcCarry::use_blank_only_init() {
  check(last_ == 0, "init kind must be chosen before the first frame");
  blank_only_init_ = true;
}

void CtcCarry::extend(const SoftmaxSeq& y, int64_t through) {
  if (through <= last_) return;
  check(y.last_frame() >= through, "y does not reach the requested frame");
  int64_t t = last_ + 1;
  check(y.first_frame <= t, "y starts after the resume point");
  if (last_ == 0) {
    std::vector<double> first;
    if (blank_only_init_) {
      first.assign(z_.size(), kLogZero);
      first[0] = y.row(1)[kBlank];
    } else {
      first = forward_init(y.row(1), z_);
    }
    rows_.push_back(std::move(first));
    last_ = 1;
    ++t;
  }
  for (; t <= through; ++t) {
    std::vector<double> next;
    forward_step(rows_.back(), z_, y.row(t), next);
    rows_.push_back(std::move(next));
    last_ = t;
  }
}

const std::vector<double>& CtcCarry::alpha_row(int64_t t) const {
  check(t >= first_retained_ && t <= last_, "alpha row no longer retained");
  return rows_[t - first_retained_];
}

void CtcCarry::trim_before(int64_t keep_from) {
  while (first_retained_ < keep_from && rows_.size() > 1) {
    rows_.pop_front();
    ++first_retained_;
  }
}

double CtcCarry::sequence_log_prob() const {
  check(last_ >= 1, "no frames consumed");
  return seq_log_prob_from_alpha(rows_.back());
}

double CtcCarry::prefix_set_log_prob() const {
  check(last_ >= 1, "no frames consumed");
  return log_sum(rows_.back().data(), static_cast<int>(rows_.back().size()));
}

WindowErrors ctc_tr_window(const SoftmaxSeq& y, CtcCarry& carry,
                           const WindowPlan& plan) {
  check(plan.is_final, "truncated window requires the sequence end");
  carry.extend(y, plan.end);
  WindowErrors we(plan.begin, plan.end - plan.begin + 1, y.width);
  we.mode = WindowErrors::Mode::kTr;
  const double log_p = carry.sequence_log_prob();
  we.log_prob = log_p;
  if (log_p == kLogZero) {
    we.degenerate = true;
    return we;
  }
  const SoftmaxSeq window = slice_frames(y, plan.begin, plan.end);
  const Lattice beta = backward_range(window, carry.target());
  const Lattice alpha = carry_lattice(carry, plan.begin, plan.end);
  CtcGrad rows;
  rows.first_frame = we.first_frame;
  rows.frames = we.frames;
  rows.width = we.width;
  rows.dl_da.swap(we.values);
  accumulate_error_rows(window, carry.target(), alpha, beta, log_p,
                        plan.begin, plan.end, &rows);
  we.values.swap(rows.dl_da);
  we.error_begin = plan.begin;
  we.error_end = plan.end;
  return we;
}

WindowErrors ctc_em_window(const SoftmaxSeq& y, CtcCarry& carry,
                           const WindowPlan& plan) {
  check(!plan.is_final, "sequence end must lie beyond this window");
  carry.extend(y, plan.end);
  WindowErrors we(plan.begin, plan.end - plan.begin + 1, y.width);
  we.mode = WindowErrors::Mode::kEm;
  we.log_prob = carry.prefix_set_log_prob();
  const int64_t err_end = std::min(plan.next_begin - 1, plan.end);
  if (err_end < plan.begin) return we;  /* nothing expiring yet */
  if (we.log_prob == kLogZero) {
    we.degenerate = true;
    return we;
  }
  const SoftmaxSeq window = slice_frames(y, plan.begin, plan.end);
  const std::vector<double> ones = em_backward_init(carry.target());
  const Lattice beta = backward_range(window, carry.target(), &ones);
  const Lattice alpha = carry_lattice(carry, plan.begin, err_end);
  CtcGrad rows;
  rows.first_frame = we.first_frame;
  rows.frames = we.frames;
  rows.width = we.width;
  rows.dl_da.swap(we.values);
  accumulate_error_rows(window, carry.target(), alpha, beta, we.log_prob,
                        plan.begin, err_end, &rows);
  we.values.swap(rows.dl_da);
  we.error_begin = plan.begin;
  we.error_end = err_end;
  return we;
}

WindowErrors window_errors(const SoftmaxSeq& y, CtcCarry& carry,
                           const WindowPlan& plan, bool allow_em) {
  if (plan.is_final) return ctc_tr_window(y, carry, plan);
  if (allow_em) return ctc_em_window(y, carry, plan);
  carry.extend(y, plan.end);  /* alpha must advance even without errors */
  WindowErrors we(plan.begin, plan.end - plan.begin + 1, y.width);
  we.mode = WindowErrors::Mode::kNone;
  return we;
}

std::vector<double> em_backward_init(const ExtendedSeq& z_ext) {
  return std::vector<double>(z_ext.size(), 0.0);
}

double prefix_set_log_prob(const SoftmaxSeq& y, const ExtendedSeq& z_ext) {
  const Lattice alpha = forward_range(y, z_ext);
  return log_sum(alpha.row(alpha.last_frame()), alpha.width);
}

int hard_em_alignment(const std::vector<double>& alpha_row,
                      const ExtendedSeq& z_ext) {
  const int n_labels = static_cast<int>(z_ext.base().size());
  check(static_cast<int>(alpha_row.size()) == z_ext.size(),
        "alpha row width does not match target");
  int best_m = 0;
  double best = alpha_row[0];  /* m = 0: only u = 1 is in range */
  for (int m = 1; m <= n_labels; ++m) {
    const double mass = log_add(alpha_row[2 * m - 1], alpha_row[2 * m]);
    if (mass > best) {
      best = mass;
      best_m = m;
    }
  }
  return best_m;
}

}  // namespace octc

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

#ifndef OCTC_CTC_ONLINE_HPP_
#define OCTC_CTC_ONLINE_HPP_

#include <deque>
#include <optional>

#include "octc/ctc_core.hpp"

namespace octc {

/* One step of the sliding training window. With unroll h and step h'
   (h >= h'), iteration n forwards frames (prev_end, end] and backward
   propagates over [begin, end]:

     begin     = max(1, n h' - h + 1)
     end       = min(n h', T)
     prev_end  = (n-1) h'
     next_begin= max(1, (n+1) h' - h + 1)

   Frame indices are 1-based. is_final is set when end reaches T; with
   unknown T (open stream) it stays false and end = n h'. */
struct WindowPlan {
  int64_t index = 1;
  int64_t unroll = 0;
  int64_t step = 0;
  int64_t begin = 1;
  int64_t end = 0;
  int64_t prev_end = 0;
  int64_t next_begin = 1;
  bool is_final = false;
};

WindowPlan plan_window(int64_t n, int64_t unroll, int64_t step,
                       std::optional<int64_t> total_frames);

/* Resumable forward state for one target sequence. Keeps the alpha rows
   for the retained tail of the window (older rows are trimmed), so both
   the forward recursion and the error products of the next window can be
   served without recomputation. Frames are sequence-local and 1-based. */
class CtcCarry {
 public:
  explicit CtcCarry(ExtendedSeq z);

  /* Boundary continuation within a stream: the first frame may only be
     the blank. Must be requested before the first extend. */
  void use_blank_only_init();

  /* Advance alpha through frame `through`; y must cover
     (frames_consumed(), through]. */
  void extend(const SoftmaxSeq& y, int64_t through);

  int64_t frames_consumed() const { return last_; }
  int64_t first_retained() const { return first_retained_; }
  const std::vector<double>& alpha_row(int64_t t) const;

  /* Drop retained rows before keep_from (the final row always stays). */
  void trim_before(int64_t keep_from);

  const ExtendedSeq& target() const { return z_; }

  /* ln p(z | x_1:last): both final positions of the last alpha row. */
  double sequence_log_prob() const;
  /* ln p(Z | x_1:last): every position of the last alpha row. */
  double prefix_set_log_prob() const;

 private:
  ExtendedSeq z_;
  bool blank_only_init_ = false;
  int64_t first_retained_ = 1;
  int64_t last_ = 0;
  std::deque<std::vector<double>> rows_;
};

/* dL/da rows for one window; zeros outside the error-eligible range. */
struct WindowErrors {
  enum class Mode { kNone, kTr, kEm, kMixed };

  int64_t first_frame = 1;
  int64_t frames = 0;
  int width = 0;
  std::vector<double> values;   /* linear-domain derivatives */
  Mode mode = Mode::kNone;
  bool degenerate = false;      /* p = 0: all-zero window, skipped */
  double log_prob = kLogZero;   /* ln p backing the errors */
  int64_t error_begin = 1, error_end = 0;  /* empty when begin > end */

  WindowErrors() = default;
  WindowErrors(int64_t first, int64_t n, int w)
      : first_frame(first), frames(n), width(w),
        values(static_cast<size_t>(n) * w, 0.0) {}

  double* row(int64_t t) { return values.data() + (t - first_frame) * width; }
  const double* row(int64_t t) const { return values.data() + (t - first_frame) * width; }
};

/* Final window: the sequence end is inside this window. beta runs from
   the true sequence end back to plan.begin and every frame of the window
   is error-eligible. y covers [plan.begin, plan.end]. */
WindowErrors ctc_tr_window(const SoftmaxSeq& y, CtcCarry& carry,
                           const WindowPlan& plan);

/* Non-final window: the modeled distribution is over all prefixes of z.
   beta is seeded with ones at plan.end (the prefix-sum identity makes
   that row exact regardless of how the sequence continues), errors land
   on [plan.begin, plan.next_begin - 1] and the remaining frames are
   zeros — they become eligible in a later window. */
WindowErrors ctc_em_window(const SoftmaxSeq& y, CtcCarry& carry,
                           const WindowPlan& plan);

/* Dispatch on plan.is_final; with allow_em = false (pre-training phase)
   non-final windows produce no errors but alpha still advances. */
WindowErrors window_errors(const SoftmaxSeq& y, CtcCarry& carry,
                           const WindowPlan& plan, bool allow_em);

/* All-ones (log 0) backward seed over |z'| positions. */
std::vector<double> em_backward_init(const ExtendedSeq& z_ext);

/* ln p(Z|x_1:tau) over y's frames from a fresh forward pass. */
double prefix_set_log_prob(const SoftmaxSeq& y, const ExtendedSeq& z_ext);

/* Most probable target prefix length at the frame of alpha_row:
   argmax_m alpha(2m) + alpha(2m+1), ties toward the shorter prefix. */
int hard_em_alignment(const std::vector<double>& alpha_row,
                      const ExtendedSeq& z_ext);

}  // namespace octc

#endif  // OCTC_CTC_ONLINE_HPP_

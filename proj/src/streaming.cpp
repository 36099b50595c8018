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

#include "octc/streaming.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace octc {

void TrainingStream::append_sequence(const SequenceData& seq,
                                     size_t dataset_index) {
  check(seq.n_frames >= 1, "sequence must have at least one frame");
  check(seq.features.size() ==
            static_cast<size_t>(seq.n_frames) * input_dim_,
        "feature buffer does not match n_frames x input_dim");
  SequenceEntry e;
  e.start = total_frames_ + 1;
  e.end = total_frames_ + seq.n_frames;
  e.labels = seq.labels;
  e.dataset_index = dataset_index;
  entries_.push_back(std::move(e));
  features_.insert(features_.end(), seq.features.begin(), seq.features.end());
  total_frames_ += seq.n_frames;
}

void TrainingStream::append_gap(int64_t n_frames) {
  check(n_frames >= 1, "gap must have at least one frame");
  SequenceEntry e;
  e.start = total_frames_ + 1;
  e.end = total_frames_ + n_frames;
  e.is_gap = true;
  entries_.push_back(std::move(e));
  features_.insert(features_.end(),
                   static_cast<size_t>(n_frames) * input_dim_, 0.0);
  total_frames_ += n_frames;
}

WindowErrors TrainingStream::advance_window(const SoftmaxSeq& y,
                                            const WindowPlan& plan,
                                            bool allow_em,
                                            std::vector<WindowSegment>* segments) {
  check(!finished(), "stream already fully consumed");
  check(plan.index == window_index_ && plan.prev_end == consumed_,
        "plan does not match the stream cursor");
  check(y.first_frame <= plan.begin && y.last_frame() >= plan.end,
        "y does not cover the window");
  if (segments != nullptr) segments->clear();

  WindowErrors merged(plan.begin, plan.end - plan.begin + 1, y.width);
  int error_segments = 0;
  WindowErrors::Mode single_mode = WindowErrors::Mode::kNone;
  int64_t hull_begin = std::numeric_limits<int64_t>::max();
  int64_t hull_end = std::numeric_limits<int64_t>::min();

  while (cur_seq_ < entries_.size() && entries_[cur_seq_].start <= plan.end) {
    const SequenceEntry& e = entries_[cur_seq_];
    const bool final_seg = e.end <= plan.end;
    const int64_t seg_begin = std::max(plan.begin, e.start);
    const int64_t seg_end = std::min(plan.end, e.end);

    if (carry_ == nullptr && !cur_skipped_) {
      /* First frames of this sequence: decide feasibility once. The
         blank forced onto the first frame of a mid-stream sequence
         consumes one frame, so the shortest admissible path grows by
         one there. */
      ExtendedSeq z_ext = extend_labels(e.labels, n_labels_);
      const bool blank_init = cur_seq_ > 0;
      const int64_t need = z_ext.min_path_frames() + (blank_init ? 1 : 0);
      if (need > e.frames()) {
        cur_skipped_ = true;
        ++skipped_;
        log_info("stream: skipping sequence " +
                 std::to_string(e.dataset_index) + " (target needs " +
                 std::to_string(need) + " frames, has " +
                 std::to_string(e.frames()) + ")");
      } else {
        carry_ = std::make_unique<CtcCarry>(std::move(z_ext));
        if (blank_init) carry_->use_blank_only_init();
      }
    }

    WindowSegment seg;
    seg.seq_index = cur_seq_;
    seg.begin = seg_begin;
    seg.end = seg_end;
    if (cur_skipped_) {
      seg.skipped = true;
    } else {
      /* Window op in sequence-local frames (sequence frame 1 = e.start). */
      const int64_t base = e.start - 1;
      WindowPlan lp;
      lp.index = plan.index;
      lp.unroll = plan.unroll;
      lp.step = plan.step;
      lp.begin = seg_begin - base;
      lp.end = seg_end - base;
      lp.prev_end = std::max<int64_t>(consumed_ - base, 0);
      lp.next_begin = std::max<int64_t>(plan.next_begin - base, 1);
      lp.is_final = final_seg;

      SoftmaxSeq local(lp.begin, lp.end - lp.begin + 1, y.width);
      std::copy(y.row(seg_begin), y.row(seg_end) + y.width,
                local.logp.begin());
      const WindowErrors we = window_errors(local, *carry_, lp, allow_em);
      seg.mode = we.mode;
      seg.degenerate = we.degenerate;
      seg.log_prob = we.log_prob;
      if (we.degenerate) ++degenerate_;
      if (!we.degenerate && we.error_end >= we.error_begin) {
        seg.error_begin = we.error_begin + base;
        seg.error_end = we.error_end + base;
        for (int64_t t = we.error_begin; t <= we.error_end; ++t)
          std::copy(we.row(t), we.row(t) + we.width, merged.row(t + base));
        ++error_segments;
        single_mode = we.mode;
        hull_begin = std::min(hull_begin, seg.error_begin);
        hull_end = std::max(hull_end, seg.error_end);
      }
      if (!final_seg)
        carry_->trim_before(std::max<int64_t>(plan.next_begin - base, 1) - 1);
    }
    if (segments != nullptr) segments->push_back(seg);
    if (!final_seg) break;  /* the still-running sequence is the last one */
    carry_.reset();
    cur_skipped_ = false;
    ++cur_seq_;
  }

  consumed_ = plan.end;
  ++window_index_;
  if (error_segments == 1) {
    merged.mode = single_mode;
  } else if (error_segments >= 2) {
    merged.mode = WindowErrors::Mode::kMixed;
  }
  if (error_segments > 0) {
    merged.error_begin = hull_begin;
    merged.error_end = hull_end;
  }
  return merged;
}

void TrainingStream::reset() {
  consumed_ = 0;
  window_index_ = 1;
  cur_seq_ = 0;
  carry_.reset();
  cur_skipped_ = false;
}

std::vector<TrainingStream> build_streams(const std::vector<SequenceData>& dataset,
                                          int input_dim, int n_labels,
                                          int n_streams, uint64_t order_seed,
                                          int64_t gap_frames) {
  check(!dataset.empty(), "dataset must not be empty");
  check(n_streams >= 1, "need at least one stream");
  check(gap_frames >= 0, "gap length must be nonnegative");

  /* In-place Fisher-Yates driven by splitmix64 so the order is identical
     across standard libraries and platforms. */
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});
  uint64_t s = order_seed ? order_seed : 0x9e3779b97f4a7c15ULL;
  for (size_t i = order.size() - 1; i > 0; --i) {
    s = splitmix64(s);
    std::swap(order[i], order[s % (i + 1)]);
  }

  std::vector<TrainingStream> streams;
  streams.reserve(n_streams);
  for (int k = 0; k < n_streams; ++k)
    streams.emplace_back(input_dim, n_labels);
  for (size_t i = 0; i < order.size(); ++i) {
    TrainingStream& stream = streams[i % n_streams];
    if (!stream.empty() && gap_frames > 0) stream.append_gap(gap_frames);
    stream.append_sequence(dataset[order[i]], order[i]);
  }
  int empty = 0;
  for (const TrainingStream& stream : streams)
    if (stream.empty()) ++empty;
  if (empty > 0)
    log_info("build_streams: " + std::to_string(empty) +
             " of " + std::to_string(n_streams) + " streams are empty");
  return streams;
}

std::vector<double> continuous_forward_init(const double* y_row,
                                            const ExtendedSeq& z_ext) {
  std::vector<double> row(z_ext.size(), kLogZero);
  row[0] = y_row[kBlank];
  return row;
}

double ctc_tr_coverage(int64_t T, int64_t unroll, int64_t step, int64_t offset) {
  check(T >= 1, "sequence length must be positive");
  check(step >= 1 && unroll >= step, "unroll must be at least the step");
  check(offset >= 0 && offset < step, "offset must lie in [0, step)");
  const int64_t s_end = offset + T;                   /* stream frame of the last frame */
  const int64_t n_fin = (s_end + step - 1) / step;    /* first window reaching it */
  const int64_t begin = std::max<int64_t>(n_fin * step - unroll + 1, 1);
  const int64_t lo = std::max(begin, offset + 1);
  return static_cast<double>(s_end - lo + 1) / static_cast<double>(T);
}

CoverageReport coverage_report(const std::map<int64_t, int64_t>& length_histogram,
                               int64_t unroll, int64_t step) {
  CoverageReport rep;
  double weight_sum = 0.0, avg_sum = 0.0, max_sum = 0.0;
  for (const auto& [length, count] : length_histogram) {
    if (count <= 0) continue;
    double avg = 0.0, mx = 0.0;
    for (int64_t o = 0; o < step; ++o) {
      const double c = ctc_tr_coverage(length, unroll, step, o);
      avg += c;
      mx = std::max(mx, c);
    }
    avg /= static_cast<double>(step);
    rep.per_length.push_back({length, count, avg, mx});
    const double w = static_cast<double>(count) * static_cast<double>(length);
    weight_sum += w;
    avg_sum += w * avg;
    max_sum += w * mx;
  }
  check(weight_sum > 0.0, "length histogram is empty");
  rep.average = avg_sum / weight_sum;
  rep.maximum = max_sum / weight_sum;
  return rep;
}

}  // namespace octc

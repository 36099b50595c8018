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

/* Continuous training streams: labeled sequences concatenated back to
   back, consumed window by window with the RNN state flowing across
   sequence boundaries.  Also the coverage analytics that describe how
   much of a stream the truncated (final-window) criterion can reach. */

#ifndef OCTC_STREAMING_HPP_
#define OCTC_STREAMING_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "octc/ctc_online.hpp"
#include "octc/labels.hpp"
#include "octc/network.hpp"

namespace octc {

/* One labeled sequence as produced by the dataset layer. */
struct SequenceData {
  std::vector<double> features;  /* n_frames x input_dim, row-major */
  int64_t n_frames = 0;
  LabelSeq labels;
};

/* Boundary-table row: where a sequence lives inside its stream. */
struct SequenceEntry {
  int64_t start = 0;        /* stream frame of the first frame, 1-based */
  int64_t end = 0;          /* stream frame of the last frame */
  LabelSeq labels;
  size_t dataset_index = 0; /* position in the source dataset */
  bool is_gap = false;      /* synthetic silence between sequences */

  int64_t frames() const { return end - start + 1; }
};

/* The per-sequence piece of one stream window. */
struct WindowSegment {
  size_t seq_index = 0;             /* into the boundary table */
  int64_t begin = 0, end = 0;       /* stream frames backing the segment */
  int64_t error_begin = 1, error_end = 0;  /* empty when begin > end */
  WindowErrors::Mode mode = WindowErrors::Mode::kNone;
  bool degenerate = false;          /* p = 0 despite a feasible target */
  bool skipped = false;             /* target cannot fit the sequence */
  double log_prob = kLogZero;
};

/* A continuous stream plus the cursor state of its window schedule.
   Window n covers stream frames [max(1, n h' - h + 1), min(n h', T)];
   advance_window() turns one such window into error rows, splitting at
   sequence boundaries: sequences that end inside the window are
   finalized with the truncated criterion, the one still running gets
   the prefix (EM) criterion, and every later sequence starts with a
   blank-constrained forward init. */
class TrainingStream {
 public:
  TrainingStream(int input_dim, int n_labels)
      : input_dim_(input_dim), n_labels_(n_labels) {}

  void append_sequence(const SequenceData& seq, size_t dataset_index);
  void append_gap(int64_t n_frames);

  int input_dim() const { return input_dim_; }
  int n_labels() const { return n_labels_; }
  bool empty() const { return entries_.empty(); }
  int64_t total_frames() const { return total_frames_; }
  const std::vector<SequenceEntry>& boundaries() const { return entries_; }
  /* Feature row of stream frame t (1-based); rows are contiguous. */
  const double* frame(int64_t t) const {
    return features_.data() + (t - 1) * input_dim_;
  }

  /* Cursor. */
  int64_t frames_consumed() const { return consumed_; }
  int64_t next_window_index() const { return window_index_; }
  bool finished() const { return consumed_ >= total_frames_; }
  RnnState& rnn_state() { return rnn_state_; }
  int64_t skipped_sequences() const { return skipped_; }
  int64_t degenerate_windows() const { return degenerate_; }

  /* Consume one window. y must cover stream frames [plan.begin,
     plan.end] and plan must be the cursor's next window. Returns
     error rows over exactly that span (zeros where nothing is
     eligible); per-sequence detail lands in *segments if given. */
  WindowErrors advance_window(const SoftmaxSeq& y, const WindowPlan& plan,
                              bool allow_em,
                              std::vector<WindowSegment>* segments = nullptr);

  /* Rewind the cursor for another pass; the caller owns re-seeding
     rnn_state(). Sequences and counters of past skips are kept. */
  void reset();

 private:
  int input_dim_;
  int n_labels_;
  std::vector<double> features_;
  std::vector<SequenceEntry> entries_;
  int64_t total_frames_ = 0;

  int64_t consumed_ = 0;
  int64_t window_index_ = 1;
  size_t cur_seq_ = 0;                /* first sequence not yet finalized */
  std::unique_ptr<CtcCarry> carry_;   /* forward state of cur_seq_ */
  bool cur_skipped_ = false;
  RnnState rnn_state_;
  int64_t skipped_ = 0;
  int64_t degenerate_ = 0;
};

/* Shuffles the dataset by seed and deals sequences round-robin into
   n_streams streams. Surplus streams (more streams than sequences) come
   back empty. gap_frames > 0 inserts that many zero-feature,
   empty-target frames between consecutive sequences. */
std::vector<TrainingStream> build_streams(const std::vector<SequenceData>& dataset,
                                          int input_dim, int n_labels,
                                          int n_streams, uint64_t order_seed,
                                          int64_t gap_frames = 0);

/* Forward-variable row for the first frame of a mid-stream sequence:
   only the leading blank position carries mass, so no path may open
   with a label and boundaries stay blank-separable. */
std::vector<double> continuous_forward_init(const double* y_row,
                                            const ExtendedSeq& z_ext);

/* Fraction of a length-T sequence reachable by the truncated
   (final-window) criterion alone when the sequence starts at the given
   offset within the window grid (0 <= offset < step). Closed form. */
double ctc_tr_coverage(int64_t T, int64_t unroll, int64_t step, int64_t offset);

/* Coverage aggregated over a histogram of sequence lengths: per length,
   the exact average over uniformly distributed offsets and the best
   single offset; aggregates weight every sequence by its frames. */
struct CoverageReport {
  struct PerLength {
    int64_t length = 0;
    int64_t count = 0;
    double average = 0.0;
    double maximum = 0.0;
  };
  std::vector<PerLength> per_length;
  double average = 0.0;
  double maximum = 0.0;
};

CoverageReport coverage_report(const std::map<int64_t, int64_t>& length_histogram,
                               int64_t unroll, int64_t step);

}  // namespace octc

#endif  /* OCTC_STREAMING_HPP_ */

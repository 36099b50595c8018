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

#ifndef OCTC_NETWORK_HPP_
#define OCTC_NETWORK_HPP_

#include <deque>
#include <string>
#include <vector>

#include "octc/ctc_online.hpp"

namespace octc {

struct NetworkConfig {
  int input_dim = 0;
  int layers = 1;        /* stacked unidirectional LSTM layers */
  int cells = 0;         /* cells per layer */
  int output_dim = 0;    /* |L'| */
  double dropout = 0.0;  /* rate on non-recurrent connections only */
  uint64_t seed = 1;
};

/* Named view into the flat parameter vector. Biases have cols == 1. */
struct ParamSlice {
  std::string name;
  size_t offset = 0;
  int rows = 0;
  int cols = 1;
  size_t size() const { return static_cast<size_t>(rows) * cols; }
};

/* Hidden and cell activations per layer; carried across windows and,
   within a stream, across sequence boundaries. */
struct RnnState {
  std::vector<std::vector<double>> h, c;
};

/* Everything the backward pass needs about one frame, self-contained:
   xh is the concatenated (masked) layer input and previous hidden
   vector, c_prev the previous cell state. */
struct FrameRecord {
  std::vector<std::vector<double>> xh;      /* per layer, fan_in + cells */
  std::vector<std::vector<double>> gi, gf, gg, go;  /* gate activations */
  std::vector<std::vector<double>> c, c_prev;
  std::vector<std::vector<double>> h;
  std::vector<std::vector<double>> in_mask; /* dropout; empty = ones */
  std::vector<double> out_mask;
  std::vector<double> top_masked;           /* output-layer input */
  std::vector<double> logy;                 /* log-softmax row */
};

/* Sliding window of per-frame records; the live-frame count is the
   memory proxy checked by the trainer tests. */
class ActivationTape {
 public:
  void append(FrameRecord&& rec) { records_.push_back(std::move(rec)); }
  void trim_before(int64_t keep_from);

  int64_t first_frame() const { return first_frame_; }
  int64_t last_frame() const { return first_frame_ + size() - 1; }
  int64_t size() const { return static_cast<int64_t>(records_.size()); }

  const FrameRecord& record(int64_t t) const { return records_[t - first_frame_]; }

  /* Log-softmax rows [lo, hi] as a softmax run for the CTC windows. */
  SoftmaxSeq window_logp(int64_t lo, int64_t hi) const;

 private:
  int64_t first_frame_ = 1;
  std::deque<FrameRecord> records_;
};

class LstmNetwork {
 public:
  explicit LstmNetwork(NetworkConfig cfg);

  const NetworkConfig& config() const { return cfg_; }
  size_t param_count() const { return total_; }
  const std::vector<ParamSlice>& layout() const { return slices_; }

  /* Weights uniform in [-0.1, 0.1] from the config seed; forget-gate
     biases 1, all other biases 0. Same seed, same bits. */
  std::vector<double> init_params() const;

  RnnState initial_state() const;

  /* Run n_frames rows of input (n_frames x input_dim, row-major)
     through the stack. state advances in place; records are appended to
     tape when given; y_out, when given, receives the log-softmax rows.
     Dropout masks are drawn per (seed, mask_stream, absolute frame) and
     applied only in train mode. */
  void forward(const std::vector<double>& params, const double* frames,
               int64_t n_frames, int64_t first_frame, RnnState* state,
               ActivationTape* tape, SoftmaxSeq* y_out, bool train_mode,
               uint64_t mask_stream) const;

  /* Truncated backward over tape frames [begin, end]: output errors are
     dL/da rows covering that window; nothing flows in from beyond end
     and nothing flows out past begin. Parameter gradients accumulate
     into grad (size param_count). */
  void backward(const std::vector<double>& params, const ActivationTape& tape,
                const WindowErrors& errors, int64_t begin, int64_t end,
                std::vector<double>* grad) const;

 private:
  int fan_in(int layer) const { return layer == 0 ? cfg_.input_dim : cfg_.cells; }

  NetworkConfig cfg_;
  std::vector<ParamSlice> slices_;
  size_t total_ = 0;
  /* offsets resolved once: per layer per gate W/b, then the output pair */
  std::vector<size_t> w_off_, b_off_;  /* layer * 4 + gate */
  size_t out_w_off_ = 0, out_b_off_ = 0;
};

}  // namespace octc

#endif  // OCTC_NETWORK_HPP_

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

#ifndef OCTC_TESTS_HELPERS_HPP_
#define OCTC_TESTS_HELPERS_HPP_

#include <random>
#include <vector>

#include "octc/ctc_core.hpp"
#include "octc/labels.hpp"
#include "octc/log_math.hpp"

namespace octc::testing {

/* Random normalized log-distribution rows from logits in [-2, 2]. */
inline SoftmaxSeq random_softmax(int64_t frames, int width, std::mt19937_64& rng,
                                 int64_t first_frame = 1) {
  std::uniform_real_distribution<double> logit(-2.0, 2.0);
  SoftmaxSeq y(first_frame, frames, width);
  for (int64_t t = 0; t < frames; ++t) {
    double* row = y.logp.data() + t * width;
    for (int k = 0; k < width; ++k) row[k] = logit(rng);
    const double lse = log_sum(row, width);
    for (int k = 0; k < width; ++k) row[k] -= lse;
  }
  return y;
}

/* Random target over labels 1..n_labels, resampled until it fits in T
   frames (repeats need an intervening blank). */
inline LabelSeq random_target(int len, int n_labels, int64_t T,
                              std::mt19937_64& rng) {
  for (;;) {
    LabelSeq z(len);
    for (int i = 0; i < len; ++i)
      z[i] = 1 + static_cast<int>(rng() % static_cast<uint64_t>(n_labels));
    if (ExtendedSeq(z).min_path_frames() <= T) return z;
  }
}

/* Build log-softmax rows from a flat pre-softmax activation vector;
   used to express losses as functions of activations for finite
   differences. */
inline SoftmaxSeq softmax_of(const std::vector<double>& a, int64_t frames,
                             int width, int64_t first_frame = 1) {
  SoftmaxSeq y(first_frame, frames, width);
  for (int64_t t = 0; t < frames; ++t) {
    const double* in = a.data() + t * width;
    double* out = y.logp.data() + t * width;
    const double lse = log_sum(in, width);
    for (int k = 0; k < width; ++k) out[k] = in[k] - lse;
  }
  return y;
}

}  // namespace octc::testing

#endif  // OCTC_TESTS_HELPERS_HPP_

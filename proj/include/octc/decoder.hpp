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

/* Decoders that turn softmax sequences into label sequences, plus the
   Levenshtein alignment used to score them. */

#ifndef OCTC_DECODER_HPP_
#define OCTC_DECODER_HPP_

#include <cstdint>

#include "octc/ctc_core.hpp"
#include "octc/labels.hpp"

namespace octc {

/* Picks the argmax label per frame (ties go to the lowest id, so the blank
   wins against any label) and collapses the resulting path. */
LabelSeq best_path_decode(const SoftmaxSeq& y);

struct BeamHyp {
  LabelSeq labels;
  double log_prob = kLogZero;  /* total probability mass of `labels` */
};

/* Prefix beam search.  Each surviving prefix tracks the probability of
   ending in a blank and of ending in its last label; after the last frame
   the prefix with the largest combined mass wins.  Equal-mass candidates
   are resolved toward the lexicographically smaller label sequence, both
   when pruning and when picking the winner.  With a beam wide enough to
   hold every reachable prefix the search is exhaustive and `log_prob` is
   the exact labeling probability. */
BeamHyp beam_search_decode(const SoftmaxSeq& y, int beam_width);

/* Counts from a minimum-cost alignment of hyp against ref. */
struct EditOps {
  int64_t sub = 0;
  int64_t ins = 0;  /* tokens in hyp with no ref counterpart */
  int64_t del = 0;  /* tokens in ref with no hyp counterpart */

  int64_t total() const { return sub + ins + del; }
};

EditOps edit_distance(const LabelSeq& ref, const LabelSeq& hyp);

/* (S + I + D) / max(1, |ref|).  Can exceed 1. */
double label_error_rate(const EditOps& ops, size_t ref_tokens);

}  // namespace octc

#endif  /* OCTC_DECODER_HPP_ */

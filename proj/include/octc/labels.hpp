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

#ifndef OCTC_LABELS_HPP_
#define OCTC_LABELS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "octc/common.hpp"

namespace octc {

/* Label ids are dense indices into the output distribution:
   0 is the blank, 1..|L| are the real labels. A target labeling never
   contains the blank. */
constexpr int kBlank = 0;

using LabelSeq = std::vector<int>;

class Alphabet {
 public:
  /* tokens = the non-blank label inventory L, distinct and non-empty. */
  explicit Alphabet(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }  /* |L|  */
  int extended_size() const { return size() + 1; }               /* |L'| */

  int id_of(const std::string& token) const;       /* throws on unknown */
  const std::string& token(int id) const;          /* id in [1, |L|]   */

  LabelSeq encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> decode(const LabelSeq& seq) const;

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
};

/* The extended target z': blanks interleaved around the labels of z, so
   |z'| = 2|z| + 1 and (1-based) odd positions are blanks, position 2i is
   z_i. Lattice positions u in the public surface are 1-based; u = 0 and
   u = |z'| + 1 denote the zero-probability boundary. */
class ExtendedSeq {
 public:
  explicit ExtendedSeq(LabelSeq z);

  int size() const { return static_cast<int>(ext_.size()); }   /* |z'| */
  int label_at(int u) const { return ext_[u - 1]; }            /* 1-based */

  /* Earliest predecessor position feeding u in the forward recursion:
     u-1 when z'_u is blank or equals z'_{u-2}, else u-2 (the skip).
     Clamped to 0 (boundary) from below. */
  int prev_start(int u) const;
  /* Latest successor position fed by u in the backward recursion; the
     mirror image of prev_start. Clamped to |z'|+1 (boundary) from above. */
  int next_end(int u) const;

  /* 1-based positions u with z'_u == label (possibly empty). */
  std::vector<int> positions_of(int label) const;

  /* Shortest path length that can produce z (repeated labels need an
     intervening blank). A target is reachable only if T >= this. */
  int min_path_frames() const;

  const LabelSeq& base() const { return z_; }

 private:
  LabelSeq z_;
  std::vector<int> ext_;  /* 0-based storage of z' */
};

/* Validates ids (blank or out-of-range ids are invalid-label errors)
   against n_labels = |L| and builds z'. */
ExtendedSeq extend_labels(const LabelSeq& z, int n_labels);

/* The collapse mapping: merge repeats, then drop blanks. */
LabelSeq collapse_path(const std::vector<int>& path);

/* (f(u), g(u)) for 1-based u in [1, |z'|]; throws outside that range. */
std::pair<int, int> transitions(const ExtendedSeq& z_ext, int u);

}  // namespace octc

#endif  // OCTC_LABELS_HPP_

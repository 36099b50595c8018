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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "octc/decoder.hpp"
#include "octc/verify.hpp"

using namespace octc;

namespace {

/* Independent memoized Levenshtein distance (plain recursion, no counts),
   used to audit the DP total. */
int64_t lev_memo(const LabelSeq& a, const LabelSeq& b, size_t i, size_t j,
                 std::map<std::pair<size_t, size_t>, int64_t>& memo) {
  if (i == a.size()) return static_cast<int64_t>(b.size() - j);
  if (j == b.size()) return static_cast<int64_t>(a.size() - i);
  const auto key = std::make_pair(i, j);
  const auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  int64_t best = lev_memo(a, b, i + 1, j + 1, memo) + (a[i] != b[j] ? 1 : 0);
  best = std::min(best, lev_memo(a, b, i + 1, j, memo) + 1);
  best = std::min(best, lev_memo(a, b, i, j + 1, memo) + 1);
  memo[key] = best;
  return best;
}

int64_t lev(const LabelSeq& a, const LabelSeq& b) {
  std::map<std::pair<size_t, size_t>, int64_t> memo;
  return lev_memo(a, b, 0, 0, memo);
}

LabelSeq random_labels(std::mt19937_64& rng, int max_len, int n_labels) {
  LabelSeq out(rng() % (max_len + 1));
  for (int& v : out) v = 1 + static_cast<int>(rng() % n_labels);
  return out;
}

}  // namespace

TEST_CASE("best-path decode picks per-frame argmax and collapses") {
  /* Path b,a,a,b,a,b,b collapses to a,a. */
  SoftmaxSeq y = SoftmaxSeq::from_probs({{0.8, 0.1, 0.1},
                                            {0.1, 0.8, 0.1},
                                            {0.2, 0.7, 0.1},
                                            {0.6, 0.2, 0.2},
                                            {0.3, 0.5, 0.2},
                                            {0.9, 0.05, 0.05},
                                            {0.5, 0.25, 0.25}});
  CHECK(best_path_decode(y) == LabelSeq{1, 1});
}

TEST_CASE("best-path ties resolve to the lowest label id") {
  /* Frame 1 ties blank with label 1: the blank (id 0) wins, so the decode
     is empty. Frame 2 ties labels 1 and 2: label 1 wins. */
  SoftmaxSeq y = SoftmaxSeq::from_probs({{0.4, 0.4, 0.2},
                                            {0.2, 0.4, 0.4}});
  CHECK(best_path_decode(y) == LabelSeq{1});
}

TEST_CASE("beam search beats best-path on the classic two-frame case") {
  /* y_t = (0.6, 0.4) for both frames. The single best path is
     (b,b) with 0.36, collapsing to the empty labeling; but the labeling
     {1} collects (1,1) + (1,b) + (b,1) = 0.16 + 0.24 + 0.24 = 0.64. */
  SoftmaxSeq y = SoftmaxSeq::from_probs({{0.6, 0.4}, {0.6, 0.4}});
  CHECK(best_path_decode(y).empty());
  const BeamHyp hyp = beam_search_decode(y, 8);
  CHECK(hyp.labels == LabelSeq{1});
  CHECK(hyp.log_prob == doctest::Approx(std::log(0.64)).epsilon(1e-12));
}

TEST_CASE("exhaustive beam equals the enumeration oracle") {
  std::mt19937_64 rng(20260823);
  for (int rep = 0; rep < 60; ++rep) {
    const int T = 1 + static_cast<int>(rng() % 4);
    const int width = 2 + static_cast<int>(rng() % 2);  /* 1 or 2 labels */
    SoftmaxSeq y = testing::random_softmax(T, width, rng);
    /* At most sum_{l<=T} (width-1)^l prefixes exist; 64 covers all. */
    const BeamHyp hyp = beam_search_decode(y, 64);
    const auto [best, p] = enum_best_labeling(y);
    CHECK(hyp.labels == best);
    CHECK(std::exp(hyp.log_prob) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("exhaustive beam mass matches every labeling's enumerated mass") {
  std::mt19937_64 rng(7);
  SoftmaxSeq y = testing::random_softmax(4, 3, rng);
  const BeamHyp hyp = beam_search_decode(y, 1 << 10);
  const std::map<LabelSeq, double> dist = enum_labeling_distribution(y);
  const double p = dist.at(hyp.labels);
  CHECK(std::exp(hyp.log_prob) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("beam score is monotone in the beam width") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 25; ++rep) {
    const int T = 2 + static_cast<int>(rng() % 5);
    SoftmaxSeq y = testing::random_softmax(T, 4, rng);
    double prev = -1e300;
    for (int w : {1, 2, 4, 8, 16, 64}) {
      const BeamHyp hyp = beam_search_decode(y, w);
      CHECK(hyp.log_prob >= prev - 1e-12);
      prev = hyp.log_prob;
    }
  }
}

TEST_CASE("exhaustive beam score equals the forward probability of its output") {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 20; ++rep) {
    SoftmaxSeq y = testing::random_softmax(4, 3, rng);
    const BeamHyp hyp = beam_search_decode(y, 1 << 10);
    if (hyp.labels.empty()) {
      /* Forward over the blank-only extension. */
      const ExtendedSeq z_ext = extend_labels({}, 2);
      CHECK(hyp.log_prob ==
            doctest::Approx(seq_log_prob(y, z_ext)).epsilon(1e-10));
    } else {
      const ExtendedSeq z_ext = extend_labels(hyp.labels, 2);
      CHECK(hyp.log_prob ==
            doctest::Approx(seq_log_prob(y, z_ext)).epsilon(1e-10));
    }
  }
}

TEST_CASE("near-one-hot frames decode to the collapsed path") {
  const std::vector<int> path = {0, 1, 1, 0, 2, 2, 0, 1};
  std::vector<std::vector<double>> rows;
  for (int p : path) {
    std::vector<double> r(3, 0.005);
    r[p] = 0.99;
    rows.push_back(r);
  }
  SoftmaxSeq y = SoftmaxSeq::from_probs(rows);
  const LabelSeq want = collapse_path(path);
  CHECK(best_path_decode(y) == want);
  CHECK(beam_search_decode(y, 16).labels == want);
}

TEST_CASE("beam width one still returns a valid scored hypothesis") {
  std::mt19937_64 rng(5);
  SoftmaxSeq y = testing::random_softmax(6, 4, rng);
  const BeamHyp hyp = beam_search_decode(y, 1);
  CHECK(hyp.log_prob > kLogZero);
  CHECK(hyp.log_prob <= 0.0);
  for (int v : hyp.labels) {
    CHECK(v >= 1);
    CHECK(v <= 3);
  }
}

TEST_CASE("edit distance on the classic kitten/sitting pair") {
  /* kitten -> sitting: substitute k->s and e->i, insert g. */
  const std::map<char, int> id = {{'k', 1}, {'i', 2}, {'t', 3}, {'e', 4},
                                  {'n', 5}, {'s', 6}, {'g', 7}};
  LabelSeq ref, hyp;
  for (char c : std::string("kitten")) ref.push_back(id.at(c));
  for (char c : std::string("sitting")) hyp.push_back(id.at(c));
  const EditOps ops = edit_distance(ref, hyp);
  CHECK(ops.sub == 2);
  CHECK(ops.ins == 1);
  CHECK(ops.del == 0);
  CHECK(ops.total() == 3);
  CHECK(label_error_rate(ops, ref.size()) == doctest::Approx(0.5));
}

TEST_CASE("edit distance boundary cases") {
  CHECK(edit_distance({}, {}).total() == 0);
  const EditOps all_ins = edit_distance({}, {1, 2, 3});
  CHECK(all_ins.ins == 3);
  CHECK(all_ins.total() == 3);
  const EditOps all_del = edit_distance({1, 2, 3}, {});
  CHECK(all_del.del == 3);
  CHECK(all_del.total() == 3);
  CHECK(edit_distance({1, 2, 3}, {1, 2, 3}).total() == 0);
  /* Empty reference divides by max(1, 0). */
  CHECK(label_error_rate(all_ins, 0) == doctest::Approx(3.0));
}

TEST_CASE("edit distance agrees with an independent memoized oracle") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    const LabelSeq a = random_labels(rng, 8, 3);
    const LabelSeq b = random_labels(rng, 8, 3);
    const EditOps ops = edit_distance(a, b);
    CHECK(ops.total() == lev(a, b));
    /* Swapping arguments swaps insertions and deletions. */
    const EditOps rev = edit_distance(b, a);
    CHECK(rev.total() == ops.total());
    CHECK(rev.ins == ops.del);
    CHECK(rev.del == ops.ins);
    CHECK(rev.sub == ops.sub);
  }
}

TEST_CASE("edit distance is a metric on label sequences") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const LabelSeq a = random_labels(rng, 6, 2);
    const LabelSeq b = random_labels(rng, 6, 2);
    const LabelSeq c = random_labels(rng, 6, 2);
    const int64_t ab = edit_distance(a, b).total();
    const int64_t bc = edit_distance(b, c).total();
    const int64_t ac = edit_distance(a, c).total();
    CHECK(edit_distance(a, a).total() == 0);
    CHECK(ac <= ab + bc);
    if (a != b) CHECK(ab > 0);
  }
}

TEST_CASE("length difference lower-bounds the edit distance") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const LabelSeq a = random_labels(rng, 10, 4);
    const LabelSeq b = random_labels(rng, 10, 4);
    const EditOps ops = edit_distance(a, b);
    const int64_t diff = static_cast<int64_t>(a.size()) -
                         static_cast<int64_t>(b.size());
    CHECK(ops.total() >= std::abs(diff));
    /* Alignment bookkeeping must be consistent with the lengths. */
    CHECK(static_cast<int64_t>(b.size()) - ops.ins + ops.del ==
          static_cast<int64_t>(a.size()));
  }
}

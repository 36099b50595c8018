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

#include "octc/decoder.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "octc/log_math.hpp"

namespace octc {

LabelSeq best_path_decode(const SoftmaxSeq& y) {
  std::vector<int> path(y.frames);
  for (int64_t t = y.first_frame; t < y.first_frame + y.frames; ++t) {
    const double* row = y.row(t);
    int best = 0;
    for (int k = 1; k < y.width; ++k)
      if (row[k] > row[best]) best = k;
    path[t - y.first_frame] = best;
  }
  return collapse_path(path);
}

namespace {

/* Blank-mass / label-mass pair for one prefix. */
struct Mass {
  double blank = kLogZero;
  double label = kLogZero;

  double total() const { return log_add(blank, label); }
};

}  // namespace

BeamHyp beam_search_decode(const SoftmaxSeq& y, int beam_width) {
  check(beam_width >= 1, "beam width must be at least 1");
  /* std::map keeps prefixes in lexicographic order, which makes every
     tie-break below deterministic. */
  std::map<LabelSeq, Mass> beam;
  beam[{}].blank = 0.0;  /* empty prefix, certain before the first frame */

  for (int64_t t = y.first_frame; t < y.first_frame + y.frames; ++t) {
    const double* row = y.row(t);
    std::map<LabelSeq, Mass> next;
    for (const auto& [prefix, mass] : beam) {
      const double total = mass.total();
      /* Blank keeps the prefix and seals its last label. */
      {
        double& b = next[prefix].blank;
        b = log_add(b, total + row[kBlank]);
      }
      for (int k = 1; k < y.width; ++k) {
        const double ly = row[k];
        if (!prefix.empty() && prefix.back() == k) {
          /* Repeat without a separating blank extends the same token. */
          double& same = next[prefix].label;
          same = log_add(same, mass.label + ly);
          /* After a blank the repeat starts a fresh token. */
          LabelSeq grown = prefix;
          grown.push_back(k);
          double& fresh = next[grown].label;
          fresh = log_add(fresh, mass.blank + ly);
        } else {
          LabelSeq grown = prefix;
          grown.push_back(k);
          double& m = next[grown].label;
          m = log_add(m, total + ly);
        }
      }
    }
    if (static_cast<int>(next.size()) > beam_width) {
      /* Keep the beam_width best prefixes; ties prefer the
         lexicographically smaller prefix (already the map order, so a
         stable sort on score alone preserves it). */
      std::vector<std::pair<double, const LabelSeq*>> ranked;
      ranked.reserve(next.size());
      for (const auto& [prefix, mass] : next)
        ranked.emplace_back(mass.total(), &prefix);
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      std::map<LabelSeq, Mass> pruned;
      for (int i = 0; i < beam_width; ++i)
        pruned.emplace(*ranked[i].second, next[*ranked[i].second]);
      next = std::move(pruned);
    }
    beam = std::move(next);
  }

  BeamHyp best;
  for (const auto& [prefix, mass] : beam) {
    const double total = mass.total();
    if (total > best.log_prob) {  /* strict: first (lex-smaller) entry wins ties */
      best.log_prob = total;
      best.labels = prefix;
    }
  }
  return best;
}

EditOps edit_distance(const LabelSeq& ref, const LabelSeq& hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j) {
      const int64_t diag = d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1] ? 1 : 0);
      const int64_t up = d[i - 1][j] + 1;    /* delete ref token */
      const int64_t left = d[i][j - 1] + 1;  /* insert hyp token */
      d[i][j] = std::min({diag, up, left});
    }

  /* Trace one minimum-cost alignment; prefer diagonal moves so matched
     regions stay aligned, then deletions, then insertions. */
  EditOps ops;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1] ? 1 : 0)) {
      if (ref[i - 1] != hyp[j - 1]) ++ops.sub;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++ops.del;
      --i;
    } else {
      ++ops.ins;
      --j;
    }
  }
  return ops;
}

double label_error_rate(const EditOps& ops, size_t ref_tokens) {
  return static_cast<double>(ops.total()) /
         static_cast<double>(std::max<size_t>(1, ref_tokens));
}

}  // namespace octc

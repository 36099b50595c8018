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

#include "octc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace octc {

namespace {

/* exp()-ed copy of y, so everything below runs on plain probabilities. */
std::vector<std::vector<double>> linear_probs(const SoftmaxSeq& y) {
  std::vector<std::vector<double>> p(y.frames, std::vector<double>(y.width));
  for (int64_t t = 0; t < y.frames; ++t)
    for (int k = 0; k < y.width; ++k)
      p[t][k] = std::exp(y.logp[t * y.width + k]);
  return p;
}

void guard_instance(const SoftmaxSeq& y) {
  check(y.frames >= 1 && y.width >= 1, "empty enumeration instance");
  const double paths = std::pow(static_cast<double>(y.width),
                                static_cast<double>(y.frames));
  check(paths <= kMaxEnumPaths, "enumeration instance too large");
}

/* Odometer over all width^T paths. */
template <typename Fn>
void for_each_path(int64_t T, int width, Fn&& fn) {
  std::vector<int> path(T, 0);
  for (;;) {
    fn(path);
    int64_t pos = T - 1;
    while (pos >= 0 && ++path[pos] == width) path[pos--] = 0;
    if (pos < 0) break;
  }
}

/* Allowed lattice moves, written out directly from the path topology:
   stay, advance by one, or skip over a blank when the two labels differ. */
bool transition_allowed(const ExtendedSeq& z, int u, int v) {
  if (v < 1 || v > z.size()) return false;
  if (v == u || v == u + 1) return true;
  if (v == u + 2) return z.label_at(v) != kBlank && z.label_at(v) != z.label_at(u);
  return false;
}

}  // namespace

double enum_seq_prob(const SoftmaxSeq& y, const LabelSeq& z) {
  guard_instance(y);
  const auto p = linear_probs(y);
  double total = 0.0;
  for_each_path(y.frames, y.width, [&](const std::vector<int>& path) {
    if (collapse_path(path) != z) return;
    double prob = 1.0;
    for (int64_t t = 0; t < y.frames; ++t) prob *= p[t][path[t]];
    total += prob;
  });
  return total;
}

double enum_prefix_prob(const SoftmaxSeq& y, const LabelSeq& z) {
  guard_instance(y);
  const auto p = linear_probs(y);
  double total = 0.0;
  for_each_path(y.frames, y.width, [&](const std::vector<int>& path) {
    const LabelSeq collapsed = collapse_path(path);
    if (collapsed.size() > z.size()) return;
    if (!std::equal(collapsed.begin(), collapsed.end(), z.begin())) return;
    double prob = 1.0;
    for (int64_t t = 0; t < y.frames; ++t) prob *= p[t][path[t]];
    total += prob;
  });
  return total;
}

std::map<LabelSeq, double> enum_labeling_distribution(const SoftmaxSeq& y) {
  guard_instance(y);
  const auto p = linear_probs(y);
  std::map<LabelSeq, double> dist;
  for_each_path(y.frames, y.width, [&](const std::vector<int>& path) {
    double prob = 1.0;
    for (int64_t t = 0; t < y.frames; ++t) prob *= p[t][path[t]];
    dist[collapse_path(path)] += prob;
  });
  return dist;
}

std::pair<LabelSeq, double> enum_best_labeling(const SoftmaxSeq& y) {
  const auto dist = enum_labeling_distribution(y);
  LabelSeq best;
  double best_prob = -1.0;
  for (const auto& [labeling, prob] : dist) {
    if (prob > best_prob) {  /* map order breaks ties toward lex-smaller */
      best = labeling;
      best_prob = prob;
    }
  }
  return {best, best_prob};
}

std::vector<std::vector<double>> beta_tau_m_lattice(const SoftmaxSeq& y,
                                                    const ExtendedSeq& z_ext,
                                                    int m) {
  check(m >= 0 && 2 * m + 1 <= z_ext.size() + 1, "prefix length out of range");
  const auto p = linear_probs(y);
  const int width = z_ext.size();
  const int64_t tau = y.frames;
  std::vector<std::vector<double>> beta(tau, std::vector<double>(width, 0.0));
  for (int u : {2 * m, 2 * m + 1})
    if (u >= 1 && u <= width) beta[tau - 1][u - 1] = 1.0;
  for (int64_t t = tau - 2; t >= 0; --t) {
    for (int u = 1; u <= width; ++u) {
      double s = 0.0;
      for (int v = u; v <= u + 2; ++v)
        if (transition_allowed(z_ext, u, v))
          s += beta[t + 1][v - 1] * p[t + 1][z_ext.label_at(v)];
      beta[t][u - 1] = s;
    }
  }
  return beta;
}

std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& fn,
                                const std::vector<double>& x, double eps) {
  std::vector<double> grad(x.size());
  std::vector<double> probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double hi = fn(probe);
    probe[i] = x[i] - eps;
    const double lo = fn(probe);
    probe[i] = x[i];
    grad[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

double simulate_tr_coverage(int64_t T, int64_t unroll, int64_t step, int64_t offset) {
  check(T >= 1, "sequence length must be positive");
  check(step >= 1 && unroll >= step, "need unroll >= step >= 1");
  check(offset >= 0 && offset < step, "offset must lie in [0, step)");
  const int64_t s_start = offset + 1;
  const int64_t s_end = offset + T;
  std::vector<char> covered(T, 0);
  for (int64_t n = 1;; ++n) {
    if (n * step < s_end) continue;  /* sequence end not yet reached */
    int64_t lo = std::max<int64_t>(n * step - unroll + 1, 1);
    lo = std::max(lo, s_start);
    for (int64_t t = lo; t <= s_end; ++t) covered[t - s_start] = 1;
    break;
  }
  int64_t count = 0;
  for (char c : covered) count += c;
  return static_cast<double>(count) / static_cast<double>(T);
}

double mc_average_coverage(int64_t T, int64_t unroll, int64_t step,
                           int draws, uint64_t seed) {
  check(draws > 0, "need at least one draw");
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (int i = 0; i < draws; ++i)
    total += simulate_tr_coverage(T, unroll, step,
                                  static_cast<int64_t>(rng() % static_cast<uint64_t>(step)));
  return total / draws;
}

}  // namespace octc

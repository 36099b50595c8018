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
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "octc/ctc_online.hpp"
#include "octc/verify.hpp"

using namespace octc;
using octc::testing::random_softmax;
using octc::testing::random_target;
using octc::testing::softmax_of;

TEST_CASE("window plan formulas") {
  WindowPlan p = plan_window(1, 4, 2, 10);
  CHECK(p.begin == 1);
  CHECK(p.end == 2);
  CHECK(p.prev_end == 0);
  CHECK(p.next_begin == 1);
  CHECK_FALSE(p.is_final);

  p = plan_window(3, 4, 2, 10);
  CHECK(p.begin == 3);
  CHECK(p.end == 6);
  CHECK(p.prev_end == 4);
  CHECK(p.next_begin == 5);
  CHECK_FALSE(p.is_final);

  p = plan_window(5, 4, 2, 10);
  CHECK(p.end == 10);
  CHECK(p.is_final);

  /* short last window */
  p = plan_window(5, 4, 2, 9);
  CHECK(p.begin == 7);
  CHECK(p.end == 9);
  CHECK(p.is_final);

  /* open stream: end keeps growing, never final */
  p = plan_window(7, 4, 2, std::nullopt);
  CHECK(p.end == 14);
  CHECK_FALSE(p.is_final);

  CHECK_THROWS_AS(plan_window(0, 4, 2, 10), Error);
  CHECK_THROWS_AS(plan_window(1, 2, 4, 10), Error);   /* unroll < step */
  CHECK_THROWS_AS(plan_window(6, 4, 2, 10), Error);   /* past the end */
}

TEST_CASE("carry reproduces the unbroken forward pass exactly") {
  std::mt19937_64 rng(41);
  const int64_t T = 12;
  const SoftmaxSeq y = random_softmax(T, 3, rng);
  const LabelSeq z = random_target(3, 2, T, rng);
  const ExtendedSeq ext = extend_labels(z, 2);
  const Lattice whole = forward_range(y, ext);

  CtcCarry carry(ext);
  for (int64_t n = 1; n * 3 <= T; ++n) {
    carry.extend(y, n * 3);
    carry.trim_before(n * 3);  /* keep only the newest row */
  }
  for (int u = 1; u <= ext.size(); ++u)
    CHECK(carry.alpha_row(T)[u - 1] == whole.at(T, u));
  CHECK_THROWS_AS(carry.alpha_row(3), Error);  /* trimmed away */
}

TEST_CASE("single final window equals the full-sequence gradient") {
  std::mt19937_64 rng(43);
  const int64_t T = 6;
  const SoftmaxSeq y = random_softmax(T, 3, rng);
  const LabelSeq z = random_target(2, 2, T, rng);
  const ExtendedSeq ext = extend_labels(z, 2);

  CtcCarry carry(ext);
  const WindowPlan plan = plan_window(1, 8, 8, T);
  const WindowErrors we = ctc_tr_window(y, carry, plan);
  CHECK(we.mode == WindowErrors::Mode::kTr);
  CHECK_FALSE(we.degenerate);

  const CtcGrad full = ctc_gradient(y, ext);
  CHECK(we.log_prob == full.log_prob);
  for (int64_t t = 1; t <= T; ++t)
    for (int k = 0; k < we.width; ++k)
      CHECK(we.row(t)[k] == full.row(t)[k]);  /* identical arithmetic */
}

TEST_CASE("truncated window rows equal the full-gradient rows") {
  /* T=6, unroll 4, step 2: the final window covers frames 3..6. The
     backward pass starting at the true sequence end is the same suffix
     recursion as the full lattice, so rows 3..6 agree bit-for-bit. */
  std::mt19937_64 rng(47);
  const int64_t T = 6;
  const SoftmaxSeq y = random_softmax(T, 3, rng);
  const LabelSeq z = random_target(2, 2, T, rng);
  const ExtendedSeq ext = extend_labels(z, 2);

  CtcCarry carry(ext);
  WindowErrors final_we;
  for (int64_t n = 1;; ++n) {
    const WindowPlan plan = plan_window(n, 4, 2, T);
    SoftmaxSeq window(plan.begin, plan.end - plan.begin + 1, 3);
    std::copy(y.row(plan.begin), y.row(plan.end) + 3, window.logp.begin());
    if (plan.is_final) {
      final_we = ctc_tr_window(window, carry, plan);
      break;
    }
    carry.extend(window, plan.end);
    carry.trim_before(plan.next_begin);
  }
  CHECK(final_we.first_frame == 3);
  CHECK(final_we.frames == 4);
  const CtcGrad full = ctc_gradient(y, ext);
  for (int64_t t = 3; t <= 6; ++t)
    for (int k = 0; k < 3; ++k) CHECK(final_we.row(t)[k] == full.row(t)[k]);
}

TEST_CASE("first em window with unroll = 2*step has no eligible frames") {
  std::mt19937_64 rng(53);
  const SoftmaxSeq y = random_softmax(2, 3, rng);
  const LabelSeq z = random_target(2, 2, 10, rng);
  CtcCarry carry(extend_labels(z, 2));
  const WindowPlan plan = plan_window(1, 4, 2, 10);
  const WindowErrors we = ctc_em_window(y, carry, plan);
  CHECK(we.mode == WindowErrors::Mode::kEm);
  CHECK(we.error_begin > we.error_end);
  for (double v : we.values) CHECK(v == 0.0);
  CHECK(carry.frames_consumed() == 2);  /* alpha still advanced */
}

TEST_CASE("em window errors match finite differences of the prefix loss") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    const int64_t tau = 4;  /* window 2 of unroll 4, step 2 */
    const int width = 3;
    const LabelSeq z = random_target(3, 2, 20, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    std::vector<double> a(tau * width);
    std::uniform_real_distribution<double> logit(-1.5, 1.5);
    for (auto& v : a) v = logit(rng);
    const SoftmaxSeq y = softmax_of(a, tau, width);

    CtcCarry carry(ext);
    const WindowPlan plan = plan_window(2, 4, 2, 20);
    const WindowErrors we = ctc_em_window(y, carry, plan);
    CHECK(we.error_begin == 1);
    CHECK(we.error_end == 2);
    /* frames past the eligible range stay zero */
    for (int64_t t = 3; t <= 4; ++t)
      for (int k = 0; k < width; ++k) CHECK(we.row(t)[k] == 0.0);
    /* eligible rows sum to zero */
    for (int64_t t = 1; t <= 2; ++t) {
      double s = 0.0;
      for (int k = 0; k < width; ++k) s += we.row(t)[k];
      CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
    }

    const auto loss = [&](const std::vector<double>& act) {
      return -prefix_set_log_prob(softmax_of(act, tau, width), ext);
    };
    const std::vector<double> fd = finite_diff(loss, a, 1e-5);
    for (int64_t t = 1; t <= 2; ++t)
      for (int k = 0; k < width; ++k) {
        const double an = we.row(t)[k];
        const double ref = fd[(t - 1) * width + k];
        CHECK(std::fabs(an - ref) <=
              1e-6 * std::max({1.0, std::fabs(an), std::fabs(ref)}));
      }
  }
}

TEST_CASE("prefix mass: one frame") {
  const SoftmaxSeq y = SoftmaxSeq::from_probs({{0.2, 0.5, 0.3}});
  const ExtendedSeq z = extend_labels({1, 2}, 2);
  /* only the empty prefix (blank path) and z1 are reachable in a frame */
  CHECK(prefix_set_log_prob(y, z) ==
        doctest::Approx(std::log(0.2 + 0.5)).epsilon(1e-12));
}

TEST_CASE("prefix mass: two uniform frames, L = {a, c}, z = ac") {
  const SoftmaxSeq y = SoftmaxSeq::uniform(2, 3);
  const ExtendedSeq z = extend_labels({1, 2}, 2);
  CHECK(prefix_set_log_prob(y, z) ==
        doctest::Approx(std::log(5.0 / 9.0)).epsilon(1e-12));
  CHECK(enum_prefix_prob(y, {1, 2}) ==
        doctest::Approx(5.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("prefix mass agrees with enumeration") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t tau = 2 + rng() % 4;
    const SoftmaxSeq y = random_softmax(tau, 3, rng);
    const LabelSeq z = random_target(1 + rng() % 3, 2, 100, rng);
    const double brute = enum_prefix_prob(y, z);
    CHECK(prefix_set_log_prob(y, extend_labels(z, 2)) ==
          doctest::Approx(std::log(brute)).epsilon(1e-10));
  }
}

TEST_CASE("window dispatch covers every frame exactly once") {
  std::mt19937_64 rng(67);
  for (int64_t unroll : {2, 4, 8}) {
    const int64_t step = unroll / 2;
    for (int64_t T = 1; T <= 20; ++T) {
      const SoftmaxSeq y = random_softmax(T, 2, rng);
      const LabelSeq z = {1};  /* reachable at every T >= 1 */
      CtcCarry carry(extend_labels(z, 1));
      std::vector<int> eligible(T + 1, 0);
      for (int64_t n = 1;; ++n) {
        const WindowPlan plan = plan_window(n, unroll, step, T);
        SoftmaxSeq window(plan.begin, plan.end - plan.begin + 1, 2);
        std::copy(y.row(plan.begin), y.row(plan.end) + 2, window.logp.begin());
        const WindowErrors we = window_errors(window, carry, plan, true);
        for (int64_t t = we.error_begin; t <= we.error_end; ++t) ++eligible[t];
        carry.trim_before(plan.next_begin);
        if (plan.is_final) break;
      }
      for (int64_t t = 1; t <= T; ++t) CHECK(eligible[t] == 1);
    }
  }
}

TEST_CASE("pre-training gate suppresses em errors") {
  std::mt19937_64 rng(71);
  const int64_t T = 10;
  const SoftmaxSeq y = random_softmax(T, 2, rng);
  CtcCarry carry(extend_labels({1}, 1));
  int64_t eligible_frames = 0;
  for (int64_t n = 1;; ++n) {
    const WindowPlan plan = plan_window(n, 4, 2, T);
    SoftmaxSeq window(plan.begin, plan.end - plan.begin + 1, 2);
    std::copy(y.row(plan.begin), y.row(plan.end) + 2, window.logp.begin());
    const WindowErrors we = window_errors(window, carry, plan, false);
    if (!plan.is_final) {
      CHECK(we.mode == WindowErrors::Mode::kNone);
      for (double v : we.values) CHECK(v == 0.0);
    } else {
      CHECK(we.mode == WindowErrors::Mode::kTr);
    }
    if (we.error_end >= we.error_begin)
      eligible_frames += we.error_end - we.error_begin + 1;
    carry.trim_before(plan.next_begin);
    if (plan.is_final) break;
  }
  CHECK(eligible_frames == 4);  /* only the final truncated window */
}

TEST_CASE("hard alignment picks the most probable prefix") {
  /* micro-example: mass 1/4 on the empty prefix, 3/4 on "a" */
  const SoftmaxSeq y = SoftmaxSeq::uniform(2, 2);
  const ExtendedSeq z = extend_labels({1}, 1);
  const Lattice alpha = forward_range(y, z);
  const double* last = alpha.row(2);
  CHECK(hard_em_alignment(std::vector<double>(last, last + 3), z) == 1);

  /* tie toward the shorter prefix */
  const SoftmaxSeq even = SoftmaxSeq::from_probs({{0.5, 0.5}});
  const Lattice a1 = forward_range(even, z);
  const double* r1 = a1.row(1);
  CHECK(hard_em_alignment(std::vector<double>(r1, r1 + 3), z) == 0);

  /* decisive evidence for the label */
  const SoftmaxSeq hot = SoftmaxSeq::from_probs({{0.01, 0.99}});
  const Lattice a2 = forward_range(hot, z);
  const double* r2 = a2.row(1);
  CHECK(hard_em_alignment(std::vector<double>(r2, r2 + 3), z) == 1);
}

TEST_CASE("hard alignment agrees with enumeration") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t tau = 3 + rng() % 3;
    const SoftmaxSeq y = random_softmax(tau, 3, rng);
    const LabelSeq z = random_target(2, 2, 100, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    const Lattice alpha = forward_range(y, ext);
    const double* last = alpha.row(tau);
    const int m = hard_em_alignment(
        std::vector<double>(last, last + ext.size()), ext);

    int best_m = 0;
    double best = -1.0;
    for (int cand = 0; cand <= static_cast<int>(z.size()); ++cand) {
      const LabelSeq prefix(z.begin(), z.begin() + cand);
      const double p = enum_seq_prob(y, prefix);
      if (p > best + 1e-15) {
        best = p;
        best_m = cand;
      }
    }
    CHECK(m == best_m);
  }
}

TEST_CASE("zero-probability window is flagged degenerate") {
  /* every frame is solidly label 2; target "a" never gets mass */
  const SoftmaxSeq y =
      SoftmaxSeq::from_probs({{0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}});
  CtcCarry carry(extend_labels({1}, 2));
  const WindowPlan plan = plan_window(1, 2, 2, 2);
  const WindowErrors we = ctc_tr_window(y, carry, plan);
  CHECK(we.degenerate);
  for (double v : we.values) CHECK(v == 0.0);
}

TEST_CASE("negative em gradient direction decreases the prefix loss") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 5; ++trial) {
    const int64_t tau = 4;
    const int width = 3;
    const LabelSeq z = random_target(3, 2, 20, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    std::vector<double> a(tau * width);
    std::uniform_real_distribution<double> logit(-1.0, 1.0);
    for (auto& v : a) v = logit(rng);

    CtcCarry carry(ext);
    const WindowPlan plan = plan_window(2, 4, 2, 20);
    const WindowErrors we = ctc_em_window(softmax_of(a, tau, width), carry, plan);

    std::vector<double> g(a.size(), 0.0);
    double norm2 = 0.0;
    for (int64_t t = we.error_begin; t <= we.error_end; ++t)
      for (int k = 0; k < width; ++k) {
        g[(t - 1) * width + k] = we.row(t)[k];
        norm2 += we.row(t)[k] * we.row(t)[k];
      }
    REQUIRE(norm2 > 0.0);

    const auto loss = [&](const std::vector<double>& act) {
      return -prefix_set_log_prob(softmax_of(act, tau, width), ext);
    };
    const double s = 1e-6;
    std::vector<double> lo = a, hi = a;
    for (size_t i = 0; i < a.size(); ++i) {
      lo[i] -= s * g[i];
      hi[i] += s * g[i];
    }
    CHECK(loss(lo) < loss(hi));  /* directional derivative negative */
  }
}

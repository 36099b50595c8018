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
#include "octc/ctc_core.hpp"
#include "octc/verify.hpp"

using namespace octc;
using octc::testing::random_softmax;
using octc::testing::random_target;
using octc::testing::softmax_of;

namespace {

/* Single label 'a', two uniform frames: the worked micro-example used
   throughout. alpha(2,.) = (1/4, 1/2, 1/4), beta(1,.) = (1/2, 1, 1/2),
   p("a") = 3/4 (paths aa, ab, ba out of 4). */
const double kQuarter = std::log(0.25);
const double kHalf = std::log(0.5);

}  // namespace

TEST_CASE("softmax rows must normalize") {
  SoftmaxSeq ok = SoftmaxSeq::uniform(3, 4);
  CHECK_NOTHROW(ok.validate());
  ok.logp[0] = std::log(0.9);
  CHECK_THROWS_AS(ok.validate(), Error);
}

TEST_CASE("forward_init places mass on the first two positions") {
  const SoftmaxSeq y = SoftmaxSeq::uniform(1, 2);
  const ExtendedSeq z = extend_labels({1}, 1);
  const auto row = forward_init(y.row(1), z);
  CHECK(row[0] == doctest::Approx(kHalf));
  CHECK(row[1] == doctest::Approx(kHalf));
  CHECK(row[2] == kLogZero);

  const ExtendedSeq empty = extend_labels({}, 1);
  const auto row0 = forward_init(y.row(1), empty);
  CHECK(row0.size() == 1);
  CHECK(row0[0] == doctest::Approx(kHalf));
}

TEST_CASE("forward recursion on the micro-example") {
  const SoftmaxSeq y = SoftmaxSeq::uniform(2, 2);
  const ExtendedSeq z = extend_labels({1}, 1);
  const Lattice alpha = forward_range(y, z);
  CHECK(alpha.at(2, 1) == doctest::Approx(kQuarter).epsilon(1e-12));
  CHECK(alpha.at(2, 2) == doctest::Approx(kHalf).epsilon(1e-12));
  CHECK(alpha.at(2, 3) == doctest::Approx(kQuarter).epsilon(1e-12));
}

TEST_CASE("backward recursion on the micro-example") {
  const SoftmaxSeq y = SoftmaxSeq::uniform(2, 2);
  const ExtendedSeq z = extend_labels({1}, 1);
  const Lattice beta = backward_range(y, z);
  /* terminal row: last two positions exactly one */
  CHECK(beta.at(2, 2) == 0.0);
  CHECK(beta.at(2, 3) == 0.0);
  CHECK(beta.at(2, 1) == kLogZero);
  CHECK(beta.at(1, 1) == doctest::Approx(kHalf).epsilon(1e-12));
  CHECK(beta.at(1, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(beta.at(1, 3) == doctest::Approx(kHalf).epsilon(1e-12));
}

TEST_CASE("seq_log_prob micro-example and T=1") {
  const ExtendedSeq z = extend_labels({1}, 1);
  CHECK(seq_log_prob(SoftmaxSeq::uniform(2, 2), z) ==
        doctest::Approx(std::log(0.75)).epsilon(1e-12));

  const SoftmaxSeq y1 = SoftmaxSeq::from_probs({{0.3, 0.7}});
  CHECK(seq_log_prob(y1, z) == doctest::Approx(std::log(0.7)).epsilon(1e-12));
}

TEST_CASE("unreachable targets read as log zero and gradient throws") {
  /* two labels cannot fit one frame */
  const SoftmaxSeq y = SoftmaxSeq::uniform(1, 3);
  const ExtendedSeq z = extend_labels({1, 2}, 2);
  CHECK(seq_log_prob(y, z) == kLogZero);
  CHECK_THROWS_AS(ctc_gradient(y, z), UnreachableTargetError);

  /* repeats need a blank: "aa" cannot fit two frames */
  const ExtendedSeq aa = extend_labels({1, 1}, 2);
  CHECK(seq_log_prob(SoftmaxSeq::uniform(2, 3), aa) == kLogZero);
}

TEST_CASE("no skip into a repeated label") {
  std::mt19937_64 rng(3);
  const SoftmaxSeq y = random_softmax(3, 2, rng);
  const ExtendedSeq aa = extend_labels({1, 1}, 1);
  const Lattice alpha = forward_range(y, aa);
  /* u=4 (second 'a') can only be entered from u=3; at t=2 position 3
     still has no mass, so neither does position 4. */
  CHECK(alpha.at(2, 4) == kLogZero);
  const double expected = log_add(alpha.at(2, 3), alpha.at(2, 4)) + y.row(3)[1];
  CHECK(alpha.at(3, 4) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("resumed forward equals unbroken forward exactly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t T = 4 + rng() % 5;
    const SoftmaxSeq y = random_softmax(T, 3, rng);
    const LabelSeq z = random_target(2, 2, T, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    const Lattice whole = forward_range(y, ext);

    const int64_t split = 1 + rng() % (T - 1);
    SoftmaxSeq head(1, split, 3), tail(split + 1, T - split, 3);
    std::copy(y.logp.begin(), y.logp.begin() + split * 3, head.logp.begin());
    std::copy(y.logp.begin() + split * 3, y.logp.end(), tail.logp.begin());
    const Lattice first = forward_range(head, ext);
    const double* carry = first.row(split);
    const std::vector<double> carry_row(carry, carry + first.width);
    const Lattice second = forward_range(tail, ext, &carry_row);

    for (int64_t t = 1; t <= split; ++t)
      for (int u = 1; u <= ext.size(); ++u)
        CHECK(first.at(t, u) == whole.at(t, u));  /* bit-exact */
    for (int64_t t = split + 1; t <= T; ++t)
      for (int u = 1; u <= ext.size(); ++u)
        CHECK(second.at(t, u) == whole.at(t, u));
  }
}

TEST_CASE("alpha-beta product is constant over frames") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t T = 3 + rng() % 5;
    const SoftmaxSeq y = random_softmax(T, 3, rng);
    const LabelSeq z = random_target(1 + rng() % 2, 2, T, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    const Lattice alpha = forward_range(y, ext);
    const Lattice beta = backward_range(y, ext);
    const double log_p = seq_log_prob(y, ext);
    for (int64_t t = 1; t <= T; ++t) {
      std::vector<double> prods(ext.size());
      for (int u = 1; u <= ext.size(); ++u)
        prods[u - 1] = alpha.at(t, u) + beta.at(t, u);
      CHECK(log_sum(prods.data(), ext.size()) ==
            doctest::Approx(log_p).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient at T=1 is softmax minus one-hot") {
  const SoftmaxSeq y = SoftmaxSeq::from_probs({{0.3, 0.7}});
  const ExtendedSeq z = extend_labels({1}, 1);
  const CtcGrad grad = ctc_gradient(y, z);
  CHECK(grad.row(1)[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(grad.row(1)[1] == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("gradient rows sum to zero") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t T = 3 + rng() % 5;
    const SoftmaxSeq y = random_softmax(T, 4, rng);
    const LabelSeq z = random_target(1 + rng() % 3, 3, T, rng);
    const CtcGrad grad = ctc_gradient(y, extend_labels(z, 3));
    for (int64_t t = 1; t <= T; ++t) {
      double s = 0.0;
      for (int k = 0; k < grad.width; ++k) s += grad.row(t)[k];
      CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient matches central differences on activations") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const int64_t T = 4;
    const int width = 3;
    const LabelSeq z = random_target(2, 2, T, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    std::vector<double> a(T * width);
    std::uniform_real_distribution<double> logit(-1.5, 1.5);
    for (auto& v : a) v = logit(rng);

    const auto loss = [&](const std::vector<double>& act) {
      return -seq_log_prob(softmax_of(act, T, width), ext);
    };
    const std::vector<double> fd = finite_diff(loss, a, 1e-5);
    const CtcGrad grad = ctc_gradient(softmax_of(a, T, width), ext);
    for (size_t i = 0; i < a.size(); ++i) {
      const double an = grad.dl_da[i];
      CHECK(std::fabs(an - fd[i]) <=
            1e-6 * std::max({1.0, std::fabs(an), std::fabs(fd[i])}));
    }
  }
}

TEST_CASE("lattice probability agrees with enumeration") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 15; ++trial) {
    const int64_t T = 2 + rng() % 5;
    const int n_labels = 2;
    const SoftmaxSeq y = random_softmax(T, n_labels + 1, rng);
    const LabelSeq z =
        random_target(1 + rng() % std::min<int64_t>(T, 3), n_labels, T, rng);
    const double brute = enum_seq_prob(y, z);
    const double lattice = seq_log_prob(y, extend_labels(z, n_labels));
    CHECK(lattice == doctest::Approx(std::log(brute)).epsilon(1e-10));
  }
}

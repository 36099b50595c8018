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

TEST_CASE("path enumeration on the micro-example") {
  const SoftmaxSeq y = SoftmaxSeq::uniform(2, 2);
  CHECK(enum_seq_prob(y, {1}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(enum_seq_prob(y, {}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("labeling distribution sums to one") {
  std::mt19937_64 rng(83);
  const SoftmaxSeq y = random_softmax(4, 3, rng);
  double total = 0.0;
  for (const auto& [labeling, prob] : enum_labeling_distribution(y)) total += prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration is size-guarded") {
  const SoftmaxSeq y = SoftmaxSeq::uniform(10, 4);  /* 4^10 > 10^6 paths */
  CHECK_THROWS_AS(enum_seq_prob(y, {1}), Error);
}

TEST_CASE("prefix-constrained backward seeds only 2m and 2m+1") {
  std::mt19937_64 rng(89);
  const int64_t tau = 4;
  const SoftmaxSeq y = random_softmax(tau, 3, rng);
  const LabelSeq z = {1, 2};
  const ExtendedSeq ext = extend_labels(z, 2);
  for (int m = 0; m <= 2; ++m) {
    const auto beta = beta_tau_m_lattice(y, ext, m);
    for (int u = 1; u <= ext.size(); ++u) {
      const bool seeded = u == 2 * m || u == 2 * m + 1;
      CHECK(beta[tau - 1][u - 1] == (seeded ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("prefix probabilities are frame-invariant and match enumeration") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t tau = 2 + rng() % 4;
    const SoftmaxSeq y = random_softmax(tau, 3, rng);
    const LabelSeq z = random_target(2, 2, 100, rng);
    const ExtendedSeq ext = extend_labels(z, 2);
    const Lattice alpha = forward_range(y, ext);

    double prefix_sum = 0.0;
    for (int m = 0; m <= static_cast<int>(z.size()); ++m) {
      const auto beta = beta_tau_m_lattice(y, ext, m);
      /* sum_u alpha(t,u) beta_tau_m(t,u) is the same at every frame */
      double at_first = 0.0;
      for (int64_t t = 1; t <= tau; ++t) {
        double s = 0.0;
        for (int u = 1; u <= ext.size(); ++u) {
          const double a = alpha.at(t, u);
          if (a != kLogZero) s += std::exp(a) * beta[t - 1][u - 1];
        }
        if (t == 1)
          at_first = s;
        else
          CHECK(s == doctest::Approx(at_first).epsilon(1e-9));
      }
      /* and equals the brute-force probability of exactly that prefix */
      const LabelSeq prefix(z.begin(), z.begin() + m);
      CHECK(at_first == doctest::Approx(enum_seq_prob(y, prefix)).epsilon(1e-9));
      prefix_sum += at_first;
    }
    /* prefix masses add up to the prefix-set mass */
    CHECK(prefix_sum == doctest::Approx(enum_prefix_prob(y, z)).epsilon(1e-9));
    CHECK(std::log(prefix_sum) ==
          doctest::Approx(prefix_set_log_prob(y, ext)).epsilon(1e-9));
  }
}

TEST_CASE("constrained backward rows sum to the all-ones backward") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t tau = 2 + rng() % 4;
    const SoftmaxSeq y = random_softmax(tau, 3, rng);
    const LabelSeq z = random_target(2, 2, 100, rng);
    const ExtendedSeq ext = extend_labels(z, 2);

    const std::vector<double> ones = em_backward_init(ext);
    const Lattice beta_all = backward_range(y, ext, &ones);

    for (int64_t t = 1; t <= tau; ++t)
      for (int u = 1; u <= ext.size(); ++u) {
        double s = 0.0;
        for (int m = 0; m <= static_cast<int>(z.size()); ++m)
          s += beta_tau_m_lattice(y, ext, m)[t - 1][u - 1];
        const double logv = beta_all.at(t, u);
        const double v = logv == kLogZero ? 0.0 : std::exp(logv);
        CHECK(s == doctest::Approx(v).epsilon(1e-9));
      }
  }
}

TEST_CASE("finite differences recover linear and quadratic gradients") {
  const auto linear = [](const std::vector<double>& x) {
    return 3.0 * x[0] - 2.0 * x[1] + 0.5 * x[2];
  };
  const auto fd_lin = finite_diff(linear, {1.0, -1.0, 2.0}, 1e-4);
  CHECK(fd_lin[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fd_lin[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(fd_lin[2] == doctest::Approx(0.5).epsilon(1e-9));

  const auto quad = [](const std::vector<double>& x) {
    return x[0] * x[0] + 4.0 * x[1] * x[1];
  };
  const auto fd_quad = finite_diff(quad, {3.0, -2.0}, 1e-5);
  CHECK(fd_quad[0] == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(fd_quad[1] == doctest::Approx(-16.0).epsilon(1e-8));
}

TEST_CASE("coverage simulation basics") {
  CHECK(simulate_tr_coverage(6, 4, 2, 0) == doctest::Approx(4.0 / 6.0));
  CHECK(simulate_tr_coverage(4, 4, 2, 0) == 1.0);
  CHECK(simulate_tr_coverage(2, 4, 2, 0) == 1.0);
  CHECK(simulate_tr_coverage(4, 4, 2, 1) == doctest::Approx(0.75));
  CHECK_THROWS_AS(simulate_tr_coverage(4, 2, 4, 0), Error);
  CHECK_THROWS_AS(simulate_tr_coverage(4, 4, 2, 2), Error);
}

TEST_CASE("monte-carlo coverage is deterministic per seed") {
  const double a = mc_average_coverage(120, 64, 32, 1000, 5);
  const double b = mc_average_coverage(120, 64, 32, 1000, 5);
  CHECK(a == b);
  CHECK(a > 0.0);
  CHECK(a <= 1.0);
}

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

#ifndef OCTC_VERIFY_HPP_
#define OCTC_VERIFY_HPP_

#include <functional>
#include <map>
#include <vector>

#include "octc/ctc_core.hpp"
#include "octc/labels.hpp"

/* Brute-force reference implementations. Everything here works in the
   linear probability domain with naive loops, deliberately sharing no
   numerics with the lattice code it is used to check. Instances are
   size-guarded: enumeration refuses anything above 10^6 paths. */

namespace octc {

/* (|L'|)^T must stay within this bound or enumeration throws. */
constexpr double kMaxEnumPaths = 1e6;

/* p(z|x): sum over all length-T paths whose collapse equals z. */
double enum_seq_prob(const SoftmaxSeq& y, const LabelSeq& z);

/* p(Z|x_1:tau) where Z is the set of all prefixes of z (including the
   empty labeling): sum over all length-tau paths whose collapse is a
   prefix of z. y must cover exactly the frames 1..tau. */
double enum_prefix_prob(const SoftmaxSeq& y, const LabelSeq& z);

/* Every labeling reachable from y with its total path probability. */
std::map<LabelSeq, double> enum_labeling_distribution(const SoftmaxSeq& y);

/* Highest-probability labeling; ties broken toward the lexicographically
   smaller labeling. Returned with its probability. */
std::pair<LabelSeq, double> enum_best_labeling(const SoftmaxSeq& y);

/* The prefix-constrained backward variable over frames 1..tau in linear
   probabilities: row tau is 1 exactly on positions 2m and 2m+1 (1-based,
   positions outside [1, |z'|] dropped), earlier rows follow the backward
   recursion. result[t-1][u-1] for t in [1, tau]. */
std::vector<std::vector<double>> beta_tau_m_lattice(const SoftmaxSeq& y,
                                                    const ExtendedSeq& z_ext,
                                                    int m);

/* Central-difference gradient of fn at x with step eps per coordinate. */
std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& fn,
                                const std::vector<double>& x, double eps);

/* Fraction of a length-T sequence, placed at the given start offset
   within the window grid (0 <= offset < step), that falls inside the
   final truncated-backward window. Simulated window by window, marking
   frames; the closed-form calculator in the streaming module is checked
   against this. */
double simulate_tr_coverage(int64_t T, int64_t unroll, int64_t step, int64_t offset);

/* Monte-Carlo average of simulate_tr_coverage over uniform offsets. */
double mc_average_coverage(int64_t T, int64_t unroll, int64_t step,
                           int draws, uint64_t seed);

}  // namespace octc

#endif  // OCTC_VERIFY_HPP_

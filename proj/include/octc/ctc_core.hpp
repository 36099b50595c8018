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

#ifndef OCTC_CTC_CORE_HPP_
#define OCTC_CTC_CORE_HPP_

#include <vector>

#include "octc/labels.hpp"
#include "octc/log_math.hpp"

namespace octc {

/* A run of per-frame output distributions in the log domain.
   first_frame is the absolute (1-based) index of row 0, so slices of a
   longer sequence keep their real frame positions. */
struct SoftmaxSeq {
  int64_t first_frame = 1;
  int64_t frames = 0;
  int width = 0;             /* |L'| */
  std::vector<double> logp;  /* frames x width, row-major */

  SoftmaxSeq() = default;
  SoftmaxSeq(int64_t first, int64_t n, int w)
      : first_frame(first), frames(n), width(w),
        logp(static_cast<size_t>(n) * w, kLogZero) {}

  int64_t last_frame() const { return first_frame + frames - 1; }
  double* row(int64_t t) { return logp.data() + (t - first_frame) * width; }
  const double* row(int64_t t) const { return logp.data() + (t - first_frame) * width; }

  /* Each row must log-sum-exp to 0 within tol. */
  void validate(double tol = 1e-9) const;

  static SoftmaxSeq from_probs(const std::vector<std::vector<double>>& probs,
                               int64_t first_frame = 1);
  static SoftmaxSeq uniform(int64_t frames, int width, int64_t first_frame = 1);
};

enum class LatticeKind { kForward, kBackward, kEmBackward };

/* alpha or beta values over a frame range, log domain. Positions u are
   1-based in accessors to match the recursion statements; storage is
   0-based. */
struct Lattice {
  LatticeKind kind = LatticeKind::kForward;
  int64_t first_frame = 1;
  int64_t frames = 0;
  int width = 0;          /* |z'| */
  std::vector<double> v;

  Lattice() = default;
  Lattice(LatticeKind k, int64_t first, int64_t n, int w)
      : kind(k), first_frame(first), frames(n), width(w),
        v(static_cast<size_t>(n) * w, kLogZero) {}

  int64_t last_frame() const { return first_frame + frames - 1; }
  double* row(int64_t t) { return v.data() + (t - first_frame) * width; }
  const double* row(int64_t t) const { return v.data() + (t - first_frame) * width; }
  double at(int64_t t, int u) const { return row(t)[u - 1]; }
};

/* Per-frame loss derivatives w.r.t. the pre-softmax activations. */
struct CtcGrad {
  int64_t first_frame = 1;
  int64_t frames = 0;
  int width = 0;              /* |L'| */
  std::vector<double> dl_da;  /* frames x width */
  double log_prob = kLogZero; /* ln p(z|x) */

  double* row(int64_t t) { return dl_da.data() + (t - first_frame) * width; }
  const double* row(int64_t t) const { return dl_da.data() + (t - first_frame) * width; }
};

/* alpha at the first frame: mass only on positions 1 (blank) and, when z
   is non-empty, 2 (first label). */
std::vector<double> forward_init(const double* y_row, const ExtendedSeq& z_ext);

/* One forward recursion step: out_u = y(z'_u) * sum_{i=f(u)}^{u} prev_i. */
void forward_step(const std::vector<double>& prev, const ExtendedSeq& z_ext,
                  const double* y_row, std::vector<double>& out);

/* alpha over y's frames. carry_row, when given, is alpha at
   y.first_frame - 1 and the recursion resumes from it; otherwise the
   run starts at y.first_frame with forward_init. Resuming is exact:
   splitting a range changes no per-row arithmetic. */
Lattice forward_range(const SoftmaxSeq& y, const ExtendedSeq& z_ext,
                      const std::vector<double>* carry_row = nullptr);

/* beta over y's frames, recursed from the last frame of y backwards:
   beta(t,u) = sum_{i=u}^{g(u)} beta(t+1,i) * y_{t+1}(z'_i).
   terminal_row, when given, seeds the last frame (all-ones for the
   online variant, or a constrained row for oracles); otherwise the last
   frame of y is treated as the sequence end: 1 on the last two
   positions, 0 elsewhere. */
Lattice backward_range(const SoftmaxSeq& y, const ExtendedSeq& z_ext,
                       const std::vector<double>* terminal_row = nullptr);

/* ln p(z|x) = alpha(T,|z'|) + alpha(T,|z'|-1); kLogZero when the target
   is unreachable. */
double seq_log_prob(const SoftmaxSeq& y, const ExtendedSeq& z_ext);
double seq_log_prob_from_alpha(const std::vector<double>& alpha_last);

/* dL/da_k(t) = y_k(t) - (1/p) sum_{u: z'_u = k} alpha(t,u) beta(t,u),
   written for frames [t_begin, t_end] into out rows. log_p normalizes.
   Shared by the full-sequence gradient and the windowed paths so that
   overlapping rows agree bit-for-bit. */
void accumulate_error_rows(const SoftmaxSeq& y, const ExtendedSeq& z_ext,
                           const Lattice& alpha, const Lattice& beta,
                           double log_p, int64_t t_begin, int64_t t_end,
                           CtcGrad* out);

/* Full-sequence gradient of -ln p(z|x). Throws UnreachableTargetError
   when p = 0 (callers skip the sequence and log it). */
CtcGrad ctc_gradient(const SoftmaxSeq& y, const ExtendedSeq& z_ext);

}  // namespace octc

#endif  // OCTC_CTC_CORE_HPP_

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

#include "octc/ctc_core.hpp"

#include <cassert>
#include <cmath>

namespace octc {

void SoftmaxSeq::validate(double tol) const {
  for (int64_t t = first_frame; t <= last_frame(); ++t) {
    const double lse = log_sum(row(t), width);
    check(std::fabs(lse) <= tol, "softmax row does not normalize");
  }
}

SoftmaxSeq SoftmaxSeq::from_probs(const std::vector<std::vector<double>>& probs,
                                  int64_t first_frame) {
  check(!probs.empty(), "empty probability table");
  SoftmaxSeq y(first_frame, static_cast<int64_t>(probs.size()),
               static_cast<int>(probs[0].size()));
  for (size_t t = 0; t < probs.size(); ++t) {
    check(static_cast<int>(probs[t].size()) == y.width, "ragged probability table");
    for (int k = 0; k < y.width; ++k)
      y.logp[t * y.width + k] = probs[t][k] > 0.0 ? std::log(probs[t][k]) : kLogZero;
  }
  return y;
}

SoftmaxSeq SoftmaxSeq::uniform(int64_t frames, int width, int64_t first_frame) {
  SoftmaxSeq y(first_frame, frames, width);
  const double lp = -std::log(static_cast<double>(width));
  for (double& v : y.logp) v = lp;
  return y;
}

std::vector<double> forward_init(const double* y_row, const ExtendedSeq& z_ext) {
  std::vector<double> alpha(z_ext.size(), kLogZero);
  alpha[0] = y_row[kBlank];
  if (z_ext.size() > 1) alpha[1] = y_row[z_ext.label_at(2)];
  return alpha;
}

void forward_step(const std::vector<double>& prev, const ExtendedSeq& z_ext,
                  const double* y_row, std::vector<double>& out) {
  const int width = z_ext.size();
  assert(static_cast<int>(prev.size()) == width);
  out.resize(width);
  for (int u = 1; u <= width; ++u) {
    const int f = z_ext.prev_start(u);  /* 0 = boundary, contributes nothing */
    double s = kLogZero;
    for (int i = (f > 0 ? f : 1); i <= u; ++i) s = log_add(s, prev[i - 1]);
    out[u - 1] = s + y_row[z_ext.label_at(u)];
  }
}

Lattice forward_range(const SoftmaxSeq& y, const ExtendedSeq& z_ext,
                      const std::vector<double>* carry_row) {
  check(y.frames > 0, "forward_range needs at least one frame");
  Lattice alpha(LatticeKind::kForward, y.first_frame, y.frames, z_ext.size());
  std::vector<double> cur;
  int64_t t = y.first_frame;
  if (carry_row != nullptr) {
    check(static_cast<int>(carry_row->size()) == z_ext.size(),
          "carry row width does not match target");
    forward_step(*carry_row, z_ext, y.row(t), cur);
  } else {
    cur = forward_init(y.row(t), z_ext);
  }
  std::copy(cur.begin(), cur.end(), alpha.row(t));
  std::vector<double> next;
  for (++t; t <= y.last_frame(); ++t) {
    forward_step(cur, z_ext, y.row(t), next);
    std::copy(next.begin(), next.end(), alpha.row(t));
    cur.swap(next);
  }
  return alpha;
}

Lattice backward_range(const SoftmaxSeq& y, const ExtendedSeq& z_ext,
                       const std::vector<double>* terminal_row) {
  check(y.frames > 0, "backward_range needs at least one frame");
  const int width = z_ext.size();
  const LatticeKind kind =
      terminal_row != nullptr ? LatticeKind::kEmBackward : LatticeKind::kBackward;
  Lattice beta(kind, y.first_frame, y.frames, width);
  double* last = beta.row(y.last_frame());
  if (terminal_row != nullptr) {
    check(static_cast<int>(terminal_row->size()) == width,
          "terminal row width does not match target");
    std::copy(terminal_row->begin(), terminal_row->end(), last);
  } else {
    last[width - 1] = 0.0;
    if (width >= 2) last[width - 2] = 0.0;
  }
  for (int64_t t = y.last_frame() - 1; t >= y.first_frame; --t) {
    const double* next = beta.row(t + 1);
    const double* y_next = y.row(t + 1);
    double* cur = beta.row(t);
    for (int u = 1; u <= width; ++u) {
      const int g = z_ext.next_end(u);  /* width+1 = boundary */
      double s = kLogZero;
      for (int i = u; i <= (g <= width ? g : width); ++i)
        s = log_add(s, next[i - 1] + y_next[z_ext.label_at(i)]);
      cur[u - 1] = s;
    }
  }
  return beta;
}

double seq_log_prob_from_alpha(const std::vector<double>& alpha_last) {
  const int width = static_cast<int>(alpha_last.size());
  double p = alpha_last[width - 1];
  if (width >= 2) p = log_add(p, alpha_last[width - 2]);
  return p;
}

double seq_log_prob(const SoftmaxSeq& y, const ExtendedSeq& z_ext) {
  const Lattice alpha = forward_range(y, z_ext);
  const double* last = alpha.row(alpha.last_frame());
  return seq_log_prob_from_alpha(std::vector<double>(last, last + alpha.width));
}

void accumulate_error_rows(const SoftmaxSeq& y, const ExtendedSeq& z_ext,
                           const Lattice& alpha, const Lattice& beta,
                           double log_p, int64_t t_begin, int64_t t_end,
                           CtcGrad* out) {
  assert(t_begin >= alpha.first_frame && t_end <= alpha.last_frame());
  assert(t_begin >= beta.first_frame && t_end <= beta.last_frame());
  assert(t_begin >= out->first_frame &&
         t_end <= out->first_frame + out->frames - 1);
  const int width = z_ext.size();
  for (int64_t t = t_begin; t <= t_end; ++t) {
    const double* a = alpha.row(t);
    const double* b = beta.row(t);
    const double* ly = y.row(t);
    double* dst = out->row(t);
    for (int k = 0; k < out->width; ++k) dst[k] = std::exp(ly[k]);
    for (int u = 1; u <= width; ++u) {
      const double mass = a[u - 1] + b[u - 1];
      if (mass == kLogZero) continue;
      dst[z_ext.label_at(u)] -= std::exp(mass - log_p);
    }
  }
}

CtcGrad ctc_gradient(const SoftmaxSeq& y, const ExtendedSeq& z_ext) {
  const Lattice alpha = forward_range(y, z_ext);
  const Lattice beta = backward_range(y, z_ext);
  const double* last = alpha.row(alpha.last_frame());
  const double log_p =
      seq_log_prob_from_alpha(std::vector<double>(last, last + alpha.width));
  if (log_p == kLogZero)
    throw UnreachableTargetError("target labeling has zero probability");
  CtcGrad grad;
  grad.first_frame = y.first_frame;
  grad.frames = y.frames;
  grad.width = y.width;
  grad.dl_da.assign(static_cast<size_t>(y.frames) * y.width, 0.0);
  grad.log_prob = log_p;
  accumulate_error_rows(y, z_ext, alpha, beta, log_p, y.first_frame,
                        y.last_frame(), &grad);
  return grad;
}

}  // namespace octc

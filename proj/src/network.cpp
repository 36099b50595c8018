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

#include "octc/network.hpp"

#include <cassert>
#include <cmath>
#include <random>

namespace octc {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr const char* kGateNames[4] = {"Wi", "Wf", "Wg", "Wo"};
constexpr const char* kBiasNames[4] = {"bi", "bf", "bg", "bo"};
constexpr int kForgetGate = 1;

}  // namespace

void ActivationTape::trim_before(int64_t keep_from) {
  while (first_frame_ < keep_from && !records_.empty()) {
    records_.pop_front();
    ++first_frame_;
  }
  if (records_.empty()) first_frame_ = keep_from;
}

SoftmaxSeq ActivationTape::window_logp(int64_t lo, int64_t hi) const {
  assert(lo >= first_frame() && hi <= last_frame() && lo <= hi);
  const int width = static_cast<int>(record(lo).logy.size());
  SoftmaxSeq y(lo, hi - lo + 1, width);
  for (int64_t t = lo; t <= hi; ++t)
    std::copy(record(t).logy.begin(), record(t).logy.end(), y.row(t));
  return y;
}

LstmNetwork::LstmNetwork(NetworkConfig cfg) : cfg_(cfg) {
  check(cfg_.input_dim >= 1 && cfg_.layers >= 1 && cfg_.cells >= 1 &&
            cfg_.output_dim >= 2,
        "bad network dimensions");
  check(cfg_.dropout >= 0.0 && cfg_.dropout < 1.0, "dropout must lie in [0, 1)");
  size_t off = 0;
  w_off_.resize(4 * cfg_.layers);
  b_off_.resize(4 * cfg_.layers);
  for (int l = 0; l < cfg_.layers; ++l) {
    const int fan = fan_in(l);
    for (int gate = 0; gate < 4; ++gate) {
      const std::string prefix = "l" + std::to_string(l) + ".";
      w_off_[l * 4 + gate] = off;
      slices_.push_back({prefix + kGateNames[gate], off, cfg_.cells, fan + cfg_.cells});
      off += slices_.back().size();
      b_off_[l * 4 + gate] = off;
      slices_.push_back({prefix + kBiasNames[gate], off, cfg_.cells, 1});
      off += slices_.back().size();
    }
  }
  out_w_off_ = off;
  slices_.push_back({"out.W", off, cfg_.output_dim, cfg_.cells});
  off += slices_.back().size();
  out_b_off_ = off;
  slices_.push_back({"out.b", off, cfg_.output_dim, 1});
  off += slices_.back().size();
  total_ = off;
}

std::vector<double> LstmNetwork::init_params() const {
  std::vector<double> params(total_, 0.0);
  std::mt19937_64 rng(cfg_.seed);
  for (const ParamSlice& s : slices_) {
    if (s.cols == 1) continue;  /* biases below */
    for (size_t i = 0; i < s.size(); ++i)
      params[s.offset + i] = (2.0 * bits_to_unit(rng()) - 1.0) * 0.1;
  }
  for (int l = 0; l < cfg_.layers; ++l) {
    double* bf = params.data() + b_off_[l * 4 + kForgetGate];
    for (int j = 0; j < cfg_.cells; ++j) bf[j] = 1.0;
  }
  return params;
}

RnnState LstmNetwork::initial_state() const {
  RnnState s;
  s.h.assign(cfg_.layers, std::vector<double>(cfg_.cells, 0.0));
  s.c.assign(cfg_.layers, std::vector<double>(cfg_.cells, 0.0));
  return s;
}

void LstmNetwork::forward(const std::vector<double>& params, const double* frames,
                          int64_t n_frames, int64_t first_frame, RnnState* state,
                          ActivationTape* tape, SoftmaxSeq* y_out,
                          bool train_mode, uint64_t mask_stream) const {
  check(params.size() == total_, "parameter vector size mismatch");
  assert(state->h.size() == static_cast<size_t>(cfg_.layers));
  const int C = cfg_.cells;
  const int L = cfg_.layers;
  const int O = cfg_.output_dim;
  const bool drop = train_mode && cfg_.dropout > 0.0;
  const double keep_scale = drop ? 1.0 / (1.0 - cfg_.dropout) : 1.0;
  if (y_out != nullptr) *y_out = SoftmaxSeq(first_frame, n_frames, O);

  for (int64_t idx = 0; idx < n_frames; ++idx) {
    const int64_t t = first_frame + idx;
    const double* x = frames + idx * cfg_.input_dim;
    uint64_t key = 0;
    if (drop)
      key = splitmix64(splitmix64(cfg_.seed ^ (0x9e3779b97f4a7c15ULL *
                                               (mask_stream + 1))) ^
                       static_cast<uint64_t>(t));
    FrameRecord rec;
    rec.xh.resize(L);
    rec.gi.resize(L);
    rec.gf.resize(L);
    rec.gg.resize(L);
    rec.go.resize(L);
    rec.c.resize(L);
    rec.c_prev.resize(L);
    rec.h.resize(L);
    rec.in_mask.resize(L);

    std::vector<double> cur_in(x, x + cfg_.input_dim);
    for (int l = 0; l < L; ++l) {
      const int fan = fan_in(l);
      std::vector<double>& xh = rec.xh[l];
      xh.resize(fan + C);
      if (drop) {
        rec.in_mask[l].resize(fan);
        for (int k = 0; k < fan; ++k) {
          key = splitmix64(key);
          const double m = bits_to_unit(key) >= cfg_.dropout ? keep_scale : 0.0;
          rec.in_mask[l][k] = m;
          xh[k] = cur_in[k] * m;
        }
      } else {
        std::copy(cur_in.begin(), cur_in.end(), xh.begin());
      }
      std::copy(state->h[l].begin(), state->h[l].end(), xh.begin() + fan);

      std::vector<double>&gi = rec.gi[l], &gf = rec.gf[l], &gg = rec.gg[l],
                         &go = rec.go[l];
      gi.resize(C);
      gf.resize(C);
      gg.resize(C);
      go.resize(C);
      std::vector<double>* gates[4] = {&gi, &gf, &gg, &go};
      for (int gate = 0; gate < 4; ++gate) {
        const double* W = params.data() + w_off_[l * 4 + gate];
        const double* b = params.data() + b_off_[l * 4 + gate];
        std::vector<double>& out = *gates[gate];
        for (int j = 0; j < C; ++j) {
          const double* row = W + static_cast<size_t>(j) * (fan + C);
          double z = b[j];
          for (int k = 0; k < fan + C; ++k) z += row[k] * xh[k];
          out[j] = gate == 2 ? std::tanh(z) : sigmoid(z);
        }
      }
      rec.c_prev[l] = state->c[l];
      std::vector<double>&c = rec.c[l], &h = rec.h[l];
      c.resize(C);
      h.resize(C);
      for (int j = 0; j < C; ++j) {
        c[j] = gf[j] * rec.c_prev[l][j] + gi[j] * gg[j];
        h[j] = go[j] * std::tanh(c[j]);
      }
      state->c[l] = c;
      state->h[l] = h;
      cur_in = h;
    }

    rec.top_masked = cur_in;
    if (drop) {
      rec.out_mask.resize(C);
      for (int k = 0; k < C; ++k) {
        key = splitmix64(key);
        const double m = bits_to_unit(key) >= cfg_.dropout ? keep_scale : 0.0;
        rec.out_mask[k] = m;
        rec.top_masked[k] *= m;
      }
    }
    rec.logy.resize(O);
    const double* Wo = params.data() + out_w_off_;
    const double* bo = params.data() + out_b_off_;
    for (int o = 0; o < O; ++o) {
      const double* row = Wo + static_cast<size_t>(o) * C;
      double a = bo[o];
      for (int k = 0; k < C; ++k) a += row[k] * rec.top_masked[k];
      rec.logy[o] = a;
    }
    const double lse = log_sum(rec.logy.data(), O);
    for (int o = 0; o < O; ++o) rec.logy[o] -= lse;

    if (y_out != nullptr)
      std::copy(rec.logy.begin(), rec.logy.end(), y_out->row(t));
    if (tape != nullptr) tape->append(std::move(rec));
  }
}

void LstmNetwork::backward(const std::vector<double>& params,
                           const ActivationTape& tape, const WindowErrors& errors,
                           int64_t begin, int64_t end,
                           std::vector<double>* grad) const {
  check(params.size() == total_ && grad->size() == total_,
        "parameter vector size mismatch");
  check(begin >= tape.first_frame() && end <= tape.last_frame() && begin <= end,
        "window not covered by the activation tape");
  check(begin >= errors.first_frame &&
            end <= errors.first_frame + errors.frames - 1,
        "window not covered by the error rows");
  const int C = cfg_.cells;
  const int L = cfg_.layers;
  const int O = cfg_.output_dim;

  std::vector<std::vector<double>> dh_rec(L, std::vector<double>(C, 0.0));
  std::vector<std::vector<double>> dc_rec(L, std::vector<double>(C, 0.0));
  std::vector<double> dfrom_above(C);
  std::vector<double> dz[4];
  for (auto& v : dz) v.resize(C);

  for (int64_t t = end; t >= begin; --t) {
    const FrameRecord& rec = tape.record(t);
    const double* da = errors.row(t);

    double* gWo = grad->data() + out_w_off_;
    double* gbo = grad->data() + out_b_off_;
    const double* Wo = params.data() + out_w_off_;
    std::fill(dfrom_above.begin(), dfrom_above.end(), 0.0);
    for (int o = 0; o < O; ++o) {
      gbo[o] += da[o];
      double* grow = gWo + static_cast<size_t>(o) * C;
      const double* row = Wo + static_cast<size_t>(o) * C;
      for (int k = 0; k < C; ++k) {
        grow[k] += da[o] * rec.top_masked[k];
        dfrom_above[k] += row[k] * da[o];
      }
    }
    if (!rec.out_mask.empty())
      for (int k = 0; k < C; ++k) dfrom_above[k] *= rec.out_mask[k];

    for (int l = L - 1; l >= 0; --l) {
      const int fan = fan_in(l);
      const std::vector<double>&gi = rec.gi[l], &gf = rec.gf[l],
                               &gg = rec.gg[l], &go = rec.go[l];
      for (int j = 0; j < C; ++j) {
        const double dh = dfrom_above[j] + dh_rec[l][j];
        const double tc = std::tanh(rec.c[l][j]);
        dz[3][j] = dh * tc * go[j] * (1.0 - go[j]);
        const double dc = dh * go[j] * (1.0 - tc * tc) + dc_rec[l][j];
        dz[1][j] = dc * rec.c_prev[l][j] * gf[j] * (1.0 - gf[j]);
        dz[0][j] = dc * gg[j] * gi[j] * (1.0 - gi[j]);
        dz[2][j] = dc * gi[j] * (1.0 - gg[j] * gg[j]);
        dc_rec[l][j] = dc * gf[j];
      }
      std::vector<double> dxh(fan + C, 0.0);
      const std::vector<double>& xh = rec.xh[l];
      for (int gate = 0; gate < 4; ++gate) {
        const double* W = params.data() + w_off_[l * 4 + gate];
        double* gW = grad->data() + w_off_[l * 4 + gate];
        double* gb = grad->data() + b_off_[l * 4 + gate];
        for (int j = 0; j < C; ++j) {
          const double d = dz[gate][j];
          if (d == 0.0) continue;
          gb[j] += d;
          const double* row = W + static_cast<size_t>(j) * (fan + C);
          double* grow = gW + static_cast<size_t>(j) * (fan + C);
          for (int k = 0; k < fan + C; ++k) {
            grow[k] += d * xh[k];
            dxh[k] += row[k] * d;
          }
        }
      }
      std::copy(dxh.begin() + fan, dxh.end(), dh_rec[l].begin());
      if (l > 0) {
        dfrom_above.assign(dxh.begin(), dxh.begin() + fan);
        if (!rec.in_mask[l].empty())
          for (int k = 0; k < fan; ++k) dfrom_above[k] *= rec.in_mask[l][k];
      }
    }
  }
}

}  // namespace octc

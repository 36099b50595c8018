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

#include "octc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace octc {

namespace {

constexpr char kCheckpointMagic[4] = {'O', 'C', 'T', 'C'};

void put_u32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

uint32_t get_u32(const std::string& in, size_t* pos) {
  check(*pos + 4 <= in.size(), "checkpoint truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[*pos + i])) << (8 * i);
  *pos += 4;
  return v;
}

uint64_t get_u64(const std::string& in, size_t* pos) {
  check(*pos + 8 <= in.size(), "checkpoint truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<uint64_t>(static_cast<unsigned char>(in[*pos + i])) << (8 * i);
  *pos += 8;
  return v;
}

void put_f32_array(std::string* out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (double x : v)
    put_u32(out, std::bit_cast<uint32_t>(static_cast<float>(x)));
}

std::vector<double> get_f32_array(const std::string& in, size_t* pos) {
  const uint64_t n = get_u64(in, pos);
  check(*pos + n * 4 <= in.size(), "checkpoint truncated");
  std::vector<double> v(n);
  for (uint64_t i = 0; i < n; ++i)
    v[i] = static_cast<double>(std::bit_cast<float>(get_u32(in, pos)));
  return v;
}

void put_f64_array(std::string* out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (double x : v) put_u64(out, std::bit_cast<uint64_t>(x));
}

std::vector<double> get_f64_array(const std::string& in, size_t* pos) {
  const uint64_t n = get_u64(in, pos);
  check(*pos + n * 8 <= in.size(), "checkpoint truncated");
  std::vector<double> v(n);
  for (uint64_t i = 0; i < n; ++i)
    v[i] = std::bit_cast<double>(get_u64(in, pos));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::string out;
  out.append(kCheckpointMagic, 4);
  put_u32(&out, kCheckpointFormatVersion);
  const std::string cfg = c.config.dump();
  put_u64(&out, cfg.size());
  out += cfg;
  put_u64(&out, static_cast<uint64_t>(c.frames_seen));
  put_f32_array(&out, c.params);
  put_f32_array(&out, c.opt_state.velocity);
  put_f32_array(&out, c.opt_state.rms_grad);
  put_f32_array(&out, c.opt_state.rms_update);
  put_u64(&out, static_cast<uint64_t>(c.opt_state.rejected_steps));
  put_f64_array(&out, c.norm.mean);
  put_f64_array(&out, c.norm.stddev);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  check(f.good(), "cannot write checkpoint: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  check(f.good(), "checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(f.good(), "cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string in = buf.str();

  check(in.size() >= 8 && std::memcmp(in.data(), kCheckpointMagic, 4) == 0,
        "not a checkpoint file: " + path);
  size_t pos = 4;
  const uint32_t version = get_u32(in, &pos);
  check(version == kCheckpointFormatVersion,
        "unsupported checkpoint version " + std::to_string(version) + " in " +
            path + " (expected " + std::to_string(kCheckpointFormatVersion) +
            ")");

  Checkpoint c;
  const uint64_t cfg_len = get_u64(in, &pos);
  check(pos + cfg_len <= in.size(), "checkpoint truncated");
  try {
    c.config = nlohmann::json::parse(in.substr(pos, cfg_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad embedded config in " + path + ": " + e.what());
  }
  pos += cfg_len;
  c.frames_seen = static_cast<int64_t>(get_u64(in, &pos));
  c.params = get_f32_array(in, &pos);
  c.opt_state.velocity = get_f32_array(in, &pos);
  c.opt_state.rms_grad = get_f32_array(in, &pos);
  c.opt_state.rms_update = get_f32_array(in, &pos);
  c.opt_state.rejected_steps = static_cast<int64_t>(get_u64(in, &pos));
  c.norm.mean = get_f64_array(in, &pos);
  c.norm.stddev = get_f64_array(in, &pos);
  check(pos == in.size(), "trailing bytes in checkpoint: " + path);
  return c;
}

}  // namespace octc

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

#include "octc/labels.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

namespace octc {

namespace {

LogLevel parse_log_level() {
  const char* env = std::getenv("OCTC_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = parse_log_level();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) std::fprintf(stderr, "[octc] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) std::fprintf(stderr, "[octc] %s\n", msg.c_str());
}

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  check(!tokens_.empty(), "alphabet must contain at least one label");
  std::unordered_map<std::string, int> seen;
  for (const auto& t : tokens_) {
    check(!t.empty(), "alphabet tokens must be non-empty");
    check(seen.emplace(t, 1).second, "duplicate alphabet token: " + t);
  }
}

int Alphabet::id_of(const std::string& token) const {
  for (int i = 0; i < size(); ++i)
    if (tokens_[i] == token) return i + 1;
  throw Error("unknown label token: " + token);
}

const std::string& Alphabet::token(int id) const {
  check(id >= 1 && id <= size(), "label id out of range");
  return tokens_[id - 1];
}

LabelSeq Alphabet::encode(const std::vector<std::string>& tokens) const {
  LabelSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id_of(t));
  return out;
}

std::vector<std::string> Alphabet::decode(const LabelSeq& seq) const {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (int id : seq) out.push_back(token(id));
  return out;
}

ExtendedSeq::ExtendedSeq(LabelSeq z) : z_(std::move(z)) {
  ext_.reserve(2 * z_.size() + 1);
  ext_.push_back(kBlank);
  for (int label : z_) {
    ext_.push_back(label);
    ext_.push_back(kBlank);
  }
}

int ExtendedSeq::prev_start(int u) const {
  check(u >= 1 && u <= size(), "lattice position out of range");
  const int label = ext_[u - 1];
  if (label == kBlank || (u >= 3 && ext_[u - 3] == label)) return std::max(u - 1, 0);
  return std::max(u - 2, 0);
}

int ExtendedSeq::next_end(int u) const {
  check(u >= 1 && u <= size(), "lattice position out of range");
  const int label = ext_[u - 1];
  if (label == kBlank || (u + 2 <= size() && ext_[u + 1] == label)) return std::min(u + 1, size() + 1);
  return std::min(u + 2, size() + 1);
}

std::vector<int> ExtendedSeq::positions_of(int label) const {
  std::vector<int> out;
  for (int u = 1; u <= size(); ++u)
    if (ext_[u - 1] == label) out.push_back(u);
  return out;
}

int ExtendedSeq::min_path_frames() const {
  int frames = static_cast<int>(z_.size());
  for (size_t i = 1; i < z_.size(); ++i)
    if (z_[i] == z_[i - 1]) ++frames;  /* blank forced between repeats */
  return frames;
}

ExtendedSeq extend_labels(const LabelSeq& z, int n_labels) {
  for (int label : z)
    check(label >= 1 && label <= n_labels, "invalid label id in target");
  return ExtendedSeq(z);
}

LabelSeq collapse_path(const std::vector<int>& path) {
  LabelSeq out;
  int prev = kBlank;
  for (int label : path) {
    if (label != prev && label != kBlank) out.push_back(label);
    prev = label;
  }
  return out;
}

std::pair<int, int> transitions(const ExtendedSeq& z_ext, int u) {
  return {z_ext.prev_start(u), z_ext.next_end(u)};
}

}  // namespace octc

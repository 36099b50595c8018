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

#include "octc/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace octc {

namespace {

constexpr char kFeatureMagic[4] = {'O', 'C', 'T', 'F'};

void put_u32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

void put_f32(std::string* out, float f) {
  put_u32(out, std::bit_cast<uint32_t>(f));
}

uint32_t get_u32(const std::string& in, size_t* pos) {
  check(*pos + 4 <= in.size(), "feature file truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[*pos + i])) << (8 * i);
  *pos += 4;
  return v;
}

std::string read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(f.good(), "cannot open file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  check(f.good(), "cannot write file: " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  check(f.good(), "write failed: " + path);
}

}  // namespace

void write_feature_file(const std::string& path, const double* features,
                        int64_t frames, int dim) {
  check(frames >= 1 && dim >= 1, "feature file needs frames >= 1, dim >= 1");
  std::string out;
  out.reserve(16 + static_cast<size_t>(frames) * dim * 4);
  out.append(kFeatureMagic, 4);
  put_u32(&out, kFeatureFormatVersion);
  put_u32(&out, static_cast<uint32_t>(frames));
  put_u32(&out, static_cast<uint32_t>(dim));
  for (int64_t i = 0; i < frames * dim; ++i)
    put_f32(&out, static_cast<float>(features[i]));
  write_bytes(path, out);
}

SequenceData read_feature_file(const std::string& path) {
  const std::string in = read_bytes(path);
  check(in.size() >= 16 && std::memcmp(in.data(), kFeatureMagic, 4) == 0,
        "not a feature file: " + path);
  size_t pos = 4;
  const uint32_t version = get_u32(in, &pos);
  check(version == kFeatureFormatVersion,
        "unsupported feature format version " + std::to_string(version) +
            " in " + path);
  const uint32_t frames = get_u32(in, &pos);
  const uint32_t dim = get_u32(in, &pos);
  check(frames >= 1 && dim >= 1, "degenerate feature file: " + path);
  const size_t n = static_cast<size_t>(frames) * dim;
  check(in.size() == 16 + n * 4, "feature payload size mismatch: " + path);

  SequenceData s;
  s.n_frames = frames;
  s.features.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const uint32_t bits = get_u32(in, &pos);
    s.features[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return s;
}

void write_label_file(const std::string& path,
                      const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  out.push_back('\n');
  write_bytes(path, out);
}

std::vector<std::string> read_label_file(const std::string& path) {
  const std::string in = read_bytes(path);
  std::istringstream ss(in);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

void write_manifest(const std::string& path, const Manifest& m) {
  nlohmann::json j;
  j["alphabet"] = m.alphabet;
  j["sequences"] = nlohmann::json::array();
  for (const ManifestEntry& e : m.entries)
    j["sequences"].push_back({{"features", e.feature_path},
                              {"labels", e.label_path}});
  write_bytes(path, j.dump(2) + "\n");
}

Manifest read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_bytes(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad manifest " + path + ": " + e.what());
  }
  check(j.contains("sequences") && j["sequences"].is_array(),
        "manifest missing 'sequences' array: " + path);
  Manifest m;
  if (j.contains("alphabet"))
    m.alphabet = j["alphabet"].get<std::vector<std::string>>();
  for (const nlohmann::json& e : j["sequences"]) {
    check(e.contains("features") && e.contains("labels"),
          "manifest entry needs 'features' and 'labels': " + path);
    m.entries.push_back({e["features"].get<std::string>(),
                         e["labels"].get<std::string>()});
  }
  return m;
}

std::vector<SequenceData> load_dataset(const std::string& manifest_path,
                                       const Alphabet& alphabet) {
  const Manifest m = read_manifest(manifest_path);
  check(!m.entries.empty(), "manifest has no sequences: " + manifest_path);
  const std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<SequenceData> out;
  out.reserve(m.entries.size());
  int dim = -1;
  for (const ManifestEntry& e : m.entries) {
    SequenceData s = read_feature_file(resolve(e.feature_path));
    const int d = static_cast<int>(s.features.size() / s.n_frames);
    if (dim < 0) dim = d;
    check(d == dim, "mixed feature dimensions in " + manifest_path);
    s.labels = alphabet.encode(read_label_file(resolve(e.label_path)));
    out.push_back(std::move(s));
  }
  return out;
}

NormStats compute_norm_stats(const std::vector<SequenceData>& dataset) {
  check(!dataset.empty(), "cannot take statistics of an empty dataset");
  const size_t dim = dataset[0].features.size() / dataset[0].n_frames;
  NormStats st;
  st.mean.assign(dim, 0.0);
  st.stddev.assign(dim, 0.0);
  int64_t n = 0;
  for (const SequenceData& s : dataset) {
    for (int64_t t = 0; t < s.n_frames; ++t)
      for (size_t d = 0; d < dim; ++d)
        st.mean[d] += s.features[t * dim + d];
    n += s.n_frames;
  }
  for (double& v : st.mean) v /= static_cast<double>(n);
  for (const SequenceData& s : dataset)
    for (int64_t t = 0; t < s.n_frames; ++t)
      for (size_t d = 0; d < dim; ++d) {
        const double c = s.features[t * dim + d] - st.mean[d];
        st.stddev[d] += c * c;
      }
  for (double& v : st.stddev) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v == 0.0) v = 1.0;  /* constant dimension passes through */
  }
  return st;
}

void apply_normalization(std::vector<SequenceData>* dataset,
                         const NormStats& stats) {
  const size_t dim = stats.mean.size();
  check(dim == stats.stddev.size(), "normalization statistics mismatched");
  for (SequenceData& s : *dataset) {
    check(s.features.size() == static_cast<size_t>(s.n_frames) * dim,
          "normalization dimension does not match the data");
    for (int64_t t = 0; t < s.n_frames; ++t)
      for (size_t d = 0; d < dim; ++d) {
        double& v = s.features[t * dim + d];
        v = (v - stats.mean[d]) / stats.stddev[d];
      }
  }
}

}  // namespace octc

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

#include "octc/datagen.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

namespace octc {

namespace {

/* Box-Muller from two uniform draws; one normal per call keeps the
   draw count data-independent and the output stable across platforms. */
double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - bits_to_unit(rng());  /* (0, 1] */
  const double u2 = bits_to_unit(rng());
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

int64_t uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace

void validate_spec(const DatagenSpec& spec) {
  check(spec.n_symbols >= 1, "datagen: alphabet must be non-empty");
  check(spec.n_sequences >= 1, "datagen: need at least one sequence");
  check(spec.min_symbols >= 1 && spec.max_symbols >= spec.min_symbols,
        "datagen: bad symbols-per-sequence range");
  check(spec.min_frames >= 1 && spec.max_frames >= spec.min_frames,
        "datagen: bad frames-per-symbol range");
  check(spec.noise_sigma >= 0.0, "datagen: noise sigma must be nonnegative");
}

std::vector<SequenceData> generate_dataset(const DatagenSpec& spec,
                                           uint64_t seed) {
  validate_spec(spec);
  std::mt19937_64 rng(seed);
  std::vector<SequenceData> out;
  out.reserve(spec.n_sequences);
  for (int i = 0; i < spec.n_sequences; ++i) {
    const int64_t n_symbols = uniform_int(rng, spec.min_symbols,
                                          spec.max_symbols);
    SequenceData s;
    int prev = 0;
    for (int64_t k = 0; k < n_symbols; ++k) {
      /* Adjacent symbols are kept distinct: a repeated symbol would
         continue the same one-hot run, leaving no evidence of the
         boundary in the features. */
      int symbol;
      if (spec.n_symbols == 1 || prev == 0) {
        symbol = static_cast<int>(uniform_int(rng, 1, spec.n_symbols));
      } else {
        symbol = static_cast<int>(uniform_int(rng, 1, spec.n_symbols - 1));
        if (symbol >= prev) ++symbol;
      }
      prev = symbol;
      const int64_t run = uniform_int(rng, spec.min_frames, spec.max_frames);
      s.labels.push_back(symbol);
      for (int64_t f = 0; f < run; ++f)
        for (int d = 0; d < spec.n_symbols; ++d) {
          double v = (d == symbol - 1) ? 1.0 : 0.0;
          if (spec.noise_sigma > 0.0) v += spec.noise_sigma * gaussian(rng);
          s.features.push_back(v);
        }
      s.n_frames += run;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> datagen_alphabet(int n_symbols) {
  std::vector<std::string> tokens;
  tokens.reserve(n_symbols);
  for (int i = 0; i < n_symbols; ++i) tokens.push_back(std::to_string(i));
  return tokens;
}

std::string write_dataset(const std::string& dir,
                          const std::vector<SequenceData>& dataset,
                          const Alphabet& alphabet) {
  check(!dataset.empty(), "refusing to write an empty dataset");
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);

  Manifest m;
  m.alphabet = alphabet.tokens();
  char name[32];
  for (size_t i = 0; i < dataset.size(); ++i) {
    const SequenceData& s = dataset[i];
    const int dim = static_cast<int>(s.features.size() / s.n_frames);
    std::snprintf(name, sizeof(name), "seq_%05zu", i);
    const std::string feat = std::string(name) + ".octf";
    const std::string lab = std::string(name) + ".txt";
    write_feature_file((base / feat).string(), s.features.data(), s.n_frames,
                       dim);
    write_label_file((base / lab).string(), alphabet.decode(s.labels));
    m.entries.push_back({feat, lab});
  }
  const std::string manifest_path = (base / "manifest.json").string();
  write_manifest(manifest_path, m);
  return manifest_path;
}

}  // namespace octc

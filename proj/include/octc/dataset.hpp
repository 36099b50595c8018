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

/* On-disk dataset formats and ingestion.

   Feature file ("OCTF"): magic, format version u32, frame count u32,
   dimension u32, then frames x dim little-endian 32-bit floats.
   Label file: one line of space-separated UTF-8 tokens.
   Manifest: JSON listing {features, labels} path pairs (relative paths
   resolve against the manifest's directory) plus the token inventory. */

#ifndef OCTC_DATASET_HPP_
#define OCTC_DATASET_HPP_

#include <string>
#include <vector>

#include "octc/labels.hpp"
#include "octc/streaming.hpp"

namespace octc {

constexpr uint32_t kFeatureFormatVersion = 1;

void write_feature_file(const std::string& path, const double* features,
                        int64_t frames, int dim);
/* Returns the features with empty labels; values are exactly the f32 on
   disk widened to double. */
SequenceData read_feature_file(const std::string& path);

void write_label_file(const std::string& path,
                      const std::vector<std::string>& tokens);
std::vector<std::string> read_label_file(const std::string& path);

struct ManifestEntry {
  std::string feature_path;
  std::string label_path;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> alphabet;  /* token inventory of the labels */
};

void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

/* Reads every sequence of a manifest, encoding label tokens with the
   given alphabet. All feature files must share one dimension. */
std::vector<SequenceData> load_dataset(const std::string& manifest_path,
                                       const Alphabet& alphabet);

/* Element-wise normalization statistics over all frames of a dataset.
   Dimensions with zero variance keep stddev 1 so they pass through. */
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

NormStats compute_norm_stats(const std::vector<SequenceData>& dataset);
void apply_normalization(std::vector<SequenceData>* dataset,
                         const NormStats& stats);

}  // namespace octc

#endif  /* OCTC_DATASET_HPP_ */

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

/* Synthetic sequence generator: each hidden symbol emits a run of
   frames equal to its one-hot vector plus Gaussian noise, and the
   target is the symbol sequence. Adjacent symbols are distinct (a
   repeat would merge into one indistinguishable run). Deterministic by
   seed, including the noise (own Box-Muller, no library
   distributions). */

#ifndef OCTC_DATAGEN_HPP_
#define OCTC_DATAGEN_HPP_

#include <string>
#include <vector>

#include "octc/dataset.hpp"

namespace octc {

struct DatagenSpec {
  int n_symbols = 0;      /* alphabet size; also the feature dimension */
  int n_sequences = 0;
  int min_symbols = 1;    /* symbols per sequence, inclusive range */
  int max_symbols = 1;
  int min_frames = 1;     /* frames per symbol, inclusive range */
  int max_frames = 1;
  double noise_sigma = 0.0;
};

/* Throws on an impossible spec (empty alphabet, zero frames, inverted
   ranges, negative noise). */
void validate_spec(const DatagenSpec& spec);

std::vector<SequenceData> generate_dataset(const DatagenSpec& spec,
                                           uint64_t seed);

/* Token inventory for generated data: "0", "1", ... */
std::vector<std::string> datagen_alphabet(int n_symbols);

/* Writes seq_NNNNN.octf / seq_NNNNN.txt pairs plus manifest.json into
   dir (created if missing). Returns the manifest path. */
std::string write_dataset(const std::string& dir,
                          const std::vector<SequenceData>& dataset,
                          const Alphabet& alphabet);

}  // namespace octc

#endif  /* OCTC_DATAGEN_HPP_ */

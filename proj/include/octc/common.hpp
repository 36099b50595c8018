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

#ifndef OCTC_COMMON_HPP_
#define OCTC_COMMON_HPP_

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace octc {

using std::int64_t;
using std::uint32_t;
using std::uint64_t;

/* All recoverable failures (bad input, malformed files, invalid config)
   are reported through Error or a subclass. Internal invariant breakage
   uses assert(). */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/* Target labeling has zero probability under the given outputs. */
class UnreachableTargetError : public Error {
 public:
  explicit UnreachableTargetError(const std::string& msg) : Error(msg) {}
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

/* Log verbosity, controlled by the OCTC_LOG environment variable:
   quiet | info (default) | debug. */
enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/* splitmix64; used wherever a cheap keyed/counter-based stream of bits is
   needed (dropout masks) so results do not depend on call interleaving. */
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/* Uniform double in [0, 1) from 64 random bits. */
inline double bits_to_unit(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace octc

#endif  // OCTC_COMMON_HPP_

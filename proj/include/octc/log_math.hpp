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

#ifndef OCTC_LOG_MATH_HPP_
#define OCTC_LOG_MATH_HPP_

#include <cmath>
#include <limits>

namespace octc {

/* Probabilities are kept in the log domain throughout; -inf is log(0). */
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/* log(e^a + e^b), stable. */
inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) {
    const double t = a;
    a = b;
    b = t;
  }
  return a + std::log1p(std::exp(b - a));
}

inline double log_add3(double a, double b, double c) {
  return log_add(log_add(a, b), c);
}

/* log sum over n values. */
inline double log_sum(const double* v, int n) {
  double m = kLogZero;
  for (int i = 0; i < n; ++i)
    if (v[i] > m) m = v[i];
  if (m == kLogZero) return kLogZero;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

}  // namespace octc

#endif  // OCTC_LOG_MATH_HPP_

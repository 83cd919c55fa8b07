// Copyright 2026 The cpapprox Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Helpers shared by the measure, convolution and approximant sources.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cpapprox/measure.hpp"

namespace cpapprox::internal {

inline constexpr double kUnitRoundoff = 0x1p-53;

/// gamma_k = k u / (1 - k u), the classical bound for k rounded operations.
inline double gamma(double k) {
  if (k <= 0) return 0.0;
  const double ku = k * kUnitRoundoff;
  if (ku >= 0.5) return std::numeric_limits<double>::infinity();
  return ku / (1.0 - ku);
}

/// Rounds an error bound upward by a few ulps so that the floating-point
/// evaluation of the bound itself cannot undercount.
inline double round_up(double x) { return x * (1.0 + 4.0 * kUnitRoundoff); }

inline bool is_power_of_two(double w) {
  if (w == 0.0 || !std::isfinite(w)) return false;
  int e = 0;
  return std::abs(std::frexp(w, &e)) == 0.5;
}

inline int compare_keys(std::span<const std::int64_t> a,
                        std::span<const std::int64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

/// Removes the cheapest atoms (pairs, for symmetric input) whose total
/// |weight| fits in `budget`. Returns the measure without those atoms and
/// with unchanged error fields; `removed` receives the dropped mass.
SignedLatticeMeasure drop_smallest(const SignedLatticeMeasure& m, double budget,
                                   double* removed);

/// Replaces w(x) and w(-x) by their mean. Error fields are left unchanged.
SignedLatticeMeasure symmetrize(const SignedLatticeMeasure& m);

struct DenseBox {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> extent;
  std::size_t volume = 0;
};

/// Linear convolution of dense arrays via FFTW. `a` and `b` are row-major
/// over boxes with extents ea and eb; the result has extents ea + eb - 1.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<std::int64_t>& ea,
                                 const std::vector<double>& b,
                                 const std::vector<std::int64_t>& eb,
                                 std::size_t* padded_volume);

}  // namespace cpapprox::internal

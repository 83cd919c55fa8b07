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

// Compound Poisson type approximants to n-fold convolution powers.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cpapprox/measure.hpp"

namespace cpapprox {

/// exp{M} = sum_j M^{*j}/j! by scaling and squaring. The Taylor remainder
/// and all truncations are charged to trunc_err. Throws NumericalRefusal if
/// ||M|| needs more than 60 halvings or if the result is lost to
/// cancellation (its norm falls below 1e-8 of the largest intermediate).
SignedLatticeMeasure measure_exp(const SignedLatticeMeasure& m, double tol);

/// exp{lambda (F - I)}.
SignedLatticeMeasure cp_accompanying(const SymmetricDistribution& f,
                                     double lambda, double tol);

/// D^{*a} = exp{a (F - I) - a (F - I)^{*2} / 2}; a may be negative.
SignedLatticeMeasure hipp_power(const SymmetricDistribution& f, double a,
                                double tol);

/// exp{n (F - I)} * (I - n (F - I)^{*2} / 2).
SignedLatticeMeasure first_order_cp(const SymmetricDistribution& f,
                                    std::int64_t n, double tol);

/// sum_{m=0}^{k} binom(n, m) D^{*(n-m)} * (F - D)^{*m}, for k <= n - 1.
SignedLatticeMeasure bergstrom_partial(const SymmetricDistribution& f,
                                       std::int64_t n, int k, double tol);

/// Exact binomial coefficient rounded to the nearest double. `exact` is set
/// when the double equals the integer. Throws NumericalRefusal when the
/// value exceeds the double range.
double binomial(std::int64_t n, std::int64_t k, bool* exact = nullptr);

struct ApproximantKind {
  enum class Tag { kConvPower, kAccompanyingCP, kHippSCP, kFirstOrderCP,
                   kBergstromPartial };
  Tag tag = Tag::kConvPower;
  int k = 0;  // Bergstrom order; ignored otherwise

  static ApproximantKind conv_power() { return {Tag::kConvPower, 0}; }
  static ApproximantKind accompanying_cp() { return {Tag::kAccompanyingCP, 0}; }
  static ApproximantKind hipp_scp() { return {Tag::kHippSCP, 0}; }
  static ApproximantKind first_order_cp() { return {Tag::kFirstOrderCP, 0}; }
  static ApproximantKind bergstrom(int k) { return {Tag::kBergstromPartial, k}; }

  /// conv, cp, hipp, first, berg<k>.
  std::string name() const;
  static std::optional<ApproximantKind> parse(const std::string& name);

  friend bool operator==(const ApproximantKind&, const ApproximantKind&) = default;
};

/// Builds the approximant of the given kind; ConvPower returns F^{*n}.
SignedLatticeMeasure build_approximant(const SymmetricDistribution& f,
                                       std::int64_t n, ApproximantKind kind,
                                       double tol);

struct ApproximationResult {
  std::int64_t n = 0;
  ApproximantKind kind;
  double tv_distance = 0.0;
  double err_interval = 0.0;
  std::size_t support_size = 0;
  double elapsed = 0.0;  // seconds

  double lower() const {
    return tv_distance > err_interval ? tv_distance - err_interval : 0.0;
  }
  double upper() const { return tv_distance + err_interval; }
};

/// Distance between F^{*n} and the approximant. F^{*n} is computed with
/// tol / 2 and the approximant with tol / 2.
ApproximationResult approximate(const SymmetricDistribution& f, std::int64_t n,
                                ApproximantKind kind, double tol);

/// Same, reusing an already computed F^{*n}.
ApproximationResult approximate_against(const SignedLatticeMeasure& power,
                                        const SymmetricDistribution& f,
                                        std::int64_t n, ApproximantKind kind,
                                        double tol);

}  // namespace cpapprox

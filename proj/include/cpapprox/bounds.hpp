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

// Functionals of symmetric lattice distributions and evaluators for the
// known upper bounds on approximation errors.
//
// Every bound is reported as an explicit part plus a list of terms of the
// form C * coefficient, where C is an absolute constant whose value is not
// known. The constants are looked up in a BoundConfig (default 1.0) only to
// produce total_at_C; the coefficients are always reported separately.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpapprox/measure.hpp"

namespace cpapprox {

class NotLineDecomposable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// delta(y) = sum over x != 0 of min(1, y e F{x}). Discarded tail mass t
/// contributes at most y e t, which is added.
double delta_functional(const SymmetricDistribution& f, double y);

/// Precomputed form of delta_functional for many evaluations of y.
class DeltaFunctional {
 public:
  explicit DeltaFunctional(const SymmetricDistribution& f);
  double operator()(double y) const;

 private:
  std::vector<double> desc_;    // masses of nonzero atoms, descending
  std::vector<double> suffix_;  // suffix_[i] = sum of desc_[i..], ascending order
  double tail_ = 0.0;
};

/// 2 e^x (e^{-x} - 1 + x) / x^2, with g(0) = 1.
double kerstan_g(double x);

struct LineComponent {
  LatticePoint direction;  // primitive, first nonzero coordinate positive
  double p = 0.0;          // F-mass on the line, origin excluded
  /// Normalized one-sided masses: (k, F_m{k y}) for k >= 1 in increasing
  /// order; F_m{-k y} is equal by symmetry.
  std::vector<std::pair<std::int64_t, double>> masses;
  double sigma = 0.0;  // sqrt(2 sum k^2 F_m{k y}); +inf when unbounded
  bool span_ok = false;
  std::int64_t k0 = 0;  // smallest k with F_m{k y} > 0 and F_m{(k+1) y} > 0
};

struct LineMixture {
  std::size_t dim = 1;
  double q = 0.0;
  std::vector<LineComponent> components;

  std::size_t K() const { return components.size(); }
  bool span_ok() const;
  bool sigmas_finite() const;
  /// Every direction is a coordinate unit vector.
  bool axis_aligned() const;
  /// sum_m sqrt(1 + sigma_m).
  double S() const;
};

/// Groups the nonzero support into lines through the origin. Span-condition
/// failures are recorded per component; see require_span().
LineMixture decompose_line_mixture(const SymmetricDistribution& f);

/// Throws NotLineDecomposable naming every component that has no two
/// adjacent occupied multiples of its direction.
void require_span(const LineMixture& lines);

/// Inputs of the non-identically distributed comparison bound, for n
/// summands concentrated on coordinate axes.
struct KnownBoundInputs {
  std::vector<double> q_i;
  std::vector<std::vector<double>> p_im;  // n rows, d columns
  std::vector<double> lambda_m;
  std::vector<double> sigma_m;
  double alpha = 0.0;
  int N_pairs = 0;
};

KnownBoundInputs make_known_inputs(std::vector<double> q_i,
                                   std::vector<std::vector<double>> p_im,
                                   std::vector<double> sigma_m);

/// n identical summands distributed as an axis-aligned line mixture.
KnownBoundInputs known_inputs_iid(const LineMixture& lines, std::int64_t n);

class BoundConfig {
 public:
  /// Value of constant `id`; 1.0 unless overridden.
  double value(const std::string& id) const;
  void set(const std::string& id, double v);
  const std::map<std::string, double>& overrides() const { return c_; }

 private:
  std::map<std::string, double> c_;
};

struct BoundReport {
  std::string bound_id;
  std::int64_t n = 0;
  double explicit_part = 0.0;
  std::vector<std::pair<std::string, double>> generic_terms;
  double total_at_C = 0.0;
  bool applicable = true;
  std::string reason;
  /// True when the bound is on a total variation norm rather than on a
  /// distance (half the norm).
  bool bounds_norm = false;
};

struct BoundParams {
  std::int64_t n = 0;
  double a = 0.0;
  double b = 0.0;
  int k = 1;
};

struct BoundInput {
  const SymmetricDistribution* f = nullptr;
  const LineMixture* lines = nullptr;
  const KnownBoundInputs* known = nullptr;
};

/// Identifiers accepted by evaluate_bound.
const std::vector<std::string>& bound_ids();

/// Throws std::invalid_argument for an unknown id; structural assumptions
/// that fail are reported through applicable and reason.
BoundReport evaluate_bound(const std::string& bound_id, const BoundInput& input,
                           const BoundParams& params, const BoundConfig& cfg);

struct BoundObservation {
  double lhs = 0.0;
  BoundReport report;
};

/// Smallest value of constant `free_id` making every observation satisfy
/// lhs <= total, with the other constants taken from cfg; clipped at 0.
double fit_constant(std::span<const BoundObservation> observations,
                    const std::string& free_id, const BoundConfig& cfg);

void write_bound_csv_header(std::ostream& out);
void write_bound_csv_row(std::ostream& out, const BoundReport& r);

/// "1/2" for simple fractions, otherwise a short decimal.
std::string format_ratio(double x);

}  // namespace cpapprox

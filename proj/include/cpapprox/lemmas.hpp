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

// Computable left- and right-hand sides of the auxiliary inequalities and
// identities used for error bounds.
//
// Each lemma is evaluated on a concrete probability measure. The left-hand
// side carries the error bound of the measure it was computed from; the
// right-hand side is either an explicit number or, when it involves an
// unspecified constant, the coefficient of that constant.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpapprox/measure.hpp"

namespace cpapprox {

struct LemmaParams {
  int k = 1;
  double lambda = 1.0;
  double a = 1.0;
  double b = 1.0;
  double p = 0.5;
  double tau = 1.0;
  int j = 1;
  std::int64_t n = 1;
  std::vector<double> ps;  // per-summand probabilities for "b2"
};

struct LemmaValue {
  std::string lemma_id;
  double lhs = 0.0;
  double lhs_err = 0.0;
  double rhs = 0.0;
  double rhs_err = 0.0;
  /// False when rhs is the coefficient of an unspecified constant.
  bool rhs_explicit = true;
  bool applicable = true;
  std::string reason;

  double ratio() const { return lhs / rhs; }
  /// The inequality fails even after both sides are moved by their errors.
  bool violated() const;
};

/// Lemma identifiers: koD3, aka, normB, norms, cpto1dim, b2, e2p, cero46,
/// c6a, fexp, dexp, d2ftrys_m, d2ftrys_a, fd00, fd2, simi3, m3, thm5, thm10.
const std::vector<std::string>& lemma_ids();

/// `f` must be a probability measure. Lemmas that need symmetry or a line
/// structure report applicable = false when `f` lacks it.
LemmaValue lemma_lhs(const std::string& lemma_id, const SignedLatticeMeasure& f,
                     const LemmaParams& params, double tol);

}  // namespace cpapprox

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

#include <cmath>

#include "cpapprox/lemmas.hpp"
#include "doctest.h"

using namespace cpapprox;

namespace {

const double kE = std::exp(1.0);

SignedLatticeMeasure three_point() {
  return SignedLatticeMeasure::from_atoms(
      1, {{LatticePoint{0}, 0.5}, {LatticePoint{1}, 0.25}, {LatticePoint{-1}, 0.25}});
}

}  // namespace

TEST_SUITE("lemmas") {

TEST_CASE("koD3 on the three-point law") {
  LemmaParams p;
  p.k = 1;
  p.lambda = 8;
  const auto v = lemma_lhs("koD3", three_point(), p, 1e-12);
  CHECK(v.applicable);
  CHECK(v.rhs == doctest::Approx(std::sqrt(2 / (8 * kE))).epsilon(1e-14));
  CHECK(v.rhs == doctest::Approx(0.3033).epsilon(1e-3));
  CHECK(v.lhs <= v.rhs);
  CHECK_FALSE(v.violated());
}

TEST_CASE("e2p with a unit shift") {
  LemmaParams p;
  p.p = 0.5;
  p.n = 32;
  p.tau = 1.0;
  const auto v = lemma_lhs("e2p", SignedLatticeMeasure::point_mass(LatticePoint{1}), p, 1e-12);
  CHECK(v.rhs == doctest::Approx(3.5 / std::sqrt(0.5)));
  CHECK(v.lhs <= v.rhs);
}

TEST_CASE("C6a right-hand side") {
  LemmaParams p;
  p.j = 1;
  p.n = 16;
  p.p = 0.5;
  const auto v = lemma_lhs("c6a", SignedLatticeMeasure::point_mass(LatticePoint{1}), p, 1e-12);
  const double expected =
      std::sqrt(kE) * std::pow(16.0 / 17.0, 8) * std::sqrt(1.0 / (17.0 * 0.25));
  CHECK(v.rhs == doctest::Approx(expected).epsilon(1e-14));
  CHECK(v.lhs <= v.rhs);
}

TEST_CASE("norms: distributions and compound Poisson laws have unit norm") {
  LemmaParams p;
  p.a = 3.0;
  const auto v = lemma_lhs("norms", three_point(), p, 1e-12);
  CHECK_FALSE(v.violated());
}

TEST_CASE("every lemma evaluates on the three-point law") {
  LemmaParams p;
  p.k = 1;
  p.lambda = 4;
  p.a = 2;
  p.b = 3;
  p.n = 8;
  p.ps = {0.2, 0.3};
  for (const std::string& id : lemma_ids()) {
    CAPTURE(id);
    const auto v = lemma_lhs(id, three_point(), p, 1e-11);
    if (v.applicable) CHECK_FALSE(v.violated());
    if (!v.applicable) CHECK_FALSE(v.reason.empty());
  }
}

TEST_CASE("violated() allows for both error bounds") {
  LemmaValue v;
  v.lhs = 1.0;
  v.rhs = 0.9;
  CHECK(v.violated());
  v.lhs_err = 0.05;
  v.rhs_err = 0.05;
  CHECK_FALSE(v.violated());
  v.rhs_explicit = false;
  v.lhs_err = 0.0;
  CHECK_FALSE(v.violated());
}

TEST_CASE("bad input") {
  CHECK_THROWS_AS(lemma_lhs("nope", three_point(), {}, 1e-9), std::invalid_argument);
  const auto half = scale(three_point(), 0.5);
  CHECK_THROWS(lemma_lhs("koD3", half, {}, 1e-9));
}

}  // TEST_SUITE

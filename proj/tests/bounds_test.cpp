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
#include <random>
#include <sstream>

#include "cpapprox/bounds.hpp"
#include "cpapprox/experiments.hpp"
#include "doctest.h"

using namespace cpapprox;

namespace {

const double kE = std::exp(1.0);

SymmetricDistribution three_point() {
  return SymmetricDistribution(SignedLatticeMeasure::from_atoms(
      1, {{LatticePoint{0}, 0.5}, {LatticePoint{1}, 0.25}, {LatticePoint{-1}, 0.25}}));
}

SymmetricDistribution example(ExampleId id, std::int64_t K) {
  ExampleSpec s;
  s.id = id;
  s.truncation_K = K;
  return make_example(s);
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("delta is bounded by y e (1 - q) and by 2N") {
  std::mt19937_64 rng(23);
  const ScanProfile p;
  for (int rep = 0; rep < 200; ++rep) {
    const SymmetricDistribution f(random_symmetric(rng, 3, 15, p));
    const DeltaFunctional delta(f);
    const double N = static_cast<double>(f.pair_count());
    for (double y : {0.01, 0.3, 1.0, 7.0, 100.0, 1e6}) {
      const double d = delta(y);
      CHECK(d == doctest::Approx(delta_functional(f, y)).epsilon(1e-12));
      CHECK(d <= y * kE * (1.0 - f.q()) * (1 + 1e-12));
      CHECK(d <= 2 * N);
    }
    CHECK(delta(1e12) == doctest::Approx(2 * N));
  }
}

TEST_CASE("delta counts the discarded tail") {
  const auto f = example(ExampleId::kEx1, 50);
  const auto g = example(ExampleId::kEx1, 5000);
  for (double y : {1.0, 10.0, 100.0}) CHECK(delta_functional(f, y) >= delta_functional(g, y));
}

TEST_CASE("Kerstan g") {
  CHECK(kerstan_g(0.0) == 1.0);
  CHECK(kerstan_g(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  // Series and closed form agree across the switch point.
  const double x = 1e-3;
  const double closed = 2 * std::exp(x) * (std::exp(-x) - 1 + x) / (x * x);
  CHECK(kerstan_g(x) == doctest::Approx(closed).epsilon(1e-9));
  CHECK(kerstan_g(0.999e-3) == doctest::Approx(closed).epsilon(1e-5));
}

TEST_CASE("line decomposition of the three-point law") {
  const auto lines = decompose_line_mixture(three_point());
  REQUIRE(lines.K() == 1);
  CHECK(lines.components[0].direction == LatticePoint{1});
  CHECK(lines.components[0].p == 0.5);
  CHECK(lines.components[0].sigma == doctest::Approx(1.0));
  CHECK_FALSE(lines.components[0].span_ok);
  CHECK_THROWS_AS(require_span(lines), NotLineDecomposable);
}

TEST_CASE("line decomposition of Example 3") {
  const auto lines = decompose_line_mixture(example(ExampleId::kEx3, 3000));
  REQUIRE(lines.K() == 1);
  CHECK(lines.components[0].span_ok);
  CHECK(lines.components[0].k0 == 1);
  // Conditional on the line, sigma^2 = 2 * sum k^2 F{k} / (1 - q) = 0.5 * 9.
  CHECK(lines.components[0].sigma * lines.components[0].sigma ==
        doctest::Approx(4.5).epsilon(1e-6));
}

TEST_CASE("two-dimensional decomposition groups multiples of a direction") {
  const SymmetricDistribution f(SignedLatticeMeasure::from_atoms(
      2, {{LatticePoint{0, 0}, 0.4},
          {LatticePoint{1, 1}, 0.1}, {LatticePoint{-1, -1}, 0.1},
          {LatticePoint{2, 2}, 0.1}, {LatticePoint{-2, -2}, 0.1},
          {LatticePoint{0, 2}, 0.1}, {LatticePoint{0, -2}, 0.1}}));
  const auto lines = decompose_line_mixture(f);
  REQUIRE(lines.K() == 2);
  CHECK_FALSE(lines.span_ok());
  CHECK_FALSE(lines.axis_aligned());
}

TEST_CASE("Theorem 5 explicit bound") {
  BoundParams bp;
  bp.a = 1.0;
  bp.b = 2.0;
  const auto f = three_point();
  const auto r = evaluate_bound("thm5", BoundInput{&f, nullptr, nullptr}, bp, {});
  CHECK(r.applicable);
  CHECK(r.total_at_C == doctest::Approx((1 + 3 / kE) * 0.5).epsilon(1e-12));
  CHECK(r.generic_terms.empty());
}

TEST_CASE("applicability diagnostics") {
  const auto ex1 = example(ExampleId::kEx1, 1000);
  BoundParams bp;
  bp.n = 64;
  const auto p1 = evaluate_bound("p1is5", BoundInput{&ex1, nullptr, nullptr}, bp, {});
  CHECK_FALSE(p1.applicable);
  CHECK(p1.reason == "q=1/2 < 4/5 and σ₁=∞");
  CHECK(std::isnan(p1.total_at_C));

  const auto f = three_point();
  const auto kr = evaluate_bound("krc1", BoundInput{&f, nullptr, nullptr}, bp, {});
  CHECK_FALSE(kr.applicable);
  CHECK(kr.reason.find("2αe=1.92") != std::string::npos);

  const auto t6 = evaluate_bound("thm6", BoundInput{&f, nullptr, nullptr}, bp, {});
  CHECK_FALSE(t6.applicable);
  CHECK(t6.reason == "span condition fails on component 1 along (1)");

  const SymmetricDistribution axis(SignedLatticeMeasure::from_atoms(
      2, {{LatticePoint{0, 0}, 0.5}, {LatticePoint{1, 0}, 0.125}, {LatticePoint{-1, 0}, 0.125},
          {LatticePoint{2, 0}, 0.125}, {LatticePoint{-2, 0}, 0.125}}));
  const auto k = evaluate_bound("thm6", BoundInput{&axis, nullptr, nullptr}, bp, {});
  CHECK_FALSE(k.applicable);
  CHECK(k.reason == "K=1 < d=2");
  CHECK_THROWS_AS(evaluate_bound("nope", BoundInput{&f, nullptr, nullptr}, bp, {}),
                  std::invalid_argument);
}

TEST_CASE("constant overrides scale the generic part only") {
  ExampleSpec s;
  s.id = ExampleId::kEx2;
  s.n = 10;
  const auto f = make_example(s);
  BoundParams bp;
  bp.n = 100;
  BoundConfig one, two;
  two.set("thm1star.C", 2.0);
  const auto r1 = evaluate_bound("thm1star", BoundInput{&f, nullptr, nullptr}, bp, one);
  const auto r2 = evaluate_bound("thm1star", BoundInput{&f, nullptr, nullptr}, bp, two);
  REQUIRE(r1.applicable);
  REQUIRE_FALSE(r1.generic_terms.empty());
  CHECK(r2.total_at_C - r2.explicit_part ==
        doctest::Approx(2 * (r1.total_at_C - r1.explicit_part)));
  CHECK_THROWS(two.set("thm1star.C", 0.0));
}

TEST_CASE("fit_constant returns the smallest admissible value") {
  std::vector<BoundObservation> obs;
  for (int i = 1; i <= 3; ++i) {
    BoundReport r;
    r.bound_id = "x";
    r.n = i;
    r.explicit_part = 0.1;
    r.generic_terms = {{"x.C", 1.0 / i}};
    obs.push_back({0.1 + 0.5 / i + (i == 2 ? 0.1 : 0.0), r});
  }
  CHECK(fit_constant(obs, "x.C", {}) == doctest::Approx(0.7));
  CHECK_THROWS_AS(fit_constant(std::span(obs).first(2), "x.C", {}), std::invalid_argument);
  CHECK_THROWS_AS(fit_constant(obs, "y.C", {}), std::invalid_argument);
}

TEST_CASE("bound CSV rows") {
  const auto f = three_point();
  BoundParams bp;
  bp.n = 16;
  std::ostringstream os;
  write_bound_csv_header(os);
  write_bound_csv_row(os, evaluate_bound("thm1", BoundInput{&f, nullptr, nullptr}, bp, {}));
  const std::string s = os.str();
  CHECK(s.rfind("bound_id,n,explicit_part,coefficients,total_at_C,applicable,reason\n", 0) == 0);
  CHECK(s.find("thm1,16,") != std::string::npos);
  CHECK(format_ratio(0.5) == "1/2");
  CHECK(format_ratio(0.8) == "4/5");
  CHECK(format_ratio(3.0) == "3");
}

}  // TEST_SUITE

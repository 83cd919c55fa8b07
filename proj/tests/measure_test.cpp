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

#include "cpapprox/measure.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cpapprox;

namespace {

SignedLatticeMeasure three_point() {
  return SignedLatticeMeasure::from_atoms(
      1, {{LatticePoint{0}, 0.5}, {LatticePoint{1}, 0.25}, {LatticePoint{-1}, 0.25}});
}

SignedLatticeMeasure random_measure(std::mt19937_64& rng, int dim, int atoms, int range,
                                    bool nonnegative) {
  std::uniform_int_distribution<std::int64_t> coord(-range, range);
  std::uniform_real_distribution<double> w(nonnegative ? 0.0 : -1.0, 1.0);
  std::vector<Atom> out;
  for (int i = 0; i < atoms; ++i) {
    std::vector<std::int64_t> c(dim);
    for (auto& x : c) x = coord(rng);
    out.push_back({LatticePoint(c), w(rng)});
  }
  return SignedLatticeMeasure::from_atoms(dim, out);
}

// |a - b| summed over the union of supports.
double l1(const SignedLatticeMeasure& a, const SignedLatticeMeasure& b) {
  const SignedLatticeMeasure d = linear_combine({{1.0, a}, {-1.0, b}});
  return d.tv();
}

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("from_atoms sorts, merges duplicates and drops zeros") {
  const auto m = SignedLatticeMeasure::from_atoms(
      2, {{LatticePoint{1, 0}, 0.25}, {LatticePoint{-1, 2}, 0.5},
          {LatticePoint{1, 0}, 0.25}, {LatticePoint{3, 3}, 0.0}});
  REQUIRE(m.size() == 2);
  CHECK(m.point(0) == LatticePoint{-1, 2});
  CHECK(m.weight(1) == 0.5);
  CHECK(m.weight_at(LatticePoint{3, 3}) == 0.0);
  CHECK(m.tv() == 1.0);
}

TEST_CASE("dimension and coordinate checks") {
  CHECK_THROWS_AS(SignedLatticeMeasure::from_atoms(2, {{LatticePoint{1}, 1.0}}),
                  DimensionMismatch);
  CHECK_THROWS_AS(
      SignedLatticeMeasure::point_mass(LatticePoint{kCoordinateLimit + 1}), CoordinateOverflow);
  const auto a = SignedLatticeMeasure::identity(1);
  const auto b = SignedLatticeMeasure::identity(2);
  CHECK_THROWS_AS(convolve(a, b), DimensionMismatch);
  const auto far = SignedLatticeMeasure::point_mass(LatticePoint{kCoordinateLimit});
  CHECK_THROWS_AS(convolve(far, far), CoordinateOverflow);
}

TEST_CASE("F - I is computed atomwise") {
  const auto f = three_point();
  const auto id = SignedLatticeMeasure::identity(1);
  const auto g = linear_combine({{1.0, f}, {-1.0, id}});
  CHECK(g.weight_at(LatticePoint{0}) == -0.5);
  CHECK(g.weight_at(LatticePoint{1}) == 0.25);
  CHECK(g.weight_at(LatticePoint{-1}) == 0.25);
  CHECK(tv_norm(g).value == 1.0);
}

TEST_CASE("squaring the three-point law") {
  const auto f = three_point();
  const auto f2 = convolve(f, f);
  CHECK(f2.weight_at(LatticePoint{0}) == 0.375);
  CHECK(f2.weight_at(LatticePoint{2}) == 0.0625);
  CHECK(f2.is_symmetric());
}

TEST_CASE("fourth power matches the expanded Laurent polynomial") {
  // Central coefficient of ((2 + x + 1/x) / 4)^4, by enumerating all 3^4
  // choices of a term from each factor.
  const int w[3] = {1, 2, 1};
  long long central = 0;
  for (int i = 0; i < 81; ++i) {
    int e = 0, v = 1, r = i;
    for (int j = 0; j < 4; ++j, r /= 3) {
      e += r % 3 - 1;
      v *= w[r % 3];
    }
    if (e == 0) central += v;
  }
  CHECK(central == 70);
  const auto f4 = convolution_power(three_point(), 4, 0.0);
  CHECK(f4.weight_at(LatticePoint{0}) == doctest::Approx(double(central) / 256.0).epsilon(1e-15));
  CHECK(f4.weight_at(LatticePoint{0}) == doctest::Approx(35.0 / 128.0).epsilon(1e-15));
  CHECK(f4.error_bound() < 1e-14);
}

TEST_CASE("tv norm of a stored distribution is one") {
  const SymmetricDistribution f(three_point());
  CHECK(tv_norm(f.measure()).value == 1.0);
  CHECK(tv_norm(f.measure()).err == 0.0);
}

TEST_CASE("truncate drops the smallest symmetric pair") {
  const auto m = SignedLatticeMeasure::from_atoms(
      1, {{LatticePoint{0}, 0.9}, {LatticePoint{5}, 1e-9}, {LatticePoint{-5}, 1e-9}});
  const auto t = truncate(m, 1e-8);
  REQUIRE(t.size() == 1);
  CHECK(t.weight(0) == 0.9);
  CHECK(t.trunc_err() == doctest::Approx(2e-9).epsilon(1e-12));
  CHECK(t.trunc_err() >= 2e-9);
  CHECK(truncate(m, 1.5e-9).size() == 3);  // the pair costs 2e-9
  CHECK_THROWS_AS(truncate(m, -1.0), std::invalid_argument);
  CHECK(truncate(m, 0.0).size() == 3);
}

TEST_CASE("symmetry check") {
  CHECK(symmetry_check(three_point()));
  std::vector<Atom> atoms{{LatticePoint{0}, 0.5}};
  for (int k = 1; k <= 100; ++k) {
    const double w = 1.0 / (double(k) * (k + 1) * (k + 2));
    atoms.push_back({LatticePoint{k}, w});
    atoms.push_back({LatticePoint{-k}, w});
  }
  CHECK(symmetry_check(SignedLatticeMeasure::from_atoms(1, atoms)));
  const auto skew = SignedLatticeMeasure::from_atoms(
      1, {{LatticePoint{0}, 0.5}, {LatticePoint{1}, 0.3}, {LatticePoint{-1}, 0.2}});
  CHECK_FALSE(symmetry_check(skew));
}

TEST_CASE("SymmetricDistribution validation") {
  CHECK_THROWS_AS(SymmetricDistribution(SignedLatticeMeasure::from_atoms(
                      1, {{LatticePoint{0}, 0.5}, {LatticePoint{1}, 0.25}})),
                  InvalidDistribution);
  CHECK_THROWS_AS(SymmetricDistribution(SignedLatticeMeasure::identity(1)),
                  InvalidDistribution);
  CHECK_THROWS_AS(SymmetricDistribution(SignedLatticeMeasure::from_atoms(
                      1, {{LatticePoint{1}, 0.5}, {LatticePoint{-1}, 0.5}})),
                  InvalidDistribution);
  CHECK_THROWS_AS(SymmetricDistribution(SignedLatticeMeasure::from_atoms(
                      1, {{LatticePoint{0}, 1.2}, {LatticePoint{1}, -0.1}, {LatticePoint{-1}, -0.1}})),
                  InvalidDistribution);
  const SymmetricDistribution f(SignedLatticeMeasure::from_atoms(
      1, {{LatticePoint{0}, 0.5}, {LatticePoint{1}, 0.3}, {LatticePoint{-1}, 0.2}}));
  CHECK(f.measure().is_symmetric());
  CHECK(f.measure().weight_at(LatticePoint{1}) == 0.25);
  CHECK(f.q() == 0.5);
  CHECK(f.pair_count() == 1);
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(7);
  const auto m = random_measure(rng, 3, 12, 5, false).with_errors(1e-9, 3e-17);
  std::stringstream ss;
  write_measure(ss, m);
  const auto back = read_measure(ss);
  REQUIRE(back.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back.point(i) == m.point(i));
    CHECK(back.weight(i) == m.weight(i));
  }
  CHECK(back.trunc_err() == m.trunc_err());
  CHECK(back.round_err() == m.round_err());
}

TEST_CASE("parse errors name the line") {
  std::stringstream ss("dim=1 trunc_err=0\n0 0.5\n1 abc\n");
  try {
    read_measure(ss);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("direct and FFT paths agree within their error bounds") {
  std::mt19937_64 rng(11);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_measure(rng, dim, 40, 6, rep % 2 == 0);
      const auto b = random_measure(rng, dim, 40, 6, rep % 2 == 0);
      const auto d = convolve(a, b, ConvolvePath::kDirect);
      const auto f = convolve(a, b, ConvolvePath::kFft);
      CHECK(l1(d, f) <= d.error_bound() + f.error_bound() + 1e-300);
    }
  }
}

TEST_CASE("convolution is commutative and associative within error") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const int dim = 1 + rep % 3;
    const auto a = random_measure(rng, dim, 15, 4, false);
    const auto b = random_measure(rng, dim, 15, 4, false);
    const auto c = random_measure(rng, dim, 15, 4, false);
    const auto ab = convolve(a, b);
    const auto ba = convolve(b, a);
    CHECK(l1(ab, ba) <= ab.error_bound() + ba.error_bound());
    const auto ab_c = convolve(ab, c);
    const auto bc = convolve(b, c);
    const auto a_bc = convolve(a, bc);
    CHECK(l1(ab_c, a_bc) <= ab_c.error_bound() + a_bc.error_bound());
  }
}

TEST_CASE("symmetry and mass are preserved by convolution powers") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto raw = random_measure(rng, 1 + rep % 2, 6, 3, true);
    std::vector<Atom> atoms = raw.atoms();
    for (const Atom& a : raw.atoms()) atoms.push_back({-a.point, a.weight});
    atoms.push_back({LatticePoint::origin(raw.dim()), 1.0});
    auto sym = SignedLatticeMeasure::from_atoms(raw.dim(), atoms);
    const SymmetricDistribution f(scale(sym, 1.0 / sym.total_mass()));
    const auto p = convolution_power(f.measure(), 5 + rep, 1e-10);
    CHECK(p.is_symmetric());
    CHECK(std::abs(p.total_mass() - 1.0) <= p.error_bound() + f.measure().error_bound() * 20);
  }
}

TEST_CASE("truncation error is sound against the exact power") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 8; ++rep) {
    auto raw = random_measure(rng, 1, 5, 8, true);
    std::vector<Atom> atoms = raw.atoms();
    for (const Atom& a : raw.atoms()) atoms.push_back({-a.point, a.weight});
    atoms.push_back({LatticePoint{0}, 0.7});
    const auto sym = SignedLatticeMeasure::from_atoms(1, atoms);
    const SymmetricDistribution f(scale(sym, 1.0 / sym.total_mass()));
    const int n = 8 + 7 * rep;
    const double tol = 1e-6;
    const auto p = convolution_power(f.measure(), n, tol);
    const auto exact = oracle::power(oracle::to_rational(f.measure()), n);
    const double dist = oracle::l1_distance(exact, p);
    CHECK(p.trunc_err() > 0.0);
    CHECK(p.trunc_err() <= tol);
    CHECK(dist <= p.error_bound());
  }
}

}  // TEST_SUITE

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

// Finitely supported signed measures on the integer lattice Z^d.
//
// A SignedLatticeMeasure stores its atoms sorted lexicographically by
// coordinate, together with two error bounds measured in total variation
// norm against the exact measure the value stands for:
//
//   trunc_err  mass deliberately discarded (tails, small atoms) and the
//              propagation of such losses through later operations;
//   round_err  a worst-case bound on floating-point rounding, including
//              its propagation.
//
// error_bound() is their sum and is what every consumer should use when it
// needs an interval for a norm or a distance.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpapprox {

/// Supports whose coordinates exceed this magnitude are refused.
inline constexpr std::int64_t kCoordinateLimit = std::int64_t{1} << 40;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CoordinateOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class InvalidDistribution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation would only produce numbers dominated by
/// cancellation or error bounds, or would exceed resource caps.
class NumericalRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(std::vector<std::int64_t> coords);
  LatticePoint(std::initializer_list<std::int64_t> coords);
  explicit LatticePoint(std::span<const std::int64_t> coords);

  static LatticePoint origin(std::size_t dim);

  std::size_t dim() const { return coords_.size(); }
  std::span<const std::int64_t> coords() const { return coords_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  bool is_origin() const;

  LatticePoint operator-() const;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint& a, const LatticePoint& b) {
    return a.coords_ <=> b.coords_;
  }

  std::string to_string() const;

 private:
  std::vector<std::int64_t> coords_;
};

struct Atom {
  LatticePoint point;
  double weight = 0.0;
};

class SignedLatticeMeasure {
 public:
  /// The zero measure on Z^dim.
  explicit SignedLatticeMeasure(std::size_t dim = 1);

  /// Builds a measure from unsorted atoms; duplicate points are summed and
  /// zero weights dropped.
  static SignedLatticeMeasure from_atoms(std::size_t dim,
                                         const std::vector<Atom>& atoms,
                                         double trunc_err = 0.0,
                                         double round_err = 0.0);

  /// Takes ownership of flat, already sorted and duplicate-free storage.
  /// keys.size() must equal dim * weights.size(). Zero weights are dropped.
  static SignedLatticeMeasure from_sorted(std::size_t dim,
                                          std::vector<std::int64_t> keys,
                                          std::vector<double> weights,
                                          double trunc_err, double round_err);

  /// Unit mass at the origin (the identity of convolution).
  static SignedLatticeMeasure identity(std::size_t dim);
  static SignedLatticeMeasure point_mass(const LatticePoint& at,
                                         double weight = 1.0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  std::span<const std::int64_t> key(std::size_t i) const {
    return {keys_.data() + i * dim_, dim_};
  }
  LatticePoint point(std::size_t i) const { return LatticePoint(key(i)); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const std::int64_t> flat_keys() const { return keys_; }

  /// Weight stored at `p`, or 0 when p is not in the support.
  double weight_at(const LatticePoint& p) const;
  std::optional<std::size_t> find(std::span<const std::int64_t> p) const;

  double trunc_err() const { return trunc_err_; }
  double round_err() const { return round_err_; }
  double error_bound() const { return trunc_err_ + round_err_; }

  /// Sum of |weights|, accumulated in key order.
  double tv() const { return cached_tv_; }
  /// Sum of weights, accumulated in key order.
  double total_mass() const;
  /// Sum of squared weights, square-rooted.
  double l2_norm() const;
  double max_abs_weight() const;

  /// weight(x) == weight(-x) for every stored atom, compared exactly.
  bool is_symmetric() const { return symmetric_; }
  bool all_nonnegative() const;

  /// Per-dimension inclusive bounds of the support. Empty measure: no box.
  std::optional<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>
  bounding_box() const;

  std::vector<Atom> atoms() const;

  /// Same atoms, with the given error bounds.
  SignedLatticeMeasure with_errors(double trunc_err, double round_err) const&;
  SignedLatticeMeasure with_errors(double trunc_err, double round_err) &&;

 private:
  void finalize();

  std::size_t dim_;
  std::vector<std::int64_t> keys_;
  std::vector<double> weights_;
  double trunc_err_ = 0.0;
  double round_err_ = 0.0;
  double cached_tv_ = 0.0;
  bool symmetric_ = true;
};

/// Value of a total variation norm with the error bound inherited from the
/// measure it was computed on.
struct TvNorm {
  double value = 0.0;
  double err = 0.0;

  double lower() const { return value > err ? value - err : 0.0; }
  double upper() const { return value + err; }
};

struct Term {
  double coefficient;
  std::reference_wrapper<const SignedLatticeMeasure> measure;
};

/// Atomwise sum of coefficient * measure. trunc_err = sum |c_i| trunc_err_i.
SignedLatticeMeasure linear_combine(std::span<const Term> terms);
SignedLatticeMeasure linear_combine(std::initializer_list<Term> terms);

/// c * m.
SignedLatticeMeasure scale(const SignedLatticeMeasure& m, double c);

enum class ConvolvePath { kAuto, kDirect, kFft };

/// (a * b)[p] = sum over u + v = p of a[u] b[v].
///
/// kAuto picks between direct accumulation over a dense box, direct
/// sort-merge over a sparse support, and an FFT over the dense box. When
/// both inputs are symmetric the result is symmetrized exactly.
SignedLatticeMeasure convolve(const SignedLatticeMeasure& a,
                              const SignedLatticeMeasure& b,
                              ConvolvePath path = ConvolvePath::kAuto);

/// m^{*n} by square-and-multiply; each convolution is followed by a
/// truncate() with budget tol / (2 ceil(log2 n) + 1).
SignedLatticeMeasure convolution_power(const SignedLatticeMeasure& m,
                                       std::int64_t n, double tol);

TvNorm tv_norm(const SignedLatticeMeasure& m);

/// Half the total variation norm of a - b.
TvNorm tv_distance(const SignedLatticeMeasure& a, const SignedLatticeMeasure& b);

/// Drops the atoms of smallest |weight| (ties: lexicographically smaller key
/// first) while their total stays within eps. Symmetric inputs lose atoms in
/// +-pairs. The dropped mass is added to trunc_err.
SignedLatticeMeasure truncate(const SignedLatticeMeasure& m, double eps);

bool symmetry_check(const SignedLatticeMeasure& m);

/// A probability measure on Z^d, symmetric about the origin, with
/// 0 < F{0} < 1.
class SymmetricDistribution {
 public:
  /// Description of mass removed before the measure was stored, used by
  /// functionals that need the whole distribution (second moments, delta).
  struct Tail {
    double mass = 0.0;
    /// Sum of |k|^2 over discarded atoms (d = 1), +inf when divergent.
    double second_moment = 0.0;
  };

  /// Validates nonnegativity, total mass and q, then enforces symmetry by
  /// averaging the weights at x and -x.
  explicit SymmetricDistribution(SignedLatticeMeasure m,
                                 std::optional<Tail> tail = std::nullopt);

  const SignedLatticeMeasure& measure() const { return measure_; }
  std::size_t dim() const { return measure_.dim(); }
  double q() const { return q_; }
  const std::optional<Tail>& tail() const { return tail_; }

  /// Number of symmetric pairs {x, -x} in the stored support.
  std::size_t pair_count() const { return (measure_.size() - 1) / 2; }
  /// True when nothing was discarded, so the support is exactly finite.
  bool finite_support() const { return measure_.trunc_err() == 0.0; }

 private:
  SignedLatticeMeasure measure_;
  double q_ = 0.0;
  std::optional<Tail> tail_;
};

// Text format:
//   # comment
//   dim=<d> trunc_err=<e> [round_err=<r>]
//   k1 ... kd weight
void write_measure(std::ostream& out, const SignedLatticeMeasure& m);
SignedLatticeMeasure read_measure(std::istream& in);
void save_measure(const std::string& path, const SignedLatticeMeasure& m);
SignedLatticeMeasure load_measure(const std::string& path);

}  // namespace cpapprox

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

#include "cpapprox/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "internal.hpp"

namespace cpapprox {
namespace {

void check_coordinate(std::int64_t c) {
  if (c > kCoordinateLimit || c < -kCoordinateLimit) {
    throw CoordinateOverflow("lattice coordinate " + std::to_string(c) +
                             " exceeds the supported range 2^40");
  }
}

}  // namespace

LatticePoint::LatticePoint(std::vector<std::int64_t> coords)
    : coords_(std::move(coords)) {}

LatticePoint::LatticePoint(std::initializer_list<std::int64_t> coords)
    : coords_(coords) {}

LatticePoint::LatticePoint(std::span<const std::int64_t> coords)
    : coords_(coords.begin(), coords.end()) {}

LatticePoint LatticePoint::origin(std::size_t dim) {
  return LatticePoint(std::vector<std::int64_t>(dim, 0));
}

bool LatticePoint::is_origin() const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [](std::int64_t c) { return c == 0; });
}

LatticePoint LatticePoint::operator-() const {
  std::vector<std::int64_t> neg(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) neg[i] = -coords_[i];
  return LatticePoint(std::move(neg));
}

std::string LatticePoint::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(coords_[i]);
  }
  return out + ")";
}

SignedLatticeMeasure::SignedLatticeMeasure(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DimensionMismatch("dimension must be at least 1");
}

SignedLatticeMeasure SignedLatticeMeasure::from_atoms(
    std::size_t dim, const std::vector<Atom>& atoms, double trunc_err,
    double round_err) {
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const Atom& a : atoms) {
    if (a.point.dim() != dim) {
      throw DimensionMismatch("atom " + a.point.to_string() +
                              " does not have dimension " +
                              std::to_string(dim));
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return atoms[i].point < atoms[j].point;
                   });
  std::vector<std::int64_t> keys;
  std::vector<double> weights;
  keys.reserve(atoms.size() * dim);
  weights.reserve(atoms.size());
  for (std::size_t idx = 0; idx < order.size();) {
    const LatticePoint& p = atoms[order[idx]].point;
    double w = 0.0;
    while (idx < order.size() && atoms[order[idx]].point == p) {
      w += atoms[order[idx]].weight;
      ++idx;
    }
    keys.insert(keys.end(), p.coords().begin(), p.coords().end());
    weights.push_back(w);
  }
  return from_sorted(dim, std::move(keys), std::move(weights), trunc_err,
                     round_err);
}

SignedLatticeMeasure SignedLatticeMeasure::from_sorted(
    std::size_t dim, std::vector<std::int64_t> keys,
    std::vector<double> weights, double trunc_err, double round_err) {
  if (keys.size() != dim * weights.size()) {
    throw DimensionMismatch("key storage does not match dimension");
  }
  if (!(trunc_err >= 0.0) || !(round_err >= 0.0)) {
    throw std::invalid_argument("error bounds must be nonnegative");
  }
  SignedLatticeMeasure m(dim);
  m.keys_ = std::move(keys);
  m.weights_ = std::move(weights);
  m.trunc_err_ = trunc_err;
  m.round_err_ = round_err;
  m.finalize();
  return m;
}

SignedLatticeMeasure SignedLatticeMeasure::identity(std::size_t dim) {
  return point_mass(LatticePoint::origin(dim), 1.0);
}

SignedLatticeMeasure SignedLatticeMeasure::point_mass(const LatticePoint& at,
                                                      double weight) {
  std::vector<std::int64_t> keys(at.coords().begin(), at.coords().end());
  return from_sorted(at.dim(), std::move(keys), {weight}, 0.0, 0.0);
}

void SignedLatticeMeasure::finalize() {
  std::size_t out = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    if (!std::isfinite(weights_[i])) {
      throw NumericalRefusal("non-finite atom weight");
    }
    if (out != i) {
      std::copy_n(keys_.begin() + i * dim_, dim_, keys_.begin() + out * dim_);
      weights_[out] = weights_[i];
    }
    ++out;
  }
  weights_.resize(out);
  keys_.resize(out * dim_);
  for (std::int64_t c : keys_) check_coordinate(c);
  for (std::size_t i = 1; i < out; ++i) {
    if (internal::compare_keys(key(i - 1), key(i)) >= 0) {
      throw std::invalid_argument("atom keys are not strictly increasing");
    }
  }
  cached_tv_ = 0.0;
  for (double w : weights_) cached_tv_ += std::abs(w);
  // Negation reverses lexicographic order, so x and -x sit at mirrored
  // positions when the support is symmetric.
  symmetric_ = true;
  for (std::size_t i = 0, j = out; i < out && symmetric_; ++i) {
    --j;
    if (i > j) break;
    if (weights_[i] != weights_[j]) symmetric_ = false;
    auto a = key(i);
    auto b = key(j);
    for (std::size_t d = 0; d < dim_ && symmetric_; ++d) {
      if (a[d] != -b[d]) symmetric_ = false;
    }
  }
}

std::optional<std::size_t> SignedLatticeMeasure::find(
    std::span<const std::int64_t> p) const {
  if (p.size() != dim_) throw DimensionMismatch("point dimension mismatch");
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const int c = internal::compare_keys(key(mid), p);
    if (c == 0) return mid;
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return std::nullopt;
}

double SignedLatticeMeasure::weight_at(const LatticePoint& p) const {
  auto idx = find(p.coords());
  return idx ? weights_[*idx] : 0.0;
}

double SignedLatticeMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double SignedLatticeMeasure::l2_norm() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return std::sqrt(s);
}

double SignedLatticeMeasure::max_abs_weight() const {
  double m = 0.0;
  for (double w : weights_) m = std::max(m, std::abs(w));
  return m;
}

bool SignedLatticeMeasure::all_nonnegative() const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [](double w) { return w >= 0.0; });
}

std::optional<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>>
SignedLatticeMeasure::bounding_box() const {
  if (empty()) return std::nullopt;
  std::vector<std::int64_t> lo(key(0).begin(), key(0).end());
  std::vector<std::int64_t> hi = lo;
  for (std::size_t i = 1; i < size(); ++i) {
    auto k = key(i);
    for (std::size_t d = 0; d < dim_; ++d) {
      lo[d] = std::min(lo[d], k[d]);
      hi[d] = std::max(hi[d], k[d]);
    }
  }
  return std::make_pair(std::move(lo), std::move(hi));
}

std::vector<Atom> SignedLatticeMeasure::atoms() const {
  std::vector<Atom> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back({point(i), weights_[i]});
  return out;
}

SignedLatticeMeasure SignedLatticeMeasure::with_errors(double trunc_err,
                                                       double round_err) const& {
  SignedLatticeMeasure copy = *this;
  return std::move(copy).with_errors(trunc_err, round_err);
}

SignedLatticeMeasure SignedLatticeMeasure::with_errors(double trunc_err,
                                                       double round_err) && {
  if (!(trunc_err >= 0.0) || !(round_err >= 0.0)) {
    throw std::invalid_argument("error bounds must be nonnegative");
  }
  trunc_err_ = trunc_err;
  round_err_ = round_err;
  return std::move(*this);
}

SignedLatticeMeasure linear_combine(std::span<const Term> terms) {
  if (terms.empty()) throw std::invalid_argument("linear_combine: no terms");
  const std::size_t dim = terms[0].measure.get().dim();
  for (const Term& t : terms) {
    if (t.measure.get().dim() != dim) {
      throw DimensionMismatch("linear_combine: dimensions differ");
    }
    if (!std::isfinite(t.coefficient)) {
      throw std::invalid_argument("linear_combine: non-finite coefficient");
    }
  }

  // Each output weight is a sum of at most T products; products by powers
  // of two are exact.
  double trunc = 0.0;
  double round = 0.0;
  double weighted_norm = 0.0;
  std::size_t inexact_products = 0;
  for (const Term& t : terms) {
    const double c = std::abs(t.coefficient);
    trunc += c * t.measure.get().trunc_err();
    round += c * t.measure.get().round_err();
    weighted_norm += c * t.measure.get().tv();
    if (!internal::is_power_of_two(t.coefficient) && t.coefficient != 0.0) {
      ++inexact_products;
    }
  }
  const double ops = static_cast<double>(inexact_products) +
                     static_cast<double>(terms.size() - 1);
  round += internal::gamma(ops) * weighted_norm;

  std::vector<std::int64_t> keys;
  std::vector<double> weights;
  if (terms.size() == 1) {
    const SignedLatticeMeasure& m = terms[0].measure.get();
    keys.assign(m.flat_keys().begin(), m.flat_keys().end());
    weights.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      weights[i] = terms[0].coefficient * m.weight(i);
    }
  } else {
    // k-way merge over sorted supports; ties accumulate in term order.
    std::vector<std::size_t> cursor(terms.size(), 0);
    std::size_t total = 0;
    for (const Term& t : terms) total += t.measure.get().size();
    keys.reserve(total * dim);
    weights.reserve(total);
    while (true) {
      std::span<const std::int64_t> best;
      bool have = false;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const SignedLatticeMeasure& m = terms[t].measure.get();
        if (cursor[t] >= m.size()) continue;
        auto k = m.key(cursor[t]);
        if (!have || internal::compare_keys(k, best) < 0) {
          best = k;
          have = true;
        }
      }
      if (!have) break;
      std::vector<std::int64_t> point(best.begin(), best.end());
      double w = 0.0;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const SignedLatticeMeasure& m = terms[t].measure.get();
        if (cursor[t] < m.size() &&
            internal::compare_keys(m.key(cursor[t]), point) == 0) {
          w += terms[t].coefficient * m.weight(cursor[t]);
          ++cursor[t];
        }
      }
      keys.insert(keys.end(), point.begin(), point.end());
      weights.push_back(w);
    }
  }
  return SignedLatticeMeasure::from_sorted(dim, std::move(keys),
                                           std::move(weights), trunc,
                                           internal::round_up(round));
}

SignedLatticeMeasure linear_combine(std::initializer_list<Term> terms) {
  return linear_combine(std::span<const Term>(terms.begin(), terms.size()));
}

SignedLatticeMeasure scale(const SignedLatticeMeasure& m, double c) {
  return linear_combine({Term{c, m}});
}

TvNorm tv_norm(const SignedLatticeMeasure& m) {
  return {m.tv(), m.error_bound()};
}

TvNorm tv_distance(const SignedLatticeMeasure& a,
                   const SignedLatticeMeasure& b) {
  const SignedLatticeMeasure diff = linear_combine({{1.0, a}, {-1.0, b}});
  return {0.5 * diff.tv(), 0.5 * diff.error_bound()};
}

namespace internal {

SignedLatticeMeasure drop_smallest(const SignedLatticeMeasure& m, double budget,
                                   double* removed) {
  *removed = 0.0;
  const std::size_t n = m.size();
  if (budget <= 0.0 || n == 0) return m;
  // A group is a single atom, or the pair {x, -x} when m is symmetric. The
  // group is named by its smallest index, which is also its smallest key.
  struct Group {
    double cost;
    std::size_t first;
  };
  std::vector<Group> groups;
  const bool paired = m.is_symmetric();
  if (paired) {
    for (std::size_t i = 0; i <= (n - 1) / 2; ++i) {
      const std::size_t j = n - 1 - i;
      const double cost =
          i == j ? std::abs(m.weight(i))
                 : std::abs(m.weight(i)) + std::abs(m.weight(j));
      if (cost <= budget) groups.push_back({cost, i});
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double cost = std::abs(m.weight(i));
      if (cost <= budget) groups.push_back({cost, i});
    }
  }
  // Groups costing more than the budget can never be dropped, so leaving
  // them out of the sort does not change the selected prefix.
  const auto before = [](const Group& a, const Group& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.first < b.first;
  };
  // Find the longest prefix of the sorted order that fits, without sorting
  // everything: halve the candidate range with nth_element and take the lower
  // half whole whenever it fits.
  std::size_t lo = 0;
  std::size_t hi = groups.size();
  double spent = 0.0;
  while (hi - lo > 64) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(groups.begin() + lo, groups.begin() + mid, groups.begin() + hi,
                     before);
    double part = 0.0;
    for (std::size_t i = lo; i < mid; ++i) part += groups[i].cost;
    if (spent + part <= budget) {
      spent += part;
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::sort(groups.begin() + lo, groups.begin() + hi, before);
  for (; lo < hi && spent + groups[lo].cost <= budget; ++lo) spent += groups[lo].cost;
  std::vector<char> drop(n, 0);
  const std::size_t dropped = lo;
  for (std::size_t i = 0; i < dropped; ++i) {
    drop[groups[i].first] = 1;
    if (paired) drop[n - 1 - groups[i].first] = 1;
  }
  if (dropped == 0) return m;
  std::vector<std::int64_t> keys;
  std::vector<double> weights;
  keys.reserve(m.flat_keys().size());
  weights.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (drop[i]) continue;
    auto k = m.key(i);
    keys.insert(keys.end(), k.begin(), k.end());
    weights.push_back(m.weight(i));
  }
  *removed = spent;
  return SignedLatticeMeasure::from_sorted(m.dim(), std::move(keys),
                                           std::move(weights), m.trunc_err(),
                                           m.round_err());
}

SignedLatticeMeasure symmetrize(const SignedLatticeMeasure& m) {
  if (m.is_symmetric()) return m;
  const std::size_t dim = m.dim();
  std::vector<Atom> atoms;
  atoms.reserve(2 * m.size());
  std::vector<std::int64_t> neg(dim);
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto k = m.key(i);
    for (std::size_t d = 0; d < dim; ++d) neg[d] = -k[d];
    auto j = m.find(neg);
    const double mirror = j ? m.weight(*j) : 0.0;
    const double avg = 0.5 * (m.weight(i) + mirror);
    atoms.push_back({LatticePoint(k), avg});
    if (!j) atoms.push_back({LatticePoint(neg), avg});
  }
  return SignedLatticeMeasure::from_atoms(dim, atoms, m.trunc_err(),
                                          m.round_err());
}

}  // namespace internal

SignedLatticeMeasure truncate(const SignedLatticeMeasure& m, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("truncate: eps must be >= 0");
  if (eps == 0.0) return m;
  double removed = 0.0;
  SignedLatticeMeasure out = internal::drop_smallest(m, eps, &removed);
  if (removed == 0.0) return out;
  return std::move(out).with_errors(
      internal::round_up(m.trunc_err() + removed), m.round_err());
}

bool symmetry_check(const SignedLatticeMeasure& m) { return m.is_symmetric(); }

SymmetricDistribution::SymmetricDistribution(SignedLatticeMeasure m,
                                             std::optional<Tail> tail)
    : measure_(internal::symmetrize(m)), tail_(tail) {
  if (!m.all_nonnegative()) {
    throw InvalidDistribution("distribution has a negative weight");
  }
  const double mass = measure_.total_mass();
  const double slack = measure_.error_bound() + 1e-12;
  if (std::abs(mass - 1.0) > slack) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution mass " << mass << " differs from 1 by more than "
        << slack;
    throw InvalidDistribution(msg.str());
  }
  q_ = measure_.weight_at(LatticePoint::origin(measure_.dim()));
  if (!(q_ > 0.0 && q_ < 1.0)) {
    throw InvalidDistribution("mass at the origin must lie in (0, 1)");
  }
  if (tail_ && (!(tail_->mass >= 0.0) || !(tail_->second_moment >= 0.0))) {
    throw InvalidDistribution("tail description must be nonnegative");
  }
}

}  // namespace cpapprox

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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include "cpapprox/measure.hpp"
#include "internal.hpp"

namespace cpapprox {
namespace {

using internal::kUnitRoundoff;

// Dense work arrays above this many cells are not allocated.
constexpr double kDenseCap = double(1 << 24);
// Below this many products the direct paths always win.
constexpr double kDirectAlways = double(1 << 16);
// Sparse sort-merge keeps one entry per product.
constexpr double kSparseCap = 2.5e7;

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

std::int64_t good_size(std::int64_t n) {
  for (std::int64_t m = std::max<std::int64_t>(n, 1);; ++m) {
    std::int64_t r = m;
    for (std::int64_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

// Copies a row-major block with extents `ext` into a row-major array with
// extents `outer` (each outer[d] >= ext[d]), anchored at the origin.
void scatter_block(const double* src, const std::vector<std::int64_t>& ext,
                   double* dst, const std::vector<std::int64_t>& outer) {
  const std::size_t dim = ext.size();
  const std::int64_t row = ext[dim - 1];
  std::int64_t rows = 1;
  for (std::size_t d = 0; d + 1 < dim; ++d) rows *= ext[d];
  std::vector<std::int64_t> idx(dim, 0);
  for (std::int64_t r = 0; r < rows; ++r) {
    std::int64_t off = 0;
    for (std::size_t d = 0; d + 1 < dim; ++d) off = off * outer[d] + idx[d];
    off *= outer[dim - 1];
    std::memcpy(dst + off, src + r * row, sizeof(double) * row);
    for (std::size_t d = dim - 1; d-- > 0;) {
      if (++idx[d] < ext[d]) break;
      idx[d] = 0;
    }
  }
}

void gather_block(const double* src, const std::vector<std::int64_t>& outer,
                  double* dst, const std::vector<std::int64_t>& ext) {
  const std::size_t dim = ext.size();
  const std::int64_t row = ext[dim - 1];
  std::int64_t rows = 1;
  for (std::size_t d = 0; d + 1 < dim; ++d) rows *= ext[d];
  std::vector<std::int64_t> idx(dim, 0);
  for (std::int64_t r = 0; r < rows; ++r) {
    std::int64_t off = 0;
    for (std::size_t d = 0; d + 1 < dim; ++d) off = off * outer[d] + idx[d];
    off *= outer[dim - 1];
    std::memcpy(dst + r * row, src + off, sizeof(double) * row);
    for (std::size_t d = dim - 1; d-- > 0;) {
      if (++idx[d] < ext[d]) break;
      idx[d] = 0;
    }
  }
}

struct Geometry {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> extent;
  std::vector<std::int64_t> stride;
  double volume = 1.0;
};

Geometry result_geometry(const SignedLatticeMeasure& a,
                         const SignedLatticeMeasure& b) {
  auto ba = *a.bounding_box();
  auto bb = *b.bounding_box();
  const std::size_t dim = a.dim();
  Geometry g;
  g.lo.resize(dim);
  g.extent.resize(dim);
  g.stride.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const std::int64_t lo = ba.first[d] + bb.first[d];
    const std::int64_t hi = ba.second[d] + bb.second[d];
    if (lo < -kCoordinateLimit || hi > kCoordinateLimit) {
      throw CoordinateOverflow("convolution support leaves the range 2^40");
    }
    g.lo[d] = lo;
    g.extent[d] = hi - lo + 1;
    g.volume *= static_cast<double>(g.extent[d]);
  }
  std::int64_t s = 1;
  for (std::size_t d = dim; d-- > 0;) {
    g.stride[d] = s;
    // Strides only matter while the volume is addressable.
    if (g.volume < 9e18) s *= g.extent[d];
  }
  return g;
}

std::vector<std::int64_t> offsets(const SignedLatticeMeasure& m,
                                  const std::vector<std::int64_t>& lo,
                                  const std::vector<std::int64_t>& stride) {
  std::vector<std::int64_t> off(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto k = m.key(i);
    std::int64_t o = 0;
    for (std::size_t d = 0; d < k.size(); ++d) o += (k[d] - lo[d]) * stride[d];
    off[i] = o;
  }
  return off;
}

// Turns a dense row-major array over the geometry into sorted storage.
SignedLatticeMeasure from_dense(const std::vector<double>& cells,
                                const Geometry& g, bool clamp_negative,
                                bool mirror) {
  const std::size_t dim = g.lo.size();
  std::vector<double> c = cells;
  if (clamp_negative) {
    for (double& w : c) w = std::max(w, 0.0);
  }
  if (mirror) {
    const std::size_t v = c.size();
    for (std::size_t i = 0; i < v / 2; ++i) {
      const double avg = 0.5 * (c[i] + c[v - 1 - i]);
      c[i] = avg;
      c[v - 1 - i] = avg;
    }
  }
  std::size_t nz = 0;
  for (double w : c) nz += (w != 0.0);
  std::vector<std::int64_t> keys;
  std::vector<double> weights;
  keys.reserve(nz * dim);
  weights.reserve(nz);
  std::vector<std::int64_t> idx(dim, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0.0) {
      for (std::size_t d = 0; d < dim; ++d) keys.push_back(g.lo[d] + idx[d]);
      weights.push_back(c[i]);
    }
    for (std::size_t d = dim; d-- > 0;) {
      if (++idx[d] < g.extent[d]) break;
      idx[d] = 0;
    }
  }
  return SignedLatticeMeasure::from_sorted(dim, std::move(keys),
                                           std::move(weights), 0.0, 0.0);
}

// Offsets of each atom within its own bounding box, using the strides of
// the result box. The position of a product is then oa[i] + ob[j].
std::vector<std::int64_t> local_offsets(const SignedLatticeMeasure& m,
                                        const std::vector<std::int64_t>& stride) {
  return offsets(m, m.bounding_box()->first, stride);
}

SignedLatticeMeasure dense_direct(const SignedLatticeMeasure& a,
                                  const SignedLatticeMeasure& b,
                                  const Geometry& g, bool mirror) {
  const auto oa = local_offsets(a, g.stride);
  const auto ob = local_offsets(b, g.stride);
  std::vector<double> cells(static_cast<std::size_t>(g.volume), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double wa = a.weight(i);
    double* row = cells.data() + oa[i];
    for (std::size_t j = 0; j < b.size(); ++j) row[ob[j]] += wa * b.weight(j);
  }
  return from_dense(cells, g, false, mirror);
}

SignedLatticeMeasure sparse_direct(const SignedLatticeMeasure& a,
                                   const SignedLatticeMeasure& b,
                                   const Geometry& g) {
  const std::size_t dim = a.dim();
  const std::size_t total = a.size() * b.size();
  if (g.volume < 4e18) {
    // Row-major box positions with the first coordinate most significant
    // sort in lexicographic key order.
    const auto oa = local_offsets(a, g.stride);
    const auto ob = local_offsets(b, g.stride);
    std::vector<std::pair<std::int64_t, double>> prod;
    prod.reserve(total);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        prod.emplace_back(oa[i] + ob[j], a.weight(i) * b.weight(j));
      }
    }
    std::stable_sort(prod.begin(), prod.end(), [](const auto& x, const auto& y) {
      return x.first < y.first;
    });
    std::vector<std::int64_t> keys;
    std::vector<double> weights;
    for (std::size_t t = 0; t < prod.size();) {
      const std::int64_t pos = prod[t].first;
      double w = 0.0;
      while (t < prod.size() && prod[t].first == pos) w += prod[t++].second;
      std::int64_t rem = pos;
      for (std::size_t d = 0; d < dim; ++d) {
        keys.push_back(g.lo[d] + rem / g.stride[d]);
        rem %= g.stride[d];
      }
      weights.push_back(w);
    }
    return SignedLatticeMeasure::from_sorted(dim, std::move(keys),
                                             std::move(weights), 0.0, 0.0);
  }
  std::vector<std::int64_t> sums(total * dim);
  std::vector<double> w(total);
  std::size_t t = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ka = a.key(i);
    for (std::size_t j = 0; j < b.size(); ++j, ++t) {
      auto kb = b.key(j);
      for (std::size_t d = 0; d < dim; ++d) sums[t * dim + d] = ka[d] + kb[d];
      w[t] = a.weight(i) * b.weight(j);
    }
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key_of = [&](std::size_t s) {
    return std::span<const std::int64_t>(sums.data() + s * dim, dim);
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return internal::compare_keys(key_of(x), key_of(y)) < 0;
  });
  std::vector<std::int64_t> keys;
  std::vector<double> weights;
  for (std::size_t s = 0; s < total;) {
    auto k = key_of(order[s]);
    double acc = 0.0;
    while (s < total && internal::compare_keys(key_of(order[s]), k) == 0) {
      acc += w[order[s++]];
    }
    keys.insert(keys.end(), k.begin(), k.end());
    weights.push_back(acc);
  }
  return SignedLatticeMeasure::from_sorted(dim, std::move(keys),
                                           std::move(weights), 0.0, 0.0);
}

std::vector<double> to_dense(const SignedLatticeMeasure& m,
                             std::vector<std::int64_t>* extent) {
  auto box = *m.bounding_box();
  const std::size_t dim = m.dim();
  extent->resize(dim);
  std::size_t vol = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    (*extent)[d] = box.second[d] - box.first[d] + 1;
    vol *= static_cast<std::size_t>((*extent)[d]);
  }
  std::vector<std::int64_t> stride(dim);
  std::int64_t s = 1;
  for (std::size_t d = dim; d-- > 0;) {
    stride[d] = s;
    s *= (*extent)[d];
  }
  std::vector<double> cells(vol, 0.0);
  const auto off = offsets(m, box.first, stride);
  for (std::size_t i = 0; i < m.size(); ++i) cells[off[i]] = m.weight(i);
  return cells;
}

double padded_volume(const std::vector<std::int64_t>& extent) {
  double v = 1.0;
  for (std::int64_t e : extent) v *= static_cast<double>(good_size(e));
  return v;
}

}  // namespace

namespace internal {

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<std::int64_t>& ea,
                                 const std::vector<double>& b,
                                 const std::vector<std::int64_t>& eb,
                                 std::size_t* padded) {
  const std::size_t dim = ea.size();
  std::vector<std::int64_t> out_ext(dim);
  std::vector<std::int64_t> pad(dim);
  std::vector<int> n(dim);
  std::size_t npad = 1;
  std::size_t nout = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    out_ext[d] = ea[d] + eb[d] - 1;
    pad[d] = good_size(out_ext[d]);
    n[d] = static_cast<int>(pad[d]);
    npad *= static_cast<std::size_t>(pad[d]);
    nout *= static_cast<std::size_t>(out_ext[d]);
  }
  const std::size_t ncomplex = npad / pad[dim - 1] * (pad[dim - 1] / 2 + 1);
  *padded = npad;

  double* ra = fftw_alloc_real(npad);
  double* rb = fftw_alloc_real(npad);
  fftw_complex* ca = fftw_alloc_complex(ncomplex);
  fftw_complex* cb = fftw_alloc_complex(ncomplex);
  if (!ra || !rb || !ca || !cb) {
    fftw_free(ra);
    fftw_free(rb);
    fftw_free(ca);
    fftw_free(cb);
    throw NumericalRefusal("FFT work arrays could not be allocated");
  }
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pa = fftw_plan_dft_r2c(static_cast<int>(dim), n.data(), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c(static_cast<int>(dim), n.data(), rb, cb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r(static_cast<int>(dim), n.data(), ca, ra,
                             FFTW_ESTIMATE);
  }
  std::fill_n(ra, npad, 0.0);
  std::fill_n(rb, npad, 0.0);
  scatter_block(a.data(), ea, ra, pad);
  scatter_block(b.data(), eb, rb, pad);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < ncomplex; ++i) {
    const double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
    const double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
    ca[i][0] = re;
    ca[i][1] = im;
  }
  fftw_execute(pinv);
  std::vector<double> out(nout);
  gather_block(ra, pad, out.data(), out_ext);
  const double inv = 1.0 / static_cast<double>(npad);
  for (double& w : out) w *= inv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

}  // namespace internal

SignedLatticeMeasure convolve(const SignedLatticeMeasure& a,
                              const SignedLatticeMeasure& b,
                              ConvolvePath path) {
  if (a.dim() != b.dim()) throw DimensionMismatch("convolve: dimensions differ");
  const double ta = a.trunc_err(), ra = a.round_err();
  const double tb = b.trunc_err(), rb = b.round_err();
  const double na = a.tv(), nb = b.tv();
  const double trunc = na * tb + (nb + tb) * ta;
  double round = na * rb + (nb + tb + rb) * ra + rb * ta;
  if (a.empty() || b.empty()) {
    return SignedLatticeMeasure(a.dim()).with_errors(
        internal::round_up(trunc), internal::round_up(round));
  }

  const Geometry g = result_geometry(a, b);
  const bool mirror = a.is_symmetric() && b.is_symmetric();
  const bool nonneg = a.all_nonnegative() && b.all_nonnegative();
  const double products =
      static_cast<double>(a.size()) * static_cast<double>(b.size());

  std::vector<std::int64_t> out_ext = g.extent;
  const double vpad = padded_volume(out_ext);
  bool use_fft = false;
  if (path == ConvolvePath::kFft) {
    if (vpad > kDenseCap) {
      throw NumericalRefusal("convolve: FFT box exceeds the dense cap");
    }
    use_fft = true;
  } else if (path == ConvolvePath::kAuto && products > kDirectAlways &&
             vpad <= kDenseCap) {
    const double fft_cost = 20.0 * vpad * std::log2(std::max(vpad, 2.0));
    use_fft = products > fft_cost;
  }

  SignedLatticeMeasure out(a.dim());
  double fresh = 0.0;
  if (use_fft) {
    std::vector<std::int64_t> ea, eb;
    const auto da = to_dense(a, &ea);
    const auto db = to_dense(b, &eb);
    std::size_t npad = 0;
    const auto cells = internal::fft_convolve(da, ea, db, eb, &npad);
    const double log_n = std::ceil(std::log2(static_cast<double>(npad)));
    const double eps_f = 7.0 * kUnitRoundoff * std::max(log_n, 1.0);
    const double t = a.tv() * b.l2_norm() + a.l2_norm() * b.tv();
    const double e1 = 2.0 * std::sqrt(g.volume) *
                      (2.0 * eps_f + 5.0 * kUnitRoundoff) * t;
    out = from_dense(cells, g, nonneg, mirror);
    double removed = 0.0;
    out = internal::drop_smallest(out, e1, &removed);
    fresh = e1 + removed;
  } else {
    if (g.volume <= kDenseCap && g.volume <= 8.0 * products + 1024.0) {
      out = dense_direct(a, b, g, mirror);
    } else {
      if (products > kSparseCap) {
        throw NumericalRefusal("convolve: product count " +
                               std::to_string(products) +
                               " exceeds the sparse cap");
      }
      out = sparse_direct(a, b, g);
      if (mirror) out = internal::symmetrize(out);
    }
    auto all_pow2 = [](const SignedLatticeMeasure& m) {
      for (double w : m.weights()) {
        if (!internal::is_power_of_two(w)) return false;
      }
      return true;
    };
    const bool exact_products = all_pow2(a) || all_pow2(b);
    const double kmax = static_cast<double>(std::min(a.size(), b.size()));
    fresh = internal::gamma(kmax - 1.0 + (exact_products ? 0.0 : 1.0)) * na * nb;
  }
  // Averaging mirrored cells costs at most one rounding per cell.
  if (mirror && !(a.size() == 1 || b.size() == 1)) {
    fresh += 2.0 * kUnitRoundoff * na * nb;
  }
  round += fresh;
  return std::move(out).with_errors(internal::round_up(trunc),
                                    internal::round_up(round));
}

SignedLatticeMeasure convolution_power(const SignedLatticeMeasure& m,
                                       std::int64_t n, double tol) {
  if (n < 1) throw std::invalid_argument("convolution_power: n must be >= 1");
  if (!(tol >= 0.0)) {
    throw std::invalid_argument("convolution_power: tol must be >= 0");
  }
  if (n == 1) return m;
  int bits = 0;
  while ((std::int64_t{1} << bits) < n) ++bits;
  const double step = tol / (2.0 * bits + 1.0);
  std::optional<SignedLatticeMeasure> result;
  SignedLatticeMeasure base = m;
  std::int64_t k = n;
  while (k > 0) {
    if (k & 1) {
      result = result ? truncate(convolve(*result, base), step) : base;
    }
    k >>= 1;
    if (k > 0) base = truncate(convolve(base, base), step);
  }
  return *result;
}

}  // namespace cpapprox

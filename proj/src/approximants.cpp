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

#include "cpapprox/approximants.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "internal.hpp"

namespace cpapprox {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SignedLatticeMeasure minus_identity(const SignedLatticeMeasure& f,
                                    double coef = 1.0) {
  const auto id = SignedLatticeMeasure::identity(f.dim());
  return linear_combine({{coef, f}, {-coef, id}});
}

// x^{k+1} e^x / (k+1)!, the remainder of the degree-k Taylor polynomial.
double taylor_remainder(double x, int k) {
  double term = std::exp(x);
  for (int j = 1; j <= k + 1; ++j) term *= x / j;
  return term;
}

}  // namespace

SignedLatticeMeasure measure_exp(const SignedLatticeMeasure& m, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("measure_exp: tol must be > 0");
  const std::size_t dim = m.dim();
  const auto id = SignedLatticeMeasure::identity(dim);
  if (m.empty()) {
    const double grow = std::exp(m.error_bound());
    return id.with_errors(internal::round_up(m.trunc_err() * grow),
                          internal::round_up(m.round_err() * grow));
  }

  const double norm = m.tv();
  int s = 0;
  while (std::ldexp(norm, -s) > 1.0) {
    if (++s > 60) {
      throw NumericalRefusal("measure_exp: norm " + std::to_string(norm) +
                             " needs more than 60 squarings");
    }
  }
  const SignedLatticeMeasure x = scale(m, std::ldexp(1.0, -s));
  const double xn = x.tv();

  const double taylor_tol = std::ldexp(tol, -(s + 1));
  int k = 1;
  while (taylor_remainder(xn, k) > 0.5 * taylor_tol) {
    if (++k > 200) throw NumericalRefusal("measure_exp: Taylor degree overflow");
  }
  const double step_tol = 0.5 * taylor_tol / k;

  double max_norm = std::max(1.0, xn);
  SignedLatticeMeasure p = id;
  for (int j = k; j >= 1; --j) {
    const SignedLatticeMeasure xp = convolve(x, p);
    p = truncate(linear_combine({{1.0, id}, {1.0 / j, xp}}), step_tol);
    max_norm = std::max({max_norm, xp.tv(), p.tv()});
  }
  p = std::move(p).with_errors(
      internal::round_up(p.trunc_err() + taylor_remainder(xn, k)),
      p.round_err());

  // Squaring j multiplies later truncations by roughly 2^{s-j}, so earlier
  // steps get proportionally smaller budgets.
  for (int j = 1; j <= s; ++j) {
    const double budget = 0.5 * tol / s * std::ldexp(1.0, -(s - j));
    p = truncate(convolve(p, p), budget);
    max_norm = std::max(max_norm, p.tv());
  }
  if (p.tv() < 1e-8 * max_norm) {
    throw NumericalRefusal(
        "measure_exp: result norm is below 1e-8 of the largest intermediate");
  }
  return p;
}

SignedLatticeMeasure cp_accompanying(const SymmetricDistribution& f,
                                     double lambda, double tol) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("cp_accompanying: lambda must be positive");
  }
  return measure_exp(minus_identity(f.measure(), lambda), tol);
}

SignedLatticeMeasure hipp_power(const SymmetricDistribution& f, double a,
                                double tol) {
  if (a == 0.0 || !std::isfinite(a)) {
    throw std::invalid_argument("hipp_power: a must be finite and nonzero");
  }
  const SignedLatticeMeasure g = minus_identity(f.measure());
  const SignedLatticeMeasure g2 = convolve(g, g);
  return measure_exp(linear_combine({{a, g}, {-0.5 * a, g2}}), tol);
}

SignedLatticeMeasure first_order_cp(const SymmetricDistribution& f,
                                    std::int64_t n, double tol) {
  if (n < 1) throw std::invalid_argument("first_order_cp: n must be >= 1");
  const SignedLatticeMeasure cp =
      cp_accompanying(f, static_cast<double>(n), 0.5 * tol);
  const SignedLatticeMeasure g = minus_identity(f.measure());
  const SignedLatticeMeasure g2 = convolve(g, g);
  const auto id = SignedLatticeMeasure::identity(f.dim());
  const SignedLatticeMeasure corr =
      linear_combine({{1.0, id}, {-0.5 * static_cast<double>(n), g2}});
  return truncate(convolve(cp, corr), 0.5 * tol);
}

double binomial(std::int64_t n, std::int64_t k, bool* exact) {
  using boost::multiprecision::cpp_int;
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("binomial: need 0 <= k <= n");
  }
  cpp_int c = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  const double d = c.convert_to<double>();
  if (!std::isfinite(d)) throw NumericalRefusal("binomial coefficient overflow");
  if (exact) *exact = (cpp_int(d) == c);
  return d;
}

SignedLatticeMeasure bergstrom_partial(const SymmetricDistribution& f,
                                       std::int64_t n, int k, double tol) {
  if (n < 1 || k < 0) {
    throw std::invalid_argument("bergstrom_partial: need n >= 1, k >= 0");
  }
  if (k >= n) throw std::invalid_argument("bergstrom_partial: k must be <= n-1");
  const double term_tol = tol / (k + 1);
  const double max_binom = binomial(n, std::min<std::int64_t>(k, n / 2));
  // (F - D) enters multiplied by binom(n, m) ||D^{*(n-m)}||, and
  // ||D^{*m}|| <= 3.5 / sqrt(q).
  const double fd_tol =
      0.25 * term_tol / (std::max(1, k) * max_binom * 3.5 / std::sqrt(f.q()));

  std::optional<SignedLatticeMeasure> fd;
  if (k >= 1) {
    const SignedLatticeMeasure d1 = hipp_power(f, 1.0, fd_tol);
    fd = linear_combine({{1.0, f.measure()}, {-1.0, d1}});
  }

  std::vector<SignedLatticeMeasure> parts;
  std::vector<double> coefs;
  double binom_slack = 0.0;
  parts.reserve(k + 1);
  for (int m = 0; m <= k; ++m) {
    bool exact = true;
    const double c = binomial(n, m, &exact);
    SignedLatticeMeasure dm = hipp_power(f, static_cast<double>(n - m),
                                         0.5 * term_tol);
    SignedLatticeMeasure term = dm;
    if (m >= 1) {
      const SignedLatticeMeasure fdm = convolution_power(*fd, m, fd_tol);
      term = truncate(convolve(fdm, dm), 0.25 * term_tol / c);
    }
    if (!exact) {
      // |c - round(c)| <= u c.
      binom_slack += internal::kUnitRoundoff * c * term.tv();
    }
    parts.push_back(std::move(term));
    coefs.push_back(c);
  }
  std::vector<Term> terms;
  for (int m = 0; m <= k; ++m) terms.push_back({coefs[m], parts[m]});
  SignedLatticeMeasure sum = linear_combine(terms);
  if (binom_slack > 0.0) {
    sum = std::move(sum).with_errors(sum.trunc_err(),
                                     internal::round_up(sum.round_err() + binom_slack));
  }
  return sum;
}

std::string ApproximantKind::name() const {
  switch (tag) {
    case Tag::kConvPower: return "conv";
    case Tag::kAccompanyingCP: return "cp";
    case Tag::kHippSCP: return "hipp";
    case Tag::kFirstOrderCP: return "first";
    case Tag::kBergstromPartial: return "berg" + std::to_string(k);
  }
  return "?";
}

std::optional<ApproximantKind> ApproximantKind::parse(const std::string& name) {
  if (name == "conv") return conv_power();
  if (name == "cp") return accompanying_cp();
  if (name == "hipp") return hipp_scp();
  if (name == "first") return first_order_cp();
  if (name.rfind("berg", 0) == 0 && name.size() > 4 && name.size() < 8) {
    int k = 0;
    for (std::size_t i = 4; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') return std::nullopt;
      k = 10 * k + (name[i] - '0');
    }
    return bergstrom(k);
  }
  return std::nullopt;
}

SignedLatticeMeasure build_approximant(const SymmetricDistribution& f,
                                       std::int64_t n, ApproximantKind kind,
                                       double tol) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  switch (kind.tag) {
    case ApproximantKind::Tag::kConvPower:
      return convolution_power(f.measure(), n, tol);
    case ApproximantKind::Tag::kAccompanyingCP:
      return cp_accompanying(f, static_cast<double>(n), tol);
    case ApproximantKind::Tag::kHippSCP:
      return hipp_power(f, static_cast<double>(n), tol);
    case ApproximantKind::Tag::kFirstOrderCP:
      return first_order_cp(f, n, tol);
    case ApproximantKind::Tag::kBergstromPartial:
      return bergstrom_partial(f, n, kind.k, tol);
  }
  throw std::invalid_argument("unknown approximant kind");
}

ApproximationResult approximate_against(const SignedLatticeMeasure& power,
                                        const SymmetricDistribution& f,
                                        std::int64_t n, ApproximantKind kind,
                                        double tol) {
  const auto start = Clock::now();
  ApproximationResult r;
  r.n = n;
  r.kind = kind;
  if (kind.tag == ApproximantKind::Tag::kConvPower) {
    r.support_size = power.size();
    r.elapsed = seconds_since(start);
    return r;
  }
  const SignedLatticeMeasure approx = build_approximant(f, n, kind, tol);
  const TvNorm d = tv_distance(power, approx);
  r.tv_distance = d.value;
  r.err_interval = d.err;
  r.support_size = approx.size();
  r.elapsed = seconds_since(start);
  return r;
}

ApproximationResult approximate(const SymmetricDistribution& f, std::int64_t n,
                                ApproximantKind kind, double tol) {
  const auto start = Clock::now();
  const SignedLatticeMeasure power = convolution_power(f.measure(), n, 0.5 * tol);
  ApproximationResult r = approximate_against(power, f, n, kind, 0.5 * tol);
  r.elapsed = seconds_since(start);
  return r;
}

}  // namespace cpapprox

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

#include "cpapprox/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace cpapprox {
namespace {

constexpr double kE = 2.718281828459045;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

std::string subscript(std::size_t m) {
  std::string digits = std::to_string(m);
  std::string out;
  for (char c : digits) {
    out += "\xE2\x82";
    out += static_cast<char>(0x80 + (c - '0'));
  }
  return out;
}

std::string join_and(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " and ";
    out += parts[i];
  }
  return out;
}

BoundReport inapplicable(const std::string& id, std::int64_t n,
                         std::string reason) {
  BoundReport r;
  r.bound_id = id;
  r.n = n;
  r.explicit_part = std::numeric_limits<double>::quiet_NaN();
  r.total_at_C = std::numeric_limits<double>::quiet_NaN();
  r.applicable = false;
  r.reason = std::move(reason);
  return r;
}

struct Builder {
  BoundReport r;
  const BoundConfig& cfg;

  Builder(const std::string& id, std::int64_t n, const BoundConfig& c) : cfg(c) {
    r.bound_id = id;
    r.n = n;
  }
  Builder& explicit_part(double v) {
    r.explicit_part = v;
    return *this;
  }
  Builder& term(const std::string& suffix, double coef) {
    r.generic_terms.emplace_back(r.bound_id + "." + suffix, coef);
    return *this;
  }
  Builder& norm() {
    r.bounds_norm = true;
    return *this;
  }
  BoundReport done() {
    double total = r.explicit_part;
    for (const auto& [id, coef] : r.generic_terms) total += cfg.value(id) * coef;
    r.total_at_C = total;
    return r;
  }
};

std::int64_t gcd_abs(std::span<const std::int64_t> v) {
  std::int64_t g = 0;
  for (std::int64_t c : v) g = std::gcd(g, c < 0 ? -c : c);
  return g;
}

bool is_unit_axis(const LatticePoint& p) {
  int ones = 0;
  for (std::int64_t c : p.coords()) {
    if (c == 1) {
      ++ones;
    } else if (c != 0) {
      return false;
    }
  }
  return ones == 1;
}

}  // namespace

DeltaFunctional::DeltaFunctional(const SymmetricDistribution& f) {
  const SignedLatticeMeasure& m = f.measure();
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool origin = true;
    for (std::int64_t c : m.key(i)) origin = origin && c == 0;
    if (!origin) desc_.push_back(m.weight(i));
  }
  std::sort(desc_.begin(), desc_.end(), std::greater<>());
  suffix_.assign(desc_.size() + 1, 0.0);
  for (std::size_t i = desc_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + desc_[i];
  if (f.tail()) {
    tail_ = f.tail()->mass;
  } else {
    tail_ = m.trunc_err();
  }
}

double DeltaFunctional::operator()(double y) const {
  if (!(y >= 0.0)) throw std::invalid_argument("delta: y must be >= 0");
  const double ye = y * kE;
  // Atoms with y e p >= 1 form a prefix of the descending order.
  const auto it = std::partition_point(desc_.begin(), desc_.end(),
                                       [&](double p) { return ye * p >= 1.0; });
  const std::size_t c = static_cast<std::size_t>(it - desc_.begin());
  return static_cast<double>(c) + ye * suffix_[c] + ye * tail_;
}

double delta_functional(const SymmetricDistribution& f, double y) {
  return DeltaFunctional(f)(y);
}

double kerstan_g(double x) {
  if (std::abs(x) < 1e-3) {
    return 1.0 + x * (2.0 / 3.0 + x * (0.25 + x / 15.0));
  }
  return 2.0 * std::exp(x) * (std::exp(-x) - 1.0 + x) / (x * x);
}

bool LineMixture::span_ok() const {
  return std::all_of(components.begin(), components.end(),
                     [](const LineComponent& c) { return c.span_ok; });
}

bool LineMixture::sigmas_finite() const {
  return std::all_of(components.begin(), components.end(),
                     [](const LineComponent& c) { return std::isfinite(c.sigma); });
}

bool LineMixture::axis_aligned() const {
  return std::all_of(components.begin(), components.end(),
                     [](const LineComponent& c) { return is_unit_axis(c.direction); });
}

double LineMixture::S() const {
  double s = 0.0;
  for (const LineComponent& c : components) s += std::sqrt(1.0 + c.sigma);
  return s;
}

LineMixture decompose_line_mixture(const SymmetricDistribution& f) {
  const SignedLatticeMeasure& m = f.measure();
  const std::size_t dim = m.dim();
  std::map<LatticePoint, std::vector<std::pair<std::int64_t, double>>> groups;
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto k = m.key(i);
    std::int64_t lead = 0;
    for (std::int64_t c : k) {
      if (c != 0) {
        lead = c;
        break;
      }
    }
    if (lead <= 0) continue;  // origin, or the mirror half
    const std::int64_t g = gcd_abs(k);
    std::vector<std::int64_t> dir(dim);
    for (std::size_t d = 0; d < dim; ++d) dir[d] = k[d] / g;
    groups[LatticePoint(std::move(dir))].emplace_back(g, m.weight(i));
  }
  if (groups.empty()) {
    throw NotLineDecomposable("distribution has no mass off the origin");
  }

  const bool finite = f.finite_support();
  // In one dimension the whole off-origin mass lies on one line, so a
  // described tail can be folded into it.
  const bool fold_tail = !finite && dim == 1;
  LineMixture lm;
  lm.dim = dim;
  lm.q = f.q();
  for (auto& [dir, entries] : groups) {
    std::sort(entries.begin(), entries.end());
    LineComponent c;
    c.direction = dir;
    double half = 0.0;
    double second = 0.0;
    for (const auto& [k, w] : entries) {
      half += w;
      second += static_cast<double>(k) * static_cast<double>(k) * w;
    }
    c.p = fold_tail ? 1.0 - f.q() : 2.0 * half;
    for (const auto& [k, w] : entries) c.masses.emplace_back(k, w / c.p);
    double sigma2 = 2.0 * second;
    if (!finite) {
      if (fold_tail && f.tail()) {
        sigma2 += f.tail()->second_moment;
      } else {
        sigma2 = kInf;
      }
    }
    c.sigma = std::isfinite(sigma2) ? std::sqrt(sigma2 / c.p) : kInf;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
      if (entries[i + 1].first == entries[i].first + 1) {
        c.span_ok = true;
        c.k0 = entries[i].first;
        break;
      }
    }
    lm.components.push_back(std::move(c));
  }
  return lm;
}

void require_span(const LineMixture& lines) {
  std::vector<std::string> bad;
  for (std::size_t m = 0; m < lines.K(); ++m) {
    if (!lines.components[m].span_ok) {
      bad.push_back("component " + std::to_string(m + 1) + " along " +
                    lines.components[m].direction.to_string());
    }
  }
  if (!bad.empty()) {
    throw NotLineDecomposable("span condition fails for " + join_and(bad));
  }
}

KnownBoundInputs make_known_inputs(std::vector<double> q_i,
                                   std::vector<std::vector<double>> p_im,
                                   std::vector<double> sigma_m) {
  if (q_i.size() != p_im.size() || q_i.empty()) {
    throw std::invalid_argument("make_known_inputs: need one q_i per row");
  }
  const std::size_t d = sigma_m.size();
  KnownBoundInputs k;
  k.lambda_m.assign(d, 0.0);
  for (const auto& row : p_im) {
    if (row.size() != d) {
      throw std::invalid_argument("make_known_inputs: p_im row has wrong length");
    }
    for (std::size_t m = 0; m < d; ++m) k.lambda_m[m] += row[m];
  }
  double alpha = 0.0;
  for (std::size_t i = 0; i < q_i.size(); ++i) {
    double ratio = 0.0;
    double total = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
      total += p_im[i][m];
      if (k.lambda_m[m] > 0.0) ratio += p_im[i][m] * p_im[i][m] / k.lambda_m[m];
    }
    alpha += kerstan_g(2.0 * (1.0 - q_i[i])) *
             std::min(std::pow(2.0, -1.5) * ratio, total * total);
  }
  k.alpha = alpha;
  k.q_i = std::move(q_i);
  k.p_im = std::move(p_im);
  k.sigma_m = std::move(sigma_m);
  return k;
}

KnownBoundInputs known_inputs_iid(const LineMixture& lines, std::int64_t n) {
  if (!lines.axis_aligned()) {
    throw std::invalid_argument("known_inputs_iid: components are not axis-aligned");
  }
  if (n < 1) throw std::invalid_argument("known_inputs_iid: n must be >= 1");
  std::vector<double> row(lines.dim, 0.0);
  std::vector<double> sigma(lines.dim, 0.0);
  for (const LineComponent& c : lines.components) {
    for (std::size_t m = 0; m < lines.dim; ++m) {
      if (c.direction[m] == 1) {
        row[m] = c.p;
        sigma[m] = c.sigma;
      }
    }
  }
  return make_known_inputs(std::vector<double>(n, lines.q),
                           std::vector<std::vector<double>>(n, row), sigma);
}

double BoundConfig::value(const std::string& id) const {
  auto it = c_.find(id);
  return it == c_.end() ? 1.0 : it->second;
}

void BoundConfig::set(const std::string& id, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("constant '" + id + "' must be positive");
  }
  c_[id] = v;
}

const std::vector<std::string>& bound_ids() {
  static const std::vector<std::string> ids = {
      "thm1",      "thm1star", "thm2",      "thm3",       "thm4",
      "thm5",      "trivial_ab", "cor1_cp", "cor1_conv",  "cor1_hipp",
      "cor1_first", "bergD",   "cor2",      "m3",         "thm6",
      "thm6star",  "thm7",     "thm8",      "thm9",       "thm10",
      "krc1",      "p1is5"};
  return ids;
}

BoundReport evaluate_bound(const std::string& id, const BoundInput& input,
                           const BoundParams& params, const BoundConfig& cfg) {
  const auto& ids = bound_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw std::invalid_argument("unknown bound id '" + id + "'");
  }
  const std::int64_t n = params.n;
  const double nd = static_cast<double>(n);
  const bool needs_n = id != "thm5" && id != "trivial_ab" && id != "thm10";
  if (needs_n && n < 1) return inapplicable(id, n, "n must be >= 1");
  const bool ab = id == "thm5" || id == "trivial_ab" || id == "thm10";
  if (ab && !(params.a > 0.0 && params.b > 0.0)) {
    return inapplicable(id, n, "a and b must be positive");
  }
  const double ab_ratio =
      ab ? std::abs(params.b - params.a) / std::max(params.a, params.b) : 0.0;
  const int k = params.k;

  Builder b(id, n, cfg);

  // Bounds stated for an arbitrary symmetric lattice distribution.
  const bool general = id == "thm1" || id == "thm1star" || id == "thm2" ||
                       id == "thm3" || id == "thm4" || id == "thm5" ||
                       id == "trivial_ab" || id.rfind("cor", 0) == 0 ||
                       id == "bergD" || id == "m3";
  if (general) {
    if (!input.f) return inapplicable(id, n, "needs a symmetric distribution");
    const SymmetricDistribution& f = *input.f;
    const double q = f.q();
    if ((id == "bergD" || id == "cor2" || id == "m3") && (k < 0 || k >= n)) {
      return inapplicable(id, n, "needs 0 <= k <= n-1");
    }
    const bool finite_needed = id == "thm5" || id.rfind("cor", 0) == 0;
    const double N = static_cast<double>(f.pair_count());
    if (finite_needed) {
      if (!f.finite_support()) return inapplicable(id, n, "support is not finite");
      if (f.pair_count() < f.dim()) {
        return inapplicable(id, n,
                            "N=" + std::to_string(f.pair_count()) + " < d=" +
                                std::to_string(f.dim()));
      }
    }
    const DeltaFunctional delta(f);
    const double kk = static_cast<double>(k);
    if (id == "thm1") {
      const double d2 = delta(nd / 2.0);
      const double e = 4.0 * d2 * d2 / (kE * kE * nd);
      return b.explicit_part(e)
          .term("C1", e * (delta(nd * q) + 1.0) / (std::pow(q, 4) * std::sqrt(nd)))
          .term("C2", std::pow(1.0 - q, 4.5) / (std::pow(q, 5) * nd * std::sqrt(nd)))
          .done();
    }
    if (id == "thm1star") {
      const double dn = delta(nd);
      return b.term("C", (1.0 + dn * dn) / (nd * std::pow(q, 3.5))).done();
    }
    if (id == "thm2") {
      const double d = delta(nd * q / 6.0);
      const double e = 50.2 * d * d * d / (std::pow(q, 3.5) * nd * nd);
      return b.explicit_part(e)
          .term("C1", e / (std::pow(q, 3.5) * std::sqrt(nd)))
          .term("C2", std::pow(1.0 - q, 7.5) / (std::pow(q, 8) * nd * nd * std::sqrt(nd)))
          .done();
    }
    if (id == "thm3") {
      const double d = delta(nd * q);
      return b.term("C1", (d * d * d + d * d * d * d) / (std::pow(q, 5.5) * nd * nd))
          .term("C2", std::pow(1.0 - q, 6) / (std::pow(q, 6.5) * nd * nd))
          .done();
    }
    if (id == "thm4") {
      const double dn = delta(nd);
      return b.term("C", (dn * dn + 1.0) / (std::pow(q, 3.5) * nd)).done();
    }
    if (id == "thm5") {
      return b.explicit_part((1.0 + (2.0 * N + 1.0) / kE) * ab_ratio).done();
    }
    if (id == "trivial_ab") {
      return b.explicit_part(2.0 * std::abs(params.b - params.a) * (1.0 - q)).done();
    }
    if (id == "cor1_cp") {
      const double e = 2.17 * N * N / nd;
      return b.explicit_part(e).term("C", e * N / (std::pow(q, 5) * std::sqrt(nd))).done();
    }
    if (id == "cor1_conv") {
      return b.term("C", N * N * std::pow(q, -3.5) / nd).done();
    }
    if (id == "cor1_hipp") {
      return b.term("C", N * N * N * std::pow(q, -3.5) / (nd * nd)).done();
    }
    if (id == "cor1_first") {
      return b.term("C", std::pow(N, 4) * std::pow(q, -6.5) / (nd * nd)).done();
    }
    const std::string ks = "k" + std::to_string(k) + ".";
    if (id == "bergD") {
      const double d = delta(nd * q);
      const double n2 = std::pow(nd, 2.0 * (kk + 1.0));
      return b.norm()
          .term(ks + "C1", std::pow(d, 3.0 * (kk + 1.0)) /
                               (std::pow(q, 6.0 * kk + 5.5) * n2))
          .term(ks + "C2", std::pow(1.0 - q, 6.0 * (kk + 1.0)) /
                               (n2 * std::pow(q, 6.0 * kk + 6.5)))
          .done();
    }
    if (id == "cor2") {
      return b.norm()
          .term(ks + "C", std::pow(N, 3.0 * (kk + 1.0)) /
                              (std::pow(q, 6.0 * kk + 6.5) *
                               std::pow(nd, 2.0 * (kk + 1.0))))
          .done();
    }
    if (id == "m3") {
      const double p = 1.0 - q;
      return b.norm()
          .term(ks + "C", std::pow(p, 1.5 * (kk + 1.0)) /
                              (std::pow(nd, 0.5 * (kk + 1.0)) *
                               std::pow(q, 0.5 * (3.0 * kk + 4.0))))
          .done();
    }
  }

  // Bounds for distributions concentrated on finitely many lines.
  LineMixture own;
  const LineMixture* lines = input.lines;
  if (!lines && input.f) {
    own = decompose_line_mixture(*input.f);
    lines = &own;
  }

  if (id == "krc1") {
    KnownBoundInputs own_known;
    const KnownBoundInputs* known = input.known;
    if (!known) {
      if (!lines) return inapplicable(id, n, "needs a line mixture or inputs");
      if (!lines->axis_aligned()) {
        return inapplicable(id, n, "components are not axis-aligned");
      }
      own_known = known_inputs_iid(*lines, n);
      known = &own_known;
    }
    std::vector<std::string> reasons;
    const double two_alpha_e = 2.0 * known->alpha * kE;
    if (!(two_alpha_e < 1.0)) reasons.push_back("2αe=" + fmt(two_alpha_e) + " ≥ 1");
    for (std::size_t m = 0; m < known->sigma_m.size(); ++m) {
      if (!std::isfinite(known->sigma_m[m])) {
        reasons.push_back("σ" + subscript(m + 1) + "=∞");
      }
    }
    if (!reasons.empty()) return inapplicable(id, n, join_and(reasons));
    double sig = 0.0;
    for (double s : known->sigma_m) sig += 1.0 + s;
    double lam = 0.0;
    for (std::size_t m = 0; m < known->lambda_m.size(); ++m) {
      if (known->lambda_m[m] <= 0.0) continue;
      double sq = 0.0;
      for (const auto& row : known->p_im) sq += row[m] * row[m];
      lam += sq / (known->lambda_m[m] * known->lambda_m[m]);
    }
    return b.explicit_part(15.98 / std::pow(1.0 - two_alpha_e, 1.5) * sig * lam).done();
  }

  if (!lines) return inapplicable(id, n, "needs a line mixture");
  const double q = lines->q;
  const double S = lines->S();

  if (id == "p1is5") {
    std::vector<std::string> reasons;
    if (!(q >= 0.8)) reasons.push_back("q=" + format_ratio(q) + " < 4/5");
    for (std::size_t m = 0; m < lines->K(); ++m) {
      const LineComponent& c = lines->components[m];
      if (!std::isfinite(c.sigma)) reasons.push_back("σ" + subscript(m + 1) + "=∞");
      if (!is_unit_axis(c.direction)) {
        reasons.push_back("direction " + c.direction.to_string() +
                          " is not a coordinate axis");
      }
    }
    if (!reasons.empty()) return inapplicable(id, n, join_and(reasons));
    return b.explicit_part(17.34 / nd * S * S).done();
  }

  std::vector<std::string> reasons;
  if (lines->K() < lines->dim) {
    reasons.push_back("K=" + std::to_string(lines->K()) + " < d=" +
                      std::to_string(lines->dim));
  }
  for (std::size_t m = 0; m < lines->K(); ++m) {
    const LineComponent& c = lines->components[m];
    if (!c.span_ok) {
      reasons.push_back("span condition fails on component " +
                        std::to_string(m + 1) + " along " + c.direction.to_string());
    }
    if (!std::isfinite(c.sigma)) reasons.push_back("σ" + subscript(m + 1) + "=∞");
  }
  if (!reasons.empty()) return inapplicable(id, n, join_and(reasons));

  if (id == "thm6") {
    const double e = 1.76 / nd * S * S;
    return b.explicit_part(e).term("C", e * S / (std::sqrt(nd) * std::pow(q, 5))).done();
  }
  if (id == "thm6star" || id == "thm9") {
    return b.term("C", S * S / (nd * std::pow(q, 3.5))).done();
  }
  if (id == "thm7") return b.term("C", S * S * S / (nd * nd * std::pow(q, 6.5))).done();
  if (id == "thm8") {
    return b.term("C", S * S * S * S / (nd * nd * std::pow(q, 6.5))).done();
  }
  if (id == "thm10") return b.explicit_part(1.7 * ab_ratio * S).done();
  throw std::logic_error("bound id without evaluator: " + id);
}

double fit_constant(std::span<const BoundObservation> observations,
                    const std::string& free_id, const BoundConfig& cfg) {
  if (observations.size() < 3) {
    throw std::invalid_argument("fit_constant: need at least 3 observations");
  }
  double best = 0.0;
  for (const BoundObservation& o : observations) {
    if (!o.report.applicable) {
      throw std::invalid_argument("fit_constant: bound not applicable at n=" +
                                  std::to_string(o.report.n));
    }
    double coef = 0.0;
    bool found = false;
    double rest = o.report.explicit_part;
    for (const auto& [id, c] : o.report.generic_terms) {
      if (id == free_id) {
        coef = c;
        found = true;
      } else {
        rest += cfg.value(id) * c;
      }
    }
    if (!found || !(coef > 0.0)) {
      throw std::invalid_argument("fit_constant: degenerate coefficient for '" +
                                  free_id + "' at n=" + std::to_string(o.report.n));
    }
    best = std::max(best, (o.lhs - rest) / coef);
  }
  return best;
}

std::string format_ratio(double x) {
  for (int den = 1; den <= 12; ++den) {
    const double num = std::round(x * den);
    if (std::abs(x * den - num) <= 1e-12 * den) {
      if (den == 1) return std::to_string(static_cast<long long>(num));
      return std::to_string(static_cast<long long>(num)) + "/" + std::to_string(den);
    }
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void write_bound_csv_header(std::ostream& out) {
  out << "bound_id,n,explicit_part,coefficients,total_at_C,applicable,reason\n";
}

void write_bound_csv_row(std::ostream& out, const BoundReport& r) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string coefs;
  for (const auto& [id, c] : r.generic_terms) {
    if (!coefs.empty()) coefs += ";";
    coefs += id + "=" + num(c);
  }
  std::string reason;
  for (char ch : r.reason) {
    if (ch == '"') reason += '"';
    reason += ch;
  }
  out << r.bound_id << ',' << r.n << ',' << num(r.explicit_part) << ',' << coefs
      << ',' << num(r.total_at_C) << ',' << (r.applicable ? "true" : "false")
      << ",\"" << reason << "\"\n";
}

}  // namespace cpapprox

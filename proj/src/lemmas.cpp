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

#include "cpapprox/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "cpapprox/approximants.hpp"
#include "cpapprox/bounds.hpp"

namespace cpapprox {
namespace {

constexpr double kE = 2.718281828459045;

struct Ctx {
  const SignedLatticeMeasure& f;
  double tol;
  SignedLatticeMeasure id;
  SignedLatticeMeasure g;  // F - I

  Ctx(const SignedLatticeMeasure& m, double t)
      : f(m),
        tol(t),
        id(SignedLatticeMeasure::identity(m.dim())),
        g(linear_combine({{1.0, m}, {-1.0, id}})) {}

  SignedLatticeMeasure g_pow(int k) const {
    return k == 0 ? id : convolution_power(g, k, tol);
  }
  SignedLatticeMeasure cp(double a) const {
    const SignedLatticeMeasure e = scale(g, a);
    return measure_exp(e, tol);
  }
  // D^{*a} for any probability measure F.
  SignedLatticeMeasure hipp(double a) const {
    const SignedLatticeMeasure g2 = convolve(g, g);
    return measure_exp(linear_combine({{a, g}, {-0.5 * a, g2}}), tol);
  }
};

LemmaValue measured(const std::string& id, const SignedLatticeMeasure& m,
                    double rhs) {
  LemmaValue v;
  v.lemma_id = id;
  v.lhs = m.tv();
  v.lhs_err = m.error_bound();
  v.rhs = rhs;
  return v;
}

LemmaValue not_applicable(const std::string& id, std::string reason) {
  LemmaValue v;
  v.lemma_id = id;
  v.applicable = false;
  v.reason = std::move(reason);
  return v;
}

void require_probability(const SignedLatticeMeasure& f) {
  if (!f.all_nonnegative()) {
    throw std::invalid_argument("lemma input has a negative weight");
  }
  if (std::abs(f.total_mass() - 1.0) > f.error_bound() + 1e-12) {
    throw std::invalid_argument("lemma input is not a probability measure");
  }
}

// (v + e)^k - v^k: how far a computed power can sit from the true one.
double power_err(double v, double e, double k) {
  return std::pow(v + e, k) - std::pow(v, k);
}

}  // namespace

bool LemmaValue::violated() const {
  if (!applicable || !rhs_explicit) return false;
  return lhs - lhs_err > (rhs + rhs_err) * (1.0 + 1e-14);
}

const std::vector<std::string>& lemma_ids() {
  static const std::vector<std::string> ids = {
      "koD3", "aka",  "normB",     "norms",     "cpto1dim", "b2",   "e2p",
      "cero46", "c6a", "fexp",     "dexp",      "d2ftrys_m", "d2ftrys_a",
      "fd00", "fd2",  "simi3",     "m3",        "thm5",     "thm10"};
  return ids;
}

LemmaValue lemma_lhs(const std::string& id, const SignedLatticeMeasure& f,
                     const LemmaParams& prm, double tol) {
  const auto& ids = lemma_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    throw std::invalid_argument("unknown lemma id '" + id + "'");
  }
  require_probability(f);
  const Ctx c(f, tol);
  const double kk = prm.k;

  if (id == "koD3" || id == "aka" || id == "fexp" || id == "dexp") {
    const double a = id == "koD3" ? prm.lambda : prm.a;
    if (prm.k < 1 || !(a > 0.0)) return not_applicable(id, "needs k >= 1, a > 0");
    std::optional<SymmetricDistribution> sd;
    if (id == "fexp" || id == "dexp") {
      try {
        sd.emplace(f);
      } catch (const InvalidDistribution& e) {
        return not_applicable(id, e.what());
      }
      if (!f.is_symmetric()) return not_applicable(id, "distribution is not symmetric");
    }
    std::optional<LineMixture> lines;
    if (id == "dexp") {
      lines = decompose_line_mixture(*sd);
      std::vector<std::string> why;
      if (lines->K() < lines->dim) why.push_back("K < d");
      if (!lines->span_ok()) why.push_back("span condition fails");
      if (!lines->sigmas_finite()) why.push_back("infinite σ");
      if (!why.empty()) {
        std::string r = why[0];
        for (std::size_t i = 1; i < why.size(); ++i) r += " and " + why[i];
        return not_applicable(id, r);
      }
    }
    const SignedLatticeMeasure lhs = convolve(c.g_pow(prm.k), c.cp(a));
    LemmaValue v = measured(id, lhs, 0.0);
    if (id == "koD3") {
      v.rhs = std::pow(2.0 * kk / (kE * a), kk / 2.0);
    } else if (id == "aka") {
      const SignedLatticeMeasure base = convolve(c.g, c.cp(a / kk));
      v.rhs = std::pow(base.tv(), kk);
      v.rhs_err = power_err(base.tv(), base.error_bound(), kk);
    } else if (id == "fexp") {
      const double d = delta_functional(*sd, a / kk);
      v.rhs = std::pow(2.0 * kk, kk) * std::pow(d, kk) / (std::pow(kE, kk) * std::pow(a, kk));
    } else {
      v.rhs = std::pow(3.6 * kk, kk) / (std::pow(kE, kk) * std::pow(a, kk)) *
              std::pow(lines->S(), kk);
    }
    return v;
  }

  if (id == "normB") {
    if (prm.k < 0) return not_applicable(id, "needs k >= 0");
    const SignedLatticeMeasure m = scale(c.g, prm.a);
    const SignedLatticeMeasure e = measure_exp(m, tol);
    std::vector<SignedLatticeMeasure> powers{c.id};
    std::vector<Term> terms{{1.0, e}, {-1.0, c.id}};
    for (int j = 1; j <= prm.k; ++j) powers.push_back(convolve(powers.back(), m));
    for (int j = 1; j <= prm.k; ++j) terms.push_back({-1.0 / std::tgamma(j + 1.0), powers[j]});
    const SignedLatticeMeasure rem = linear_combine(terms);
    const double mn = m.tv();
    LemmaValue v = measured(id, rem, std::pow(mn, kk + 1.0) * std::exp(mn) /
                                         std::tgamma(kk + 2.0));
    v.rhs_err = m.error_bound() * (kk + 2.0) * std::pow(mn + m.error_bound(), kk) *
                std::exp(mn + m.error_bound()) / std::tgamma(kk + 2.0);
    return v;
  }

  if (id == "norms") {
    const SignedLatticeMeasure e = c.cp(prm.a);
    const SignedLatticeMeasure lhs = convolve(c.g, e);
    LemmaValue v = measured(id, lhs, c.g.tv() * e.tv());
    v.rhs_err = c.g.tv() * e.error_bound() + e.tv() * c.g.error_bound() +
                c.g.error_bound() * e.error_bound();
    return v;
  }

  if (id == "cpto1dim") {
    if (prm.k < 1) return not_applicable(id, "needs k >= 1");
    // sum_j binom(k, j) (-1)^{k-j} F^{*j} = (F - I)^{*k}, coefficients sum
    // to 2^k in absolute value.
    return measured(id, c.g_pow(prm.k), std::pow(2.0, kk));
  }

  if (id == "b2" || id == "e2p") {
    std::vector<double> ps = prm.ps;
    if (id == "e2p") {
      if (prm.n < 1) return not_applicable(id, "needs n >= 1");
      ps.assign(static_cast<std::size_t>(prm.n), prm.p);
    }
    if (ps.empty()) return not_applicable(id, "needs at least one p_i");
    if (!(prm.tau >= 0.0 && prm.tau <= 1.0)) return not_applicable(id, "needs tau in [0,1]");
    double p0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double p : ps) {
      if (!(p > 0.0 && p < 1.0)) return not_applicable(id, "needs p_i in (0,1)");
      p0 = std::max(p0, p);
      s1 += p;
      s2 += p * p;
    }
    const SignedLatticeMeasure g2 = convolve(c.g, c.g);
    const SignedLatticeMeasure m =
        linear_combine({{0.5 * (1.0 + p0) * s1, c.g}, {-0.5 * prm.tau * s2, g2}});
    return measured(id, measure_exp(m, tol), 3.5 / std::sqrt(1.0 - p0));
  }

  if (id == "cero46") {
    if (f.dim() != 1) return not_applicable(id, "needs d = 1");
    if (!f.is_symmetric()) return not_applicable(id, "distribution is not symmetric");
    if (f.trunc_err() > 0.0) return not_applicable(id, "variance is not known exactly");
    if (prm.j < 1 || !(prm.lambda > 0.0)) return not_applicable(id, "needs j >= 1, λ > 0");
    const double q0 = f.weight_at(LatticePoint{0});
    if (!(q0 < 1.0)) return not_applicable(id, "no mass off the origin");
    std::vector<Atom> atoms;
    double var = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::int64_t k = f.key(i)[0];
      if (k == 0) continue;
      const double w = f.weight(i) / (1.0 - q0);
      atoms.push_back({LatticePoint{k}, w});
      var += static_cast<double>(k) * static_cast<double>(k) * w;
    }
    const SignedLatticeMeasure p = SignedLatticeMeasure::from_atoms(1, atoms);
    const Ctx cp(p, tol);
    const SignedLatticeMeasure lhs = convolve(cp.g_pow(prm.j), cp.cp(prm.lambda));
    const double j = prm.j;
    return measured(id, lhs,
                    3.6 * std::sqrt(1.0 + std::sqrt(var)) * std::pow(j, j + 0.25) /
                        (std::pow(prm.lambda, j) * std::pow(kE, j)));
  }

  if (id == "c6a") {
    if (!(prm.p > 0.0 && prm.p < 1.0) || prm.j < 1 || prm.n < 1) {
      return not_applicable(id, "needs p in (0,1), j >= 1, n >= 1");
    }
    const double p = prm.p, q = 1.0 - p;
    const SignedLatticeMeasure mix = linear_combine({{q, c.id}, {p, f}});
    const SignedLatticeMeasure lhs =
        convolve(c.g_pow(prm.j), convolution_power(mix, prm.n, tol));
    const double j = prm.j, n = static_cast<double>(prm.n);
    return measured(id, lhs,
                    std::sqrt(kE) * std::pow(j, 0.25) * std::pow(n / (n + j), n / 2.0) *
                        std::pow(j / ((n + j) * p * q), j / 2.0));
  }

  const double q = f.weight_at(LatticePoint::origin(f.dim()));
  if (id == "d2ftrys_m" || id == "d2ftrys_a" || id == "fd00" || id == "fd2") {
    if (!(q > 0.0 && q < 1.0)) return not_applicable(id, "needs F{0} in (0,1)");
    if (id == "d2ftrys_m") {
      if (prm.n < 1) return not_applicable(id, "needs m >= 1");
      return measured(id, c.hipp(static_cast<double>(prm.n)), 3.5 / std::sqrt(q));
    }
    if (id == "d2ftrys_a") {
      if (prm.a == 0.0) return not_applicable(id, "needs a != 0");
      return measured(id, c.hipp(prm.a), std::exp(4.0 * std::abs(prm.a)));
    }
    const SignedLatticeMeasure d = c.hipp(1.0);
    if (id == "fd00") {
      LemmaValue v = measured(id, linear_combine({{1.0, d}, {-1.0, c.id}}), c.g.tv());
      v.rhs_explicit = false;
      return v;
    }
    const SignedLatticeMeasure g3 = c.g_pow(3);
    const SignedLatticeMeasure g4 = c.g_pow(4);
    LemmaValue v = measured(
        id, linear_combine({{1.0, f}, {-1.0, d}, {-1.0 / 3.0, g3}}), g4.tv());
    v.rhs_explicit = false;
    return v;
  }

  // The remaining lemmas need a symmetric distribution.
  std::optional<SymmetricDistribution> sd;
  try {
    sd.emplace(f);
  } catch (const InvalidDistribution& e) {
    return not_applicable(id, e.what());
  }
  if (!f.is_symmetric()) return not_applicable(id, "distribution is not symmetric");

  if (id == "simi3") {
    const std::size_t dim = f.dim();
    std::vector<SignedLatticeMeasure> pieces;
    pieces.reserve(f.size());
    std::vector<double> coefs;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const LatticePoint x = f.point(i);
      if (x.is_origin()) continue;
      pieces.push_back(SignedLatticeMeasure::from_atoms(
          dim, {{LatticePoint::origin(dim), 2.0}, {x, -1.0}, {-x, -1.0}}));
      coefs.push_back(0.5 * f.weight(i));
    }
    std::vector<Term> terms{{1.0, c.g}};
    for (std::size_t i = 0; i < pieces.size(); ++i) terms.push_back({coefs[i], pieces[i]});
    return measured(id, linear_combine(terms), 0.0);
  }

  if (id == "m3") {
    if (prm.n < 1 || prm.k < 0 || prm.k >= prm.n) return not_applicable(id, "needs k <= n-1");
    const SignedLatticeMeasure power = convolution_power(f, prm.n, 0.5 * tol);
    const SignedLatticeMeasure part = bergstrom_partial(*sd, prm.n, prm.k, 0.5 * tol);
    const double p = 1.0 - q, n = static_cast<double>(prm.n);
    LemmaValue v = measured(id, linear_combine({{1.0, power}, {-1.0, part}}),
                            std::pow(p, 1.5 * (kk + 1.0)) /
                                (std::pow(n, 0.5 * (kk + 1.0)) *
                                 std::pow(q, 0.5 * (3.0 * kk + 4.0))));
    v.rhs_explicit = false;
    return v;
  }

  // thm5, thm10: distance between two accompanying laws.
  BoundParams bp;
  bp.a = prm.a;
  bp.b = prm.b;
  const BoundReport rep = evaluate_bound(id, BoundInput{&*sd, nullptr, nullptr}, bp, BoundConfig{});
  if (!rep.applicable) return not_applicable(id, rep.reason);
  const TvNorm d = tv_distance(c.cp(prm.a), c.cp(prm.b));
  LemmaValue v;
  v.lemma_id = id;
  v.lhs = d.value;
  v.lhs_err = d.err;
  v.rhs = rep.explicit_part;
  return v;
}

}  // namespace cpapprox

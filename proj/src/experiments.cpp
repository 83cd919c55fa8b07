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

#include "cpapprox/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cpapprox/lemmas.hpp"
#include "internal.hpp"
#include "json.hpp"

namespace cpapprox {
namespace {

using internal::kUnitRoundoff;

std::string num(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

std::string example_name(ExampleId id) {
  switch (id) {
    case ExampleId::kEx1: return "ex1";
    case ExampleId::kEx2: return "ex2";
    case ExampleId::kEx3: return "ex3";
  }
  return "?";
}

std::optional<ExampleId> parse_example(const std::string& name) {
  if (name == "ex1") return ExampleId::kEx1;
  if (name == "ex2") return ExampleId::kEx2;
  if (name == "ex3") return ExampleId::kEx3;
  return std::nullopt;
}

std::int64_t default_truncation(ExampleId id, std::int64_t n) {
  switch (id) {
    case ExampleId::kEx1: return std::max<std::int64_t>(1000, 16 * n);
    case ExampleId::kEx3:
      return std::max<std::int64_t>(
          1000, static_cast<std::int64_t>(std::ceil(8.0 * std::cbrt(double(n) * double(n)))));
    case ExampleId::kEx2: return 0;
  }
  return 0;
}

SymmetricDistribution make_example(ExampleSpec& spec) {
  std::vector<Atom> atoms;
  if (spec.id == ExampleId::kEx2) {
    if (spec.n < 2) throw std::invalid_argument("ex2: n must be >= 2");
    atoms = {{LatticePoint{0}, 0.8},
             {LatticePoint{1}, 0.05},
             {LatticePoint{-1}, 0.05},
             {LatticePoint{spec.n}, 0.05},
             {LatticePoint{-spec.n}, 0.05}};
    spec.tail_mass = 0.0;
    // 0.8 and 0.05 are stored to within half an ulp each.
    return SymmetricDistribution(
        SignedLatticeMeasure::from_atoms(1, atoms, 0.0, kUnitRoundoff));
  }
  const std::int64_t K = spec.truncation_K;
  if (K < 2) throw std::invalid_argument("truncation_K must be >= 2");
  const bool ex1 = spec.id == ExampleId::kEx1;
  atoms.reserve(2 * K + 1);
  atoms.push_back({LatticePoint{0}, ex1 ? 0.5 : 8.0 / 9.0});
  for (std::int64_t k = 1; k <= K; ++k) {
    double den = static_cast<double>(k * (k + 1) * (k + 2));
    if (!ex1) den *= static_cast<double>(k + 3);
    const double w = 1.0 / den;
    atoms.push_back({LatticePoint{k}, w});
    atoms.push_back({LatticePoint{-k}, w});
  }
  const double Kd = static_cast<double>(K);
  // One-sided tails: sum_{k>K} 1/(k(k+1)(k+2)) = 1/(2(K+1)(K+2)) and
  // sum_{k>K} 1/(k(k+1)(k+2)(k+3)) = 1/(3(K+1)(K+2)(K+3)).
  const double side = ex1 ? 1.0 / (2.0 * (Kd + 1) * (Kd + 2))
                          : 1.0 / (3.0 * (Kd + 1) * (Kd + 2) * (Kd + 3));
  spec.tail_mass = internal::round_up(2.0 * side);
  SymmetricDistribution::Tail tail;
  tail.mass = spec.tail_mass;
  // sum_{k>K} k^2 F{k} diverges for Ex1; for Ex3 it is
  // sum_{k>K} k/((k+1)(k+2)(k+3)) = (K + 3/2)/((K+2)(K+3)).
  tail.second_moment = ex1 ? std::numeric_limits<double>::infinity()
                           : internal::round_up(2.0 * (Kd + 1.5) / ((Kd + 2) * (Kd + 3)));
  // Each weight carries at most three roundings (two for Ex1 products that
  // exceed 2^53, one for the division, one more for Ex3's extra factor).
  const double round = (ex1 ? 3.0 : 4.0) * kUnitRoundoff;
  return SymmetricDistribution(
      SignedLatticeMeasure::from_atoms(1, atoms, spec.tail_mass, round), tail);
}

SymmetricDistribution make_example(const ExampleSpec& spec) {
  ExampleSpec copy = spec;
  return make_example(copy);
}

DistributionSource example_source(ExampleId id, std::int64_t fixed_K,
                                  std::int64_t outer_scale) {
  return [=](std::int64_t n) {
    ExampleSpec spec;
    spec.id = id;
    spec.n = std::max<std::int64_t>(2, outer_scale * n);
    spec.truncation_K = fixed_K > 0 ? fixed_K : default_truncation(id, n);
    return make_example(spec);
  };
}

DistributionSource fixed_source(const SymmetricDistribution& f) {
  return [f](std::int64_t) { return f; };
}

std::vector<std::string> matched_bounds(ApproximantKind kind) {
  switch (kind.tag) {
    case ApproximantKind::Tag::kConvPower: return {};
    case ApproximantKind::Tag::kAccompanyingCP:
      return {"thm1", "thm1star", "cor1_cp", "thm6", "thm6star", "p1is5", "krc1"};
    case ApproximantKind::Tag::kHippSCP: return {"thm2", "cor1_hipp", "thm7"};
    case ApproximantKind::Tag::kFirstOrderCP: return {"thm3", "cor1_first", "thm8"};
    case ApproximantKind::Tag::kBergstromPartial: return {"bergD", "cor2", "m3"};
  }
  return {};
}

std::vector<ExperimentRecord> sweep(const DistributionSource& source,
                                    std::span<const std::int64_t> n_grid,
                                    std::span<const ApproximantKind> kinds,
                                    double tol, const SweepOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("sweep: tol must be > 0");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("sweep: n grid must be strictly ascending");
    }
  }
  std::vector<std::vector<ExperimentRecord>> slots(n_grid.size());
  if (kinds.empty()) return {};

  auto run_cell = [&](std::size_t idx) {
    const std::int64_t n = n_grid[idx];
    std::vector<ExperimentRecord>& out = slots[idx];
    auto fail_all = [&](const std::string& why) {
      out.clear();
      for (const ApproximantKind& kind : kinds) {
        ExperimentRecord r;
        r.example = options.label;
        r.result.n = n;
        r.result.kind = kind;
        r.failure = why;
        out.push_back(std::move(r));
      }
    };
    std::optional<SymmetricDistribution> f;
    std::optional<SignedLatticeMeasure> power;
    double power_seconds = 0.0;
    try {
      f.emplace(source(n));
      const auto start = std::chrono::steady_clock::now();
      power.emplace(convolution_power(f->measure(), n, 0.5 * tol));
      power_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    } catch (const std::exception& e) {
      fail_all(e.what());
      return;
    }
    for (const ApproximantKind& kind : kinds) {
      ExperimentRecord r;
      r.example = options.label;
      r.result.n = n;
      r.result.kind = kind;
      try {
        r.result = approximate_against(*power, *f, n, kind, 0.5 * tol);
        if (kind.tag == ApproximantKind::Tag::kConvPower) {
          r.result.elapsed = power_seconds;
        }
        if (options.with_bounds) {
          BoundParams bp;
          bp.n = n;
          bp.k = kind.k;
          for (const std::string& id : matched_bounds(kind)) {
            BoundReport rep =
                evaluate_bound(id, BoundInput{&*f, nullptr, nullptr}, bp, options.cfg);
            if (rep.applicable) r.bounds.push_back(std::move(rep));
          }
        }
      } catch (const std::exception& e) {
        r.failure = e.what();
      }
      out.push_back(std::move(r));
    }
  };

  const int threads = std::max(1, std::min<int>(options.threads,
                                                static_cast<int>(n_grid.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_grid.size(); ++i) run_cell(i);
  } else {
    // Largest n first so the slowest cells start early.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < n_grid.size();) {
          run_cell(n_grid.size() - 1 - i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<ExperimentRecord> all;
  for (auto& s : slots) {
    for (auto& r : s) all.push_back(std::move(r));
  }
  return all;
}

double rate_slope(std::span<const ExperimentRecord> records) {
  if (records.size() < 4) {
    throw NumericalRefusal("rate_slope: need at least 4 records, got " +
                           std::to_string(records.size()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ExperimentRecord& r : records) {
    if (!r.ok()) {
      throw NumericalRefusal("rate_slope: cell n=" + std::to_string(r.result.n) +
                             " failed: " + r.failure);
    }
    const double d = r.result.tv_distance;
    if (!(d > 10.0 * r.result.err_interval) || !(d > 0.0)) {
      throw NumericalRefusal("rate_slope: distance " + num("%.3g", d) + " at n=" +
                             std::to_string(r.result.n) +
                             " is not above ten times its error interval " +
                             num("%.3g", r.result.err_interval));
    }
    const double x = std::log(static_cast<double>(r.result.n));
    const double y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(records.size());
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) throw NumericalRefusal("rate_slope: n values must differ");
  return (m * sxy - sx * sy) / den;
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
      throw std::invalid_argument("bad grid value '" + s + "' in '" + text + "'");
    }
    return static_cast<std::int64_t>(v);
  };
  std::vector<std::int64_t> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3 || parts[2].size() < 2) {
      throw std::invalid_argument("grid must look like start:stop:x2 or start:stop:+8");
    }
    const std::int64_t lo = to_int(parts[0]);
    const std::int64_t hi = to_int(parts[1]);
    const std::int64_t step = to_int(parts[2].substr(1));
    if (parts[2][0] == 'x') {
      if (step < 2 || lo < 1) throw std::invalid_argument("geometric grid needs x>=2, start>=1");
      for (std::int64_t v = lo; v <= hi; v *= step) out.push_back(v);
    } else if (parts[2][0] == '+') {
      if (step < 1) throw std::invalid_argument("arithmetic grid needs a positive step");
      for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
    } else {
      throw std::invalid_argument("grid step must start with 'x' or '+'");
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_int(p));
  }
  if (out.empty()) throw std::invalid_argument("grid '" + text + "' is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1 || (i && out[i] <= out[i - 1])) {
      throw std::invalid_argument("grid values must be positive and ascending");
    }
  }
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const ExperimentRecord> records,
                     const std::string& provenance, bool record_timing) {
  out << "# " << provenance << '\n';
  out << "example,kind,n,distance,err,support,elapsed_s,bounds\n";
  for (const ExperimentRecord& r : records) {
    out << r.example << ',' << r.result.kind.name() << ',' << r.result.n << ',';
    if (!r.ok()) {
      out << "nan,nan,0," << (record_timing ? "0" : "na") << ",error:"
          << sanitize(r.failure) << '\n';
      continue;
    }
    out << num("%.12g", r.result.tv_distance) << ','
        << num("%.4g", r.result.err_interval) << ',' << r.result.support_size << ','
        << (record_timing ? num("%.3f", r.result.elapsed) : std::string("na"));
    for (const BoundReport& b : r.bounds) {
      out << ',' << b.bound_id << ':' << num("%.6g", b.total_at_C);
    }
    out << '\n';
  }
}

ScanProfile load_scan_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan profile '" + path + "'");
  const nlohmann::json j = nlohmann::json::parse(in);
  ScanProfile p;
  p.version = j.at("version").get<int>();
  if (p.version != 1) {
    throw std::invalid_argument("unsupported scan profile version " +
                                std::to_string(p.version));
  }
  p.q_min = j.value("q_min", p.q_min);
  p.q_max = j.value("q_max", p.q_max);
  p.coord_range_1d = j.value("coord_range_1d", p.coord_range_1d);
  p.coord_range_nd = j.value("coord_range_nd", p.coord_range_nd);
  p.lambda_grid = j.value("lambda_grid", p.lambda_grid);
  p.lambda_max_by_dim = j.value("lambda_max_by_dim", p.lambda_max_by_dim);
  p.k_max = j.value("k_max", p.k_max);
  p.a_max = j.value("a_max", p.a_max);
  p.m_max = j.value("m_max", p.m_max);
  p.n_max = j.value("n_max", p.n_max);
  p.p_min = j.value("p_min", p.p_min);
  p.p_max = j.value("p_max", p.p_max);
  p.line_k_max_1d = j.value("line_k_max_1d", p.line_k_max_1d);
  p.line_k_max_nd = j.value("line_k_max_nd", p.line_k_max_nd);
  p.line_extra_components = j.value("line_extra_components", p.line_extra_components);
  p.tol = j.value("tol", p.tol);
  if (!(p.q_min > 0.0 && p.q_min <= p.q_max && p.q_max < 1.0) || p.lambda_grid.empty() ||
      p.k_max < 1 || !(p.tol > 0.0)) {
    throw std::invalid_argument("scan profile '" + path + "' has invalid values");
  }
  return p;
}

std::string scan_profile_json(const ScanProfile& p) {
  nlohmann::ordered_json j;
  j["version"] = p.version;
  j["q_min"] = p.q_min;
  j["q_max"] = p.q_max;
  j["coord_range_1d"] = p.coord_range_1d;
  j["coord_range_nd"] = p.coord_range_nd;
  j["lambda_grid"] = p.lambda_grid;
  j["lambda_max_by_dim"] = p.lambda_max_by_dim;
  j["k_max"] = p.k_max;
  j["a_max"] = p.a_max;
  j["m_max"] = p.m_max;
  j["n_max"] = p.n_max;
  j["p_min"] = p.p_min;
  j["p_max"] = p.p_max;
  j["line_k_max_1d"] = p.line_k_max_1d;
  j["line_k_max_nd"] = p.line_k_max_nd;
  j["line_extra_components"] = p.line_extra_components;
  j["tol"] = p.tol;
  return j.dump(2);
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) {
    x = ex(rng) + 1e-3;  // keeps every weight visibly positive
    s += x;
  }
  for (double& x : w) x /= s;
  return w;
}

bool canonical(const std::vector<std::int64_t>& v) {
  for (std::int64_t c : v) {
    if (c != 0) return c > 0;
  }
  return false;
}

// All canonical (first nonzero coordinate positive) points of [-r, r]^d.
std::vector<std::vector<std::int64_t>> canonical_points(int d, int r, bool primitive) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> v(d, -r);
  while (true) {
    if (canonical(v)) {
      std::int64_t g = 0;
      for (std::int64_t c : v) g = std::gcd(g, c < 0 ? -c : c);
      if (!primitive || g == 1) out.push_back(v);
    }
    int i = d - 1;
    while (i >= 0 && v[i] == r) v[i--] = -r;
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

SignedLatticeMeasure assemble(int d, double q,
                              const std::vector<std::vector<std::int64_t>>& pts,
                              const std::vector<double>& pair_mass) {
  std::vector<Atom> atoms{{LatticePoint::origin(d), q}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::int64_t> neg(pts[i].size());
    for (std::size_t c = 0; c < neg.size(); ++c) neg[c] = -pts[i][c];
    const double w = 0.5 * pair_mass[i];
    atoms.push_back({LatticePoint(pts[i]), w});
    atoms.push_back({LatticePoint(std::move(neg)), w});
  }
  return SignedLatticeMeasure::from_atoms(d, atoms);
}

}  // namespace

SignedLatticeMeasure random_symmetric(std::mt19937_64& rng, int dim_max,
                                      int atoms_max, const ScanProfile& p) {
  const int d = static_cast<int>(uniform_int(rng, 1, std::max(1, dim_max)));
  const int r = d == 1 ? p.coord_range_1d : p.coord_range_nd;
  auto pool = canonical_points(d, r, false);
  const std::int64_t max_pairs =
      std::min<std::int64_t>(std::max(d, (atoms_max - 1) / 2), pool.size());
  const std::int64_t pairs = uniform_int(rng, std::min<std::int64_t>(d, max_pairs), max_pairs);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(pairs);
  std::sort(pool.begin(), pool.end());
  const double q = uniform(rng, p.q_min, p.q_max);
  auto w = dirichlet(rng, pool.size());
  for (double& x : w) x *= 1.0 - q;
  return assemble(d, q, pool, w);
}

SignedLatticeMeasure random_line_mixture(std::mt19937_64& rng, int dim_max,
                                         const ScanProfile& p) {
  const int d = static_cast<int>(uniform_int(rng, 1, std::max(1, dim_max)));
  auto dirs = canonical_points(d, 1, true);
  std::shuffle(dirs.begin(), dirs.end(), rng);
  const std::int64_t K = std::min<std::int64_t>(
      dirs.size(), uniform_int(rng, d, d + p.line_extra_components));
  dirs.resize(K);
  // The first d directions must span R^d for the unit axes to be covered;
  // that is not required by the assumptions, only K >= d is.
  const int kmax = d == 1 ? p.line_k_max_1d : p.line_k_max_nd;
  const double q = uniform(rng, p.q_min, p.q_max);
  const auto line_mass = dirichlet(rng, dirs.size());
  std::vector<std::vector<std::int64_t>> pts;
  std::vector<double> masses;
  for (std::size_t m = 0; m < dirs.size(); ++m) {
    const std::int64_t k0 = uniform_int(rng, 1, std::max(1, kmax - 1));
    std::set<std::int64_t> ks{k0, k0 + 1};
    for (std::int64_t k = 1; k <= kmax; ++k) {
      if (uniform(rng, 0.0, 1.0) < 0.5) ks.insert(k);
    }
    const auto w = dirichlet(rng, ks.size());
    std::size_t i = 0;
    for (std::int64_t k : ks) {
      std::vector<std::int64_t> v(d);
      for (int c = 0; c < d; ++c) v[c] = k * dirs[m][c];
      pts.push_back(std::move(v));
      masses.push_back((1.0 - q) * line_mass[m] * w[i++]);
    }
  }
  return assemble(d, q, pts, masses);
}

ScanResult lemma_scan(const std::string& lemma_id, int trials, std::uint64_t seed,
                      int dim_max, int atoms_max, const ScanProfile& p) {
  if (trials < 1) throw std::invalid_argument("lemma_scan: trials must be >= 1");
  const auto& ids = lemma_ids();
  if (std::find(ids.begin(), ids.end(), lemma_id) == ids.end()) {
    throw std::invalid_argument("unknown lemma id '" + lemma_id + "'");
  }
  std::mt19937_64 rng(seed);
  const bool lines = lemma_id == "dexp" || lemma_id == "thm10";
  const bool one_dim = lemma_id == "c6a" || lemma_id == "cero46";
  ScanResult res;
  for (int t = 0; t < trials; ++t) {
    const SignedLatticeMeasure f =
        lines ? random_line_mixture(rng, dim_max, p)
              : random_symmetric(rng, one_dim ? 1 : dim_max, atoms_max, p);
    const int d = static_cast<int>(f.dim());
    std::vector<double> lam;
    const double lam_cap = p.lambda_max_by_dim.empty()
                               ? std::numeric_limits<double>::infinity()
                               : p.lambda_max_by_dim[std::min<std::size_t>(
                                     d - 1, p.lambda_max_by_dim.size() - 1)];
    for (double l : p.lambda_grid) {
      if (l <= lam_cap) lam.push_back(l);
    }
    if (lam.empty()) lam.push_back(p.lambda_grid.front());
    LemmaParams prm;
    prm.k = static_cast<int>(uniform_int(rng, 1, p.k_max));
    prm.j = static_cast<int>(uniform_int(rng, 1, p.k_max));
    prm.lambda = lam[uniform_int(rng, 0, lam.size() - 1)];
    prm.a = prm.lambda;
    prm.p = uniform(rng, p.p_min, p.p_max);
    prm.tau = uniform(rng, 0.0, 1.0);
    prm.n = uniform_int(rng, 1, p.n_max);
    if (lemma_id == "d2ftrys_m") {
      const double m_cap = std::min<double>(static_cast<double>(p.m_max), lam_cap);
      prm.n = uniform_int(rng, 1, std::max<std::int64_t>(1, static_cast<std::int64_t>(m_cap)));
    }
    if (lemma_id == "d2ftrys_a") prm.a = uniform(rng, -4.0, 4.0);
    if (lemma_id == "normB" || lemma_id == "norms") prm.a = uniform(rng, 0.05, 4.0);
    if (lemma_id == "thm5" || lemma_id == "thm10") {
      prm.a = uniform(rng, 0.0, p.a_max);
      prm.b = uniform(rng, 0.0, p.a_max);
      if (prm.a == 0.0) prm.a = p.a_max;
      if (prm.b == 0.0) prm.b = p.a_max;
      const double hi = std::max(prm.a, prm.b);
      if (hi > lam_cap) {
        prm.a *= lam_cap / hi;
        prm.b *= lam_cap / hi;
      }
    }
    if (lemma_id == "m3" || lemma_id == "fd2" || lemma_id == "fd00") {
      prm.k = static_cast<int>(uniform_int(rng, 0, std::min<std::int64_t>(p.k_max, prm.n - 1)));
    }
    LemmaValue v;
    try {
      v = lemma_lhs(lemma_id, f, prm, p.tol);
    } catch (const NumericalRefusal&) {
      ++res.skipped;
      continue;
    }
    if (!v.applicable) {
      ++res.skipped;
      continue;
    }
    ++res.evaluated;
    double ratio;
    if (v.rhs > 0.0) {
      ratio = v.lhs / v.rhs;
    } else if (v.lhs == 0.0) {
      ratio = 0.0;
    } else {
      ratio = v.lhs_err > 0.0 ? v.lhs / v.lhs_err : std::numeric_limits<double>::infinity();
    }
    if (v.violated()) ++res.violations;
    if (res.evaluated == 1 || ratio > res.worst_ratio) {
      res.worst_ratio = ratio;
      std::ostringstream os;
      os << "trial " << t << ": d=" << d << " atoms=" << f.size() << " k=" << prm.k
         << " j=" << prm.j << " lambda=" << prm.lambda << " a=" << prm.a
         << " b=" << prm.b << " p=" << prm.p << " n=" << prm.n << " lhs=" << v.lhs
         << " rhs=" << v.rhs;
      res.worst_case = os.str();
    }
  }
  return res;
}

}  // namespace cpapprox

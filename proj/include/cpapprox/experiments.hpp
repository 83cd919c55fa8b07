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

// Example distributions, approximation sweeps, convergence-rate fits and
// randomized checks of the auxiliary inequalities.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cpapprox/approximants.hpp"
#include "cpapprox/bounds.hpp"
#include "cpapprox/measure.hpp"

namespace cpapprox {

enum class ExampleId { kEx1, kEx2, kEx3 };

/// Ex1: F{0} = 1/2, F{+-k} = 1/(k(k+1)(k+2)).
/// Ex2: F{0} = 0.8, F{+-1} = F{+-n} = 0.05.
/// Ex3: F{+-k} = 1/(k(k+1)(k+2)(k+3)), F{0} = 8/9 so that the mass is 1.
struct ExampleSpec {
  ExampleId id = ExampleId::kEx1;
  /// Largest |k| stored for Ex1 and Ex3 (>= 2).
  std::int64_t truncation_K = 1000;
  /// Location of the outer atoms of Ex2.
  std::int64_t n = 2;
  /// Filled in by make_example: the mass that was not stored.
  double tail_mass = 0.0;
};

std::string example_name(ExampleId id);
std::optional<ExampleId> parse_example(const std::string& name);

/// Truncation used when none is given: Ex1 max(1000, 16 n), Ex3
/// max(1000, 8 n^{2/3}); 0 for Ex2.
std::int64_t default_truncation(ExampleId id, std::int64_t n);

SymmetricDistribution make_example(ExampleSpec& spec);
SymmetricDistribution make_example(const ExampleSpec& spec);

/// Supplies the distribution for a given n (Ex2 moves its outer atom, the
/// truncation of Ex1 and Ex3 grows with n).
using DistributionSource = std::function<SymmetricDistribution(std::int64_t n)>;

/// Source for a built-in example. A positive fixed_K overrides the default
/// truncation; Ex2 places its outer atoms at +-(outer_scale * n).
DistributionSource example_source(ExampleId id, std::int64_t fixed_K = 0,
                                  std::int64_t outer_scale = 1);

/// Source that ignores n.
DistributionSource fixed_source(const SymmetricDistribution& f);

struct SweepOptions {
  int threads = 1;
  BoundConfig cfg;
  std::string label = "custom";
  bool with_bounds = true;
};

struct ExperimentRecord {
  std::string example;
  ApproximationResult result;
  std::vector<BoundReport> bounds;
  std::string failure;

  bool ok() const { return failure.empty(); }
};

/// Bound ids evaluated for records of the given kind.
std::vector<std::string> matched_bounds(ApproximantKind kind);

/// One record per (n, kind), ordered by n and then by the order of kinds.
/// F^{*n} is computed once per n with tol / 2 and every approximant with
/// tol / 2. Failures are recorded in the cell.
std::vector<ExperimentRecord> sweep(const DistributionSource& source,
                                    std::span<const std::int64_t> n_grid,
                                    std::span<const ApproximantKind> kinds,
                                    double tol, const SweepOptions& options = {});

/// Least-squares slope of log(distance) against log(n). Throws
/// NumericalRefusal unless there are at least 4 records and every distance
/// exceeds ten times its error interval.
double rate_slope(std::span<const ExperimentRecord> records);

/// "8:4096:x2" (geometric), "8:64:+8" (arithmetic) or "8,16,32".
std::vector<std::int64_t> parse_grid(const std::string& text);

void write_sweep_csv(std::ostream& out,
                     std::span<const ExperimentRecord> records,
                     const std::string& provenance, bool record_timing);

/// Parameters of the random instance generators, versioned on disk.
struct ScanProfile {
  int version = 1;
  double q_min = 0.1;
  double q_max = 0.9;
  int coord_range_1d = 4;
  int coord_range_nd = 2;
  std::vector<double> lambda_grid = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  /// Largest lambda used for each dimension 1, 2, 3, ...
  std::vector<double> lambda_max_by_dim = {256, 256, 64};
  int k_max = 3;
  double a_max = 64.0;
  std::int64_t m_max = 256;
  std::int64_t n_max = 64;
  double p_min = 0.05;
  double p_max = 0.95;
  int line_k_max_1d = 4;
  int line_k_max_nd = 2;
  int line_extra_components = 1;
  double tol = 1e-10;
};

ScanProfile load_scan_profile(const std::string& path);
std::string scan_profile_json(const ScanProfile& p);

/// Random symmetric distribution: dimension in [1, dim_max], at most
/// atoms_max atoms, at least dim symmetric pairs.
SignedLatticeMeasure random_symmetric(std::mt19937_64& rng, int dim_max,
                                      int atoms_max, const ScanProfile& p);

/// Random distribution concentrated on K >= d lines with the span
/// condition and finite variances.
SignedLatticeMeasure random_line_mixture(std::mt19937_64& rng, int dim_max,
                                         const ScanProfile& p);

struct ScanResult {
  double worst_ratio = 0.0;
  std::size_t violations = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::string worst_case;
};

/// Evaluates the lemma on `trials` random instances. For lemmas with an
/// unspecified constant the ratio is lhs / coefficient, an empirical
/// estimate of that constant.
ScanResult lemma_scan(const std::string& lemma_id, int trials, std::uint64_t seed,
                      int dim_max, int atoms_max, const ScanProfile& profile = {});

}  // namespace cpapprox

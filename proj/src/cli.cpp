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

#include "cpapprox/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cpapprox/approximants.hpp"
#include "cpapprox/bounds.hpp"
#include "cpapprox/experiments.hpp"
#include "cpapprox/lemmas.hpp"
#include "cpapprox/measure.hpp"

namespace cpapprox::cli {
namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunProfile {
  std::string subcommand;
  std::string in;
  std::string id;
  std::string out;
  std::int64_t n = 0;
  std::string grid = "8:4096:x2";
  std::string kinds = "cp";
  std::string kind = "cp";
  double tol = 1e-9;
  std::uint64_t seed = 42;
  int threads = 1;
  std::vector<std::string> C;
  bool no_timing = false;
  // bounds
  std::string bound;
  int k = 1;
  double a = 0.0;
  double b = 0.0;
  // check-lemma
  std::string lemma;
  int trials = 500;
  int dim_max = 3;
  int atoms_max = 20;
  std::string profile;
  // fit-c
  std::string free_id;
};

// Shortest of %.15g / %.17g that reads back as the same double.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

BoundConfig parse_config(const std::vector<std::string>& entries) {
  BoundConfig cfg;
  for (const std::string& e : entries) {
    const auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--C expects key=value, got '" + e + "'");
    }
    double v = 0.0;
    try {
      std::size_t pos = 0;
      v = std::stod(e.substr(eq + 1), &pos);
      if (pos != e.size() - eq - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw UsageError("--C value in '" + e + "' is not a number");
    }
    cfg.set(e.substr(0, eq), v);
  }
  return cfg;
}

std::vector<ApproximantKind> parse_kinds(const std::string& text) {
  std::vector<ApproximantKind> kinds;
  for (const std::string& name : split(text, ',')) {
    auto k = ApproximantKind::parse(name);
    if (!k) throw UsageError("unknown approximant kind '" + name + "'");
    kinds.push_back(*k);
  }
  return kinds;
}

// Every numeric and selection flag that influences the output.
std::string provenance(const RunProfile& p) {
  std::string s = "cpapprox " + p.subcommand;
  if (!p.id.empty()) s += " id=" + p.id;
  if (!p.in.empty()) s += " in=" + p.in;
  if (p.n) s += " n=" + std::to_string(p.n);
  s += " tol=" + fmt(p.tol) + " seed=" + std::to_string(p.seed);
  if (!p.C.empty()) {
    s += " C=";
    for (std::size_t i = 0; i < p.C.size(); ++i) s += (i ? ";" : "") + p.C[i];
  }
  return s;
}

// Writes to --out, or to stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void require_source(const RunProfile& p) {
  if (p.in.empty() == p.id.empty()) {
    throw UsageError("exactly one of --in and --id is required");
  }
  if (!p.id.empty() && !parse_example(p.id)) {
    throw UsageError("unknown example id '" + p.id + "' (ex1, ex2, ex3)");
  }
}

DistributionSource make_source(const RunProfile& p) {
  require_source(p);
  if (!p.in.empty()) {
    return fixed_source(SymmetricDistribution(load_measure(p.in)));
  }
  return example_source(*parse_example(p.id));
}

std::int64_t require_n(const RunProfile& p) {
  if (p.n < 1) throw UsageError("--n must be given and >= 1");
  return p.n;
}

int run_example(const RunProfile& p) {
  const auto id = parse_example(p.id);
  if (!id) throw UsageError("--id must be one of ex1, ex2, ex3");
  const std::int64_t n = require_n(p);
  const SymmetricDistribution f = example_source(*id)(n);
  Output out(p.out);
  out.stream() << "# " << provenance(p) << '\n';
  write_measure(out.stream(), f.measure());
  return 0;
}

int run_approx(const RunProfile& p) {
  const std::int64_t n = require_n(p);
  const auto kinds = parse_kinds(p.kind);
  if (kinds.size() != 1) throw UsageError("--kind takes a single approximant");
  SweepOptions opt;
  opt.cfg = parse_config(p.C);
  opt.label = p.id.empty() ? "file" : p.id;
  const SymmetricDistribution f = make_source(p)(n);
  ExperimentRecord r;
  r.example = opt.label;
  r.result = approximate(f, n, kinds[0], p.tol);
  BoundParams bp;
  bp.n = n;
  bp.k = kinds[0].k;
  for (const std::string& id : matched_bounds(kinds[0])) {
    BoundReport rep = evaluate_bound(id, BoundInput{&f, nullptr, nullptr}, bp, opt.cfg);
    if (rep.applicable) r.bounds.push_back(std::move(rep));
  }
  Output out(p.out);
  write_sweep_csv(out.stream(), std::span(&r, 1), provenance(p) + " kind=" + p.kind,
                  !p.no_timing);
  return 0;
}

int run_sweep(const RunProfile& p) {
  const auto grid = parse_grid(p.grid);
  const auto kinds = parse_kinds(p.kinds);
  SweepOptions opt;
  opt.cfg = parse_config(p.C);
  opt.threads = p.threads;
  opt.label = p.id.empty() ? "file" : p.id;
  const auto records = sweep(make_source(p), grid, kinds, p.tol, opt);
  Output out(p.out);
  write_sweep_csv(out.stream(), records,
                  provenance(p) + " grid=" + p.grid + " kinds=" + p.kinds, !p.no_timing);
  return 0;
}

int run_bounds(const RunProfile& p) {
  const std::int64_t n = require_n(p);
  const BoundConfig cfg = parse_config(p.C);
  const SymmetricDistribution f = make_source(p)(n);
  std::vector<std::string> ids = p.bound.empty() ? bound_ids() : split(p.bound, ',');
  BoundParams bp;
  bp.n = n;
  bp.k = p.k;
  bp.a = p.a;
  bp.b = p.b;
  Output out(p.out);
  out.stream() << "# " << provenance(p) << " k=" << p.k << " a=" << fmt(p.a)
               << " b=" << fmt(p.b) << '\n';
  write_bound_csv_header(out.stream());
  for (const std::string& id : ids) {
    write_bound_csv_row(out.stream(),
                        evaluate_bound(id, BoundInput{&f, nullptr, nullptr}, bp, cfg));
  }
  return 0;
}

int run_check_lemma(const RunProfile& p) {
  const ScanProfile profile =
      p.profile.empty() ? ScanProfile{} : load_scan_profile(p.profile);
  std::vector<std::string> ids =
      p.lemma == "all" ? lemma_ids() : split(p.lemma, ',');
  if (ids.empty()) throw UsageError("--lemma is required");
  Output out(p.out);
  out.stream() << "# " << provenance(p) << " trials=" << p.trials
               << " dim_max=" << p.dim_max << " atoms_max=" << p.atoms_max
               << " profile=" << (p.profile.empty() ? "builtin" : p.profile) << '\n';
  out.stream() << "lemma,trials,evaluated,skipped,violations,worst_ratio,worst_case\n";
  std::size_t violations = 0;
  for (const std::string& id : ids) {
    const ScanResult r = lemma_scan(id, p.trials, p.seed, p.dim_max, p.atoms_max, profile);
    violations += r.violations;
    char ratio[32];
    std::snprintf(ratio, sizeof(ratio), "%.6g", r.worst_ratio);
    out.stream() << id << ',' << p.trials << ',' << r.evaluated << ',' << r.skipped << ','
                 << r.violations << ',' << ratio << ",\"" << r.worst_case << "\"\n";
  }
  if (violations) std::cerr << violations << " violation(s) found\n";
  return 0;
}

int run_fit_c(const RunProfile& p) {
  if (p.bound.empty() || p.free_id.empty()) {
    throw UsageError("fit-c needs --bound and --free");
  }
  const auto kinds = parse_kinds(p.kind);
  if (kinds.size() != 1) throw UsageError("--kind takes a single approximant");
  const auto grid = parse_grid(p.grid);
  const DistributionSource source = make_source(p);
  SweepOptions opt;
  opt.cfg = parse_config(p.C);
  opt.threads = p.threads;
  opt.with_bounds = false;
  const auto records = sweep(source, grid, kinds, p.tol, opt);
  std::vector<BoundObservation> obs;
  for (const ExperimentRecord& r : records) {
    const std::string cell = "cell n=" + std::to_string(r.result.n);
    if (!r.ok()) throw NumericalRefusal(cell + ": " + r.failure);
    if (!(r.result.tv_distance > r.result.err_interval)) {
      throw NumericalRefusal(cell + ": distance is within its error interval");
    }
    const SymmetricDistribution f = source(r.result.n);
    BoundParams bp;
    bp.n = r.result.n;
    bp.k = kinds[0].k;
    BoundReport rep = evaluate_bound(p.bound, BoundInput{&f, nullptr, nullptr}, bp, opt.cfg);
    if (!rep.applicable) continue;
    const double d = r.result.tv_distance + r.result.err_interval;
    obs.push_back({rep.bounds_norm ? 2.0 * d : d, std::move(rep)});
  }
  const double c = fit_constant(obs, p.free_id, opt.cfg);
  Output out(p.out);
  out.stream() << "# " << provenance(p) << " grid=" << p.grid << " kind=" << p.kind << '\n';
  out.stream() << "bound,constant,value,observations\n";
  out.stream() << p.bound << ',' << p.free_id << ',' << fmt(c) << ',' << obs.size() << '\n';
  return 0;
}

}  // namespace

int dispatch(int argc, char** argv) {
  RunProfile p;
  p.threads = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Compound Poisson approximation of lattice convolution powers"};
  app.require_subcommand(1);

  auto source_opts = [&](CLI::App* s) {
    s->add_option("--in", p.in, "measure file");
    s->add_option("--id", p.id, "built-in example: ex1, ex2, ex3");
  };
  auto common = [&](CLI::App* s) {
    s->add_option("--tol", p.tol, "error budget")->check(CLI::PositiveNumber);
    s->add_option("--C", p.C, "constant override key=value (repeatable)");
    s->add_option("--seed", p.seed, "random seed");
    s->add_option("--threads", p.threads, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--out", p.out, "output file (default stdout)");
    s->add_flag("--no-timing", p.no_timing, "write na instead of elapsed seconds");
  };

  CLI::App* example = app.add_subcommand("example", "write an example distribution");
  example->add_option("--id", p.id, "ex1, ex2 or ex3")->required();
  example->add_option("--n", p.n, "n (Ex2 atom location, Ex1/Ex3 truncation)")->required();
  common(example);

  CLI::App* approx = app.add_subcommand("approx", "one approximation cell");
  source_opts(approx);
  approx->add_option("--n", p.n, "number of summands")->required();
  approx->add_option("--kind", p.kind, "conv, cp, hipp, first or berg<k>");
  common(approx);

  CLI::App* sw = app.add_subcommand("sweep", "approximation sweep over an n grid");
  source_opts(sw);
  sw->add_option("--grid", p.grid, "n grid: 8:4096:x2, 8:64:+8 or 8,16,32");
  sw->add_option("--kinds", p.kinds, "comma-separated approximant kinds");
  common(sw);

  CLI::App* bounds = app.add_subcommand("bounds", "evaluate error bounds");
  source_opts(bounds);
  bounds->add_option("--n", p.n, "number of summands")->required();
  bounds->add_option("--bound", p.bound, "comma-separated bound ids (default all)");
  bounds->add_option("--k", p.k, "expansion order");
  bounds->add_option("--a", p.a, "first intensity");
  bounds->add_option("--b", p.b, "second intensity");
  common(bounds);

  CLI::App* lemma = app.add_subcommand("check-lemma", "randomized inequality scan");
  lemma->add_option("--lemma", p.lemma, "lemma id, comma list or all")->required();
  lemma->add_option("--trials", p.trials, "instances per lemma")->check(CLI::PositiveNumber);
  lemma->add_option("--dim-max", p.dim_max, "largest dimension")->check(CLI::PositiveNumber);
  lemma->add_option("--atoms-max", p.atoms_max, "largest support size")
      ->check(CLI::Range(3, 1000));
  lemma->add_option("--profile", p.profile, "scan profile JSON");
  common(lemma);

  CLI::App* fit = app.add_subcommand("fit-c", "fit an unspecified constant");
  source_opts(fit);
  fit->add_option("--grid", p.grid, "n grid");
  fit->add_option("--kind", p.kind, "approximant kind");
  fit->add_option("--bound", p.bound, "bound id")->required();
  fit->add_option("--free", p.free_id, "constant to fit, e.g. thm1.C1")->required();
  common(fit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  p.subcommand = chosen->get_name();
  try {
    if (chosen == example) return run_example(p);
    if (chosen == approx) return run_approx(p);
    if (chosen == sw) return run_sweep(p);
    if (chosen == bounds) return run_bounds(p);
    if (chosen == lemma) return run_check_lemma(p);
    return run_fit_c(p);
  } catch (const NumericalRefusal& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cpapprox::cli

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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cpapprox/measure.hpp"

namespace cpapprox {
namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw std::invalid_argument("measure file line " + std::to_string(line) +
                              ": " + what);
}

double parse_number(std::size_t line, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') parse_error(line, "bad number '" + text + "'");
  return v;
}

}  // namespace

void write_measure(std::ostream& out, const SignedLatticeMeasure& m) {
  out << "dim=" << m.dim() << " trunc_err=" << format_double(m.trunc_err());
  if (m.round_err() != 0.0) out << " round_err=" << format_double(m.round_err());
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::int64_t c : m.key(i)) out << c << ' ';
    out << format_double(m.weight(i)) << '\n';
  }
}

SignedLatticeMeasure read_measure(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  double trunc = 0.0;
  double round = 0.0;
  bool have_header = false;
  std::vector<Atom> atoms;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (!have_header) {
      std::string tok;
      bool have_dim = false;
      bool have_trunc = false;
      while (fields >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) parse_error(lineno, "expected key=value");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "dim") {
          const double d = parse_number(lineno, val);
          if (d < 1 || d != static_cast<double>(static_cast<long long>(d))) {
            parse_error(lineno, "dim must be a positive integer");
          }
          dim = static_cast<std::size_t>(d);
          have_dim = true;
        } else if (key == "trunc_err") {
          trunc = parse_number(lineno, val);
          have_trunc = true;
        } else if (key == "round_err") {
          round = parse_number(lineno, val);
        } else {
          parse_error(lineno, "unknown header field '" + key + "'");
        }
      }
      if (!have_dim || !have_trunc) {
        parse_error(lineno, "header must contain dim= and trunc_err=");
      }
      have_header = true;
      continue;
    }
    std::vector<std::int64_t> coords(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!(fields >> coords[d])) parse_error(lineno, "expected coordinate");
    }
    double w = 0.0;
    if (!(fields >> w)) parse_error(lineno, "expected weight");
    std::string extra;
    if (fields >> extra) parse_error(lineno, "trailing field '" + extra + "'");
    atoms.push_back({LatticePoint(std::move(coords)), w});
  }
  if (!have_header) throw std::invalid_argument("measure file has no header");
  return SignedLatticeMeasure::from_atoms(dim, atoms, trunc, round);
}

void save_measure(const std::string& path, const SignedLatticeMeasure& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_measure(out, m);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SignedLatticeMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_measure(in);
}

}  // namespace cpapprox

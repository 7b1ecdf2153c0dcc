#pragma once

// Plain-text inputs (shift, cocycle, tables, flow specs, trigonometric
// polynomials, sampled flow functions) and CSV/JSON outputs.
// Blank lines and lines starting with '#' are ignored by every reader.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sflow/embedding.hpp"
#include "sflow/equivalence.hpp"
#include "sflow/error.hpp"
#include "sflow/potential.hpp"
#include "sflow/spectrum.hpp"
#include "sflow/suspension.hpp"
#include "sflow/symbolic.hpp"

namespace sflow {

using json = nlohmann::ordered_json;

/// 15 significant digits, shortest form.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

/// x rounded to 15 significant digits, for JSON output.
inline double round15(double x) { return std::isfinite(x) ? std::stod(fmt(x)) : x; }

namespace detail {

class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  /// Next non-blank, non-comment line split into tokens; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      std::istringstream ss(line);
      tokens.clear();
      std::string t;
      while (ss >> t) tokens.push_back(t);
      if (!tokens.empty() && tokens.front()[0] != '#') return true;
    }
    tokens.clear();
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(name_, line_, what); }
  const std::string& name() const noexcept { return name_; }
  int line() const noexcept { return line_; }

  double real(const std::string& t) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + t + "'");
    }
    if (used != t.size()) fail("expected a number, got '" + t + "'");
    return v;
  }

  int integer(const std::string& t) const {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + t + "'");
    }
    if (used != t.size()) fail("expected an integer, got '" + t + "'");
    return v;
  }

 private:
  std::istream& in_;
  std::string name_;
  int line_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

}  // namespace detail

/// First line k, then k rows of k entries in {0,1}.
inline Sft parse_sft(std::istream& in, const std::string& name = "<sft>") {
  detail::LineReader r(in, name);
  std::vector<std::string> t;
  if (!r.next(t)) r.fail("missing alphabet size");
  if (t.size() != 1) r.fail("first line must hold only k");
  const int k = r.integer(t[0]);
  if (k < 1) r.fail("k must be positive");
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < k; ++i) {
    if (!r.next(t)) r.fail("expected " + std::to_string(k) + " matrix rows, got " + std::to_string(i));
    if (static_cast<int>(t.size()) != k) r.fail("row must have " + std::to_string(k) + " entries");
    std::vector<int> row;
    for (const auto& s : t) row.push_back(r.integer(s));
    rows.push_back(std::move(row));
  }
  if (r.next(t)) r.fail("trailing content after the matrix");
  try {
    return Sft(std::move(rows));
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
}

inline Sft read_sft(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_sft(in, path);
}

inline void write_sft(std::ostream& out, const Sft& sft) {
  out << sft.k() << '\n';
  for (int i = 0; i < sft.k(); ++i) {
    for (int j = 0; j < sft.k(); ++j) out << (j ? " " : "") << sft.entry(i, j);
    out << '\n';
  }
}

/// Header "k d", then k matrices of d rows with d reals each.
inline MatrixCocycle parse_cocycle(std::istream& in, const std::string& name = "<cocycle>") {
  detail::LineReader r(in, name);
  std::vector<std::string> t;
  if (!r.next(t) || t.size() != 2) r.fail("header must be 'k d'");
  const int k = r.integer(t[0]), d = r.integer(t[1]);
  if (k < 1 || d < 1) r.fail("k and d must be positive");
  std::vector<Eigen::MatrixXd> ms;
  for (int s = 0; s < k; ++s) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
      if (!r.next(t)) r.fail("missing row " + std::to_string(i) + " of matrix " + std::to_string(s));
      if (static_cast<int>(t.size()) != d) r.fail("matrix row must have " + std::to_string(d) + " entries");
      for (int j = 0; j < d; ++j) m(i, j) = r.real(t[static_cast<std::size_t>(j)]);
    }
    ms.push_back(std::move(m));
  }
  if (r.next(t)) r.fail("trailing content after the matrices");
  return MatrixCocycle(std::move(ms));
}

inline MatrixCocycle read_cocycle(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_cocycle(in, path);
}

/// "0110" for alphabets up to 10 symbols, otherwise symbols joined by '.'.
inline std::string word_to_string(std::span<const int> w, int k) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (k > 10 && i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

inline Word word_from_string(const std::string& s) {
  Word w;
  if (s.find('.') != std::string::npos) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, '.')) {
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) throw InvalidArgument("bad word '" + s + "'");
      w.push_back(std::stoi(part));
    }
  } else {
    for (char c : s) {
      if (c < '0' || c > '9') throw InvalidArgument("bad word '" + s + "'");
      w.push_back(c - '0');
    }
  }
  if (w.empty()) throw InvalidArgument("empty word");
  return w;
}

namespace detail {

inline LocallyConstantFunction parse_table_body(LineReader& r, const Sft& sft, std::vector<std::string>& t) {
  if (t.size() != 2 || t[0] != "depth") r.fail("expected 'depth m'");
  const int depth = r.integer(t[1]);
  if (depth < 1) r.fail("depth must be >= 1");
  std::map<Word, double> values;
  while (r.next(t)) {
    if (t.size() != 2) r.fail("expected 'word value'");
    Word w;
    try {
      w = word_from_string(t[0]);
    } catch (const InvalidArgument& e) {
      r.fail(e.what());
    }
    if (static_cast<int>(w.size()) != depth) r.fail("word '" + t[0] + "' does not have length " + std::to_string(depth));
    if (!sft.is_admissible(w)) r.fail("word '" + t[0] + "' is not admissible");
    if (!values.emplace(w, r.real(t[1])).second) r.fail("duplicate word '" + t[0] + "'");
  }
  std::string missing;
  for_each_word(sft, depth, [&](const Word& w) {
    if (missing.empty() && !values.count(w)) missing = word_to_string(w, sft.k());
  });
  if (!missing.empty()) r.fail("table has no value for word '" + missing + "'");
  return LocallyConstantFunction::from(sft, depth, [&](std::span<const int> w) { return values.at(Word(w.begin(), w.end())); });
}

}  // namespace detail

/// "depth m", then one "word value" line per admissible m-word.
inline LocallyConstantFunction parse_table(std::istream& in, const Sft& sft, const std::string& name = "<table>") {
  detail::LineReader r(in, name);
  std::vector<std::string> t;
  if (!r.next(t)) r.fail("empty table");
  return detail::parse_table_body(r, sft, t);
}

inline LocallyConstantFunction read_table(const std::string& path, const Sft& sft) {
  auto in = detail::open_input(path);
  return parse_table(in, sft, path);
}

inline void write_table(std::ostream& out, const LocallyConstantFunction& f) {
  out << "depth " << f.depth() << '\n';
  for (const auto& [w, v] : f.table()) out << word_to_string(w, f.sft().k()) << ' ' << fmt(v) << '\n';
}

/// "sft <path>" (relative to the spec file), then the roof table.
inline SuspensionFlow read_flow(const std::string& path) {
  auto in = detail::open_input(path);
  detail::LineReader r(in, path);
  std::vector<std::string> t;
  if (!r.next(t) || t.size() != 2 || t[0] != "sft") r.fail("expected 'sft <path>'");
  const auto sft_path = (std::filesystem::path(path).parent_path() / t[1]).string();
  const Sft sft = read_sft(sft_path);
  if (!r.next(t)) r.fail("missing roof table");
  auto tau = detail::parse_table_body(r, sft, t);
  try {
    return SuspensionFlow(sft, RoofFunction(std::move(tau)));
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
}

/// One "n_1 ... n_d re im" line per frequency; the dimension is fixed by the first line.
inline TrigPolynomial parse_trig(std::istream& in, const std::string& name = "<trig>") {
  detail::LineReader r(in, name);
  std::vector<std::string> t;
  int dim = 0;
  std::map<Frequency, cplx> coef;
  while (r.next(t)) {
    if (t.size() < 3) r.fail("expected 'n_1 ... n_d re im'");
    const int d = static_cast<int>(t.size()) - 2;
    if (dim == 0) dim = d;
    if (d != dim) r.fail("frequency dimension changes from " + std::to_string(dim) + " to " + std::to_string(d));
    Frequency n;
    for (int i = 0; i < d; ++i) n.push_back(r.integer(t[static_cast<std::size_t>(i)]));
    coef[n] += cplx(r.real(t[static_cast<std::size_t>(d)]), r.real(t[static_cast<std::size_t>(d + 1)]));
  }
  if (dim == 0) r.fail("no coefficients");
  try {
    return TrigPolynomial(dim, std::move(coef));
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
}

inline TrigPolynomial read_trig(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_trig(in, path);
}

inline void write_trig(std::ostream& out, const TrigPolynomial& p) {
  for (const auto& [n, c] : p.coefficients()) {
    for (int v : n) out << v << ' ';
    out << fmt(c.real()) << ' ' << fmt(c.imag()) << '\n';
  }
}

/// CSV "word,height,value": values on a height grid per word, linearly
/// interpolated in height and held constant beyond the grid ends.
inline FlowFunction parse_sampled(std::istream& in, const Sft& sft, const std::string& name = "<sampled>") {
  std::string line;
  int lineno = 0;
  std::map<Word, std::vector<std::pair<double, double>>> grid;
  int depth = 0;
  auto fail = [&](const std::string& what) { throw ParseError(name, lineno, what); };
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("word,height,value", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string ws, hs, vs;
    if (!std::getline(ss, ws, ',') || !std::getline(ss, hs, ',') || !std::getline(ss, vs)) fail("expected word,height,value");
    Word w;
    double h = 0.0, v = 0.0;
    try {
      w = word_from_string(ws);
      h = std::stod(hs);
      v = std::stod(vs);
    } catch (const std::exception& e) {
      fail(std::string("bad field: ") + e.what());
    }
    if (depth == 0) depth = static_cast<int>(w.size());
    if (static_cast<int>(w.size()) != depth) fail("all words must have length " + std::to_string(depth));
    if (!sft.is_admissible(w)) fail("word '" + ws + "' is not admissible");
    grid[w].emplace_back(h, v);
  }
  if (grid.empty()) throw ParseError(name, lineno, "no samples");
  std::string missing;
  for_each_word(sft, depth, [&](const Word& w) {
    if (missing.empty() && !grid.count(w)) missing = word_to_string(w, sft.k());
  });
  if (!missing.empty()) throw ParseError(name, lineno, "no samples for word '" + missing + "'");
  for (auto& [w, pts] : grid) std::sort(pts.begin(), pts.end());
  auto shared = std::make_shared<const decltype(grid)>(std::move(grid));
  return FlowFunction::sampled(
      depth,
      [shared, depth](std::span<const int> w, double s) {
        const auto& pts = shared->at(Word(w.begin(), w.begin() + depth));
        if (s <= pts.front().first) return pts.front().second;
        if (s >= pts.back().first) return pts.back().second;
        auto hi = std::upper_bound(pts.begin(), pts.end(), std::make_pair(s, -std::numeric_limits<double>::infinity()));
        auto lo = hi - 1;
        const double u = (s - lo->first) / (hi->first - lo->first);
        return lo->second + u * (hi->second - lo->second);
      },
      name);
}

inline FlowFunction read_sampled(const std::string& path, const Sft& sft) {
  auto in = detail::open_input(path);
  return parse_sampled(in, sft, path);
}

// ---- CSV writers ----

inline void write_defect_csv(std::ostream& out, const std::vector<DiscreteDefectPoint>& pts) {
  out << "n,defect,exact\n";
  for (const auto& p : pts) out << p.n << ',' << fmt(p.value) << ',' << (p.exact ? 1 : 0) << '\n';
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& pts) {
  out << "t,defect\n";
  for (const auto& p : pts) out << fmt(p.time) << ',' << fmt(p.value) << '\n';
}

struct PressureSweepRow {
  double parameter, pressure, entropy, integral;
};

inline void write_pressure_csv(std::ostream& out, const std::vector<PressureSweepRow>& rows) {
  out << "parameter,pressure,entropy,integral\n";
  for (const auto& r : rows) out << fmt(r.parameter) << ',' << fmt(r.pressure) << ',' << fmt(r.entropy) << ',' << fmt(r.integral) << '\n';
}

inline void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows) {
  out << "alpha,dim_formula2,dim_formula1,q_star,witness_params\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("empty"); };
  for (const auto& r : rows) {
    out << fmt(r.alpha) << ',' << opt(r.dim_formula2) << ',' << opt(r.dim_formula1) << ',' << fmt(r.q_star) << ',';
    if (r.dim_formula1)
      out << "q=" << fmt(r.witness.q) << ";t=" << fmt(r.witness.t) << ";ratio=" << fmt(r.witness.ratio) << ";h=" << fmt(r.witness.entropy)
          << ";int_u=" << fmt(r.witness.u_integral);
    out << '\n';
  }
}

// ---- JSON ----

inline json table_json(const LocallyConstantFunction& f) {
  json t = json::object();
  for (const auto& [w, v] : f.table()) t[word_to_string(w, f.sft().k())] = round15(v);
  return t;
}

inline json to_json(const EquivalenceReport& r) {
  json j;
  j["family"] = r.family_label;
  j["N"] = r.n_used;
  j["horizon"] = round15(r.horizon);
  j["discrete_defect"] = json::array();
  for (const auto& p : r.discrete_defect) j["discrete_defect"].push_back({{"n", p.n}, {"defect", round15(p.value)}, {"exact", p.exact}});
  j["flow_defect"] = json::array();
  for (const auto& p : r.flow_defect) j["flow_defect"].push_back({{"t", round15(p.time)}, {"defect", round15(p.value)}});
  j["xi_depth"] = r.xi.depth();
  j["xi"] = table_json(r.xi);
  j["psi"] = r.b.is_lifted() ? r.b.as_lifted().psi.name : std::string("none");
  return j;
}

inline json frequency_list_json(const TrigPolynomial& p) {
  json a = json::array();
  for (const auto& [n, c] : p.coefficients()) a.push_back({{"n", n}, {"re", round15(c.real())}, {"im", round15(c.imag())}});
  return a;
}

inline json to_json(const EmbeddingSolution& s) {
  json j;
  j["solved"] = s.solved();
  if (s.b) j["b"] = frequency_list_json(*s.b);
  j["resonances"] = json::array();
  for (const auto& r : s.resonances)
    j["resonances"].push_back({{"n", r.n}, {"rotation", round15(r.rotation)}, {"re", round15(r.coefficient.real())}, {"im", round15(r.coefficient.imag())}});
  j["small_divisors"] = json::array();
  for (const auto& d : s.small_divisors) j["small_divisors"].push_back({{"n", d.n}, {"modulus", round15(d.modulus)}});
  return j;
}

inline json to_json(const BbpReport& r) {
  json j;
  j["samples_used"] = r.derivative.size();
  j["mean_derivative"] = round15(r.mean);
  j["spread"] = round15(r.spread);
  j["worst_disagreement"] = round15(r.worst_disagreement);
  j["inconclusive"] = r.inconclusive;
  j["obstruction"] = r.obstruction;
  return j;
}

inline json to_json(const std::vector<CertificateRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back({{"t", round15(r.t)}, {"max_residual", round15(r.max_residual)}});
  return a;
}

inline json to_json(const ResolventResult& r) {
  json j;
  j["a"] = frequency_list_json(r.a);
  j["c"] = frequency_list_json(r.c);
  j["residual"] = round15(r.residual);
  return j;
}

}  // namespace sflow

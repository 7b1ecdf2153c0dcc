#pragma once

// Configuration-driven experiments. A config is one flat JSON object:
//   kind        pressure | suspension | equivalence | spectrum | embedding
//   name        run label, also the default output directory name
//   output      output directory (default sflow-out/<name>)
//   expected, tolerance   the declared pass/fail check
// plus kind-specific keys documented on each runner. Data may be inline or a
// path relative to the config file.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sflow/embedding.hpp"
#include "sflow/equivalence.hpp"
#include "sflow/error.hpp"
#include "sflow/io.hpp"
#include "sflow/potential.hpp"
#include "sflow/spectrum.hpp"
#include "sflow/suspension.hpp"
#include "sflow/symbolic.hpp"
#include "sflow/transfer.hpp"

namespace sflow {

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"pressure", "suspension", "equivalence", "spectrum", "embedding"};
  return kinds;
}

class ExperimentConfig {
 public:
  static ExperimentConfig from_json(json doc, std::filesystem::path base_dir = std::filesystem::current_path(),
                                    std::string source = "<config>") {
    ExperimentConfig c;
    c.doc_ = std::move(doc);
    c.base_ = std::move(base_dir);
    c.source_ = std::move(source);
    if (!c.doc_.is_object()) c.fail("config must be a JSON object");
    for (const auto& [k, v] : c.doc_.items())
      if (v.is_object()) c.fail("key '" + k + "': nested objects are not allowed (flat keys only)");
    c.kind_ = c.str("kind");
    if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind_) == experiment_kinds().end())
      c.fail("unknown experiment kind '" + c.kind_ + "'");
    c.name_ = c.str("name", c.kind_);
    if (c.has("tolerance") && !(c.num("tolerance") > 0.0)) c.fail("tolerance must be positive");
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open config");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      // locate the failing byte
      int line = 1;
      for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
      throw ParseError(path, line, "invalid JSON");
    }
    return from_json(std::move(doc), std::filesystem::absolute(path).parent_path(), path);
  }

  const std::string& kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const json& doc() const noexcept { return doc_; }
  const std::string& source() const noexcept { return source_; }

  bool has(const std::string& key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, 0, what); }

  const json& at(const std::string& key) const {
    if (!has(key)) fail("missing key '" + key + "'");
    return doc_.at(key);
  }

  double num(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) fail("key '" + key + "' must be a number");
    return v.get<double>();
  }
  double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_number_integer()) fail("key '" + key + "' must be an integer");
    return v.get<int>();
  }

  std::string str(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) fail("key '" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!doc_.at(key).is_boolean()) fail("key '" + key + "' must be true or false");
    return doc_.at(key).get<bool>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array()) fail("key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail("key '" + key + "' must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// Path relative to the config file; must exist.
  std::string file(const std::string& key) const {
    const auto p = base_ / str(key);
    if (!std::filesystem::exists(p)) fail("key '" + key + "': file '" + p.string() + "' does not exist");
    return p.string();
  }

  std::filesystem::path output_dir() const {
    if (has("output")) return base_ / str("output");
    return std::filesystem::path("sflow-out") / name_;
  }

 private:
  json doc_;
  std::filesystem::path base_;
  std::string source_;
  std::string kind_, name_;
};

// ---- input builders ----

namespace detail {

inline Sft config_sft(const ExperimentConfig& c, const std::string& key = "sft") {
  if (c.has("flow")) return read_flow(c.file("flow")).base();
  const auto& v = c.at(key);
  if (v.is_array()) {
    try {
      return Sft(v.get<std::vector<std::vector<int>>>());
    } catch (const json::exception&) {
      c.fail("key '" + key + "' must be a 0/1 matrix");
    } catch (const InvalidArgument& e) {
      c.fail(std::string("key '") + key + "': " + e.what());
    }
  }
  const std::string s = c.str(key);
  if (s == "golden-mean") return Sft::golden_mean();
  if (s.rfind("full:", 0) == 0) {
    try {
      return Sft::full_shift(std::stoi(s.substr(5)));
    } catch (const std::exception&) {
      c.fail("key '" + key + "': bad full shift '" + s + "'");
    }
  }
  return read_sft(c.file(key));
}

/// A per-symbol array, a constant number, or a table file.
inline LocallyConstantFunction config_function(const ExperimentConfig& c, const Sft& sft, const std::string& key, double fallback) {
  if (!c.has(key)) return LocallyConstantFunction::constant(sft, fallback);
  const auto& v = c.at(key);
  if (v.is_number()) return LocallyConstantFunction::constant(sft, v.get<double>());
  if (v.is_array()) {
    const auto vals = c.numbers(key);
    if (static_cast<int>(vals.size()) != sft.k()) c.fail("key '" + key + "' needs one value per symbol");
    return LocallyConstantFunction::per_symbol(sft, vals);
  }
  return read_table(c.file(key), sft);
}

inline SuspensionFlow config_flow(const ExperimentConfig& c) {
  if (c.has("flow")) return read_flow(c.file("flow"));
  const Sft sft = config_sft(c);
  auto tau = config_function(c, sft, "roof", 1.0);
  if (!(tau.min() > 0.0)) c.fail("key 'roof': roof must be strictly positive");
  return SuspensionFlow(sft, RoofFunction(std::move(tau)));
}

inline MatrixCocycle config_cocycle(const ExperimentConfig& c) {
  const auto& v = c.at("cocycle");
  if (v.is_string()) return read_cocycle(c.file("cocycle"));
  try {
    std::vector<Eigen::MatrixXd> ms;
    for (const auto& m : v) {
      const auto rows = m.get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd e(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) c.fail("key 'cocycle': matrices must be square");
        for (std::size_t j = 0; j < rows.size(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
      ms.push_back(std::move(e));
    }
    return MatrixCocycle(std::move(ms));
  } catch (const json::exception&) {
    c.fail("key 'cocycle' must be a list of matrices or a file");
  } catch (const InvalidArgument& e) {
    c.fail(std::string("key 'cocycle': ") + e.what());
  }
}

inline TrigPolynomial config_trig(const ExperimentConfig& c, const std::string& key) {
  const auto& v = c.at(key);
  if (v.is_string()) return read_trig(c.file(key));
  std::map<Frequency, cplx> coef;
  int dim = 0;
  try {
    for (const auto& row : v) {
      const auto r = row.get<std::vector<double>>();
      if (r.size() < 3) c.fail("key '" + key + "': rows are [n_1, ..., n_d, re, im]");
      const int d = static_cast<int>(r.size()) - 2;
      if (dim == 0) dim = d;
      if (d != dim) c.fail("key '" + key + "': inconsistent frequency dimension");
      Frequency n;
      for (int i = 0; i < d; ++i) n.push_back(static_cast<int>(std::lround(r[static_cast<std::size_t>(i)])));
      coef[n] += cplx(r[static_cast<std::size_t>(d)], r[static_cast<std::size_t>(d + 1)]);
    }
  } catch (const json::exception&) {
    c.fail("key '" + key + "' must be a list of coefficient rows or a file");
  }
  if (dim == 0) c.fail("key '" + key + "' has no coefficients");
  try {
    return TrigPolynomial(dim, std::move(coef));
  } catch (const InvalidArgument& e) {
    c.fail(std::string("key '") + key + "': " + e.what());
  }
}

inline FlowFamily config_family(const ExperimentConfig& c, const SuspensionFlow& flow) {
  const std::string fam = c.str("family");
  if (fam == "lifted") {
    const auto xi = config_function(c, flow.base(), "xi", 0.0);
    return FlowFamily::additive(flow, lift(flow, xi, BumpProfile::by_name(c.str("psi", "smoothstep"))), "lifted");
  }
  if (fam == "linear") return FlowFamily::linear(c.num("rate"));
  if (fam == "cocycle") return FlowFamily::cocycle(flow, config_cocycle(c));
  c.fail("unknown family '" + fam + "' (lifted, linear, cocycle)");
}

inline std::vector<double> config_alphas(const ExperimentConfig& c) {
  if (c.has("alphas")) return c.numbers("alphas");
  const double lo = c.num("alpha_min"), hi = c.num("alpha_max");
  const int steps = c.integer("alpha_steps", 9);
  if (steps < 1) c.fail("alpha_steps must be >= 1");
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) out.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  return out;
}

}  // namespace detail

struct RunResult {
  int status = 0;  // 0 pass, 2 tolerance failure, 1 input error
  std::string summary;
  std::vector<std::string> outputs;
};

namespace detail {

struct Outcome {
  std::string key;
  double value;
  double tolerance;
  bool pass;
  std::string note;
};

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::ofstream open(const std::string& file) {
    const auto p = dir_ / file;
    std::ofstream out(p);
    if (!out) throw InvalidArgument("cannot write " + p.string());
    written_.push_back(p.string());
    return out;
  }

  std::vector<std::string> written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

inline Outcome check_expected(const ExperimentConfig& c, const std::string& key, double value, double default_tol) {
  const double tol = c.num("tolerance", default_tol);
  if (!c.has("expected")) return {key, value, tol, std::isfinite(value), ""};
  return {key, value, tol, std::abs(value - c.num("expected")) <= tol, "expected " + fmt(c.num("expected"))};
}

/// pressure: sft, potential (per symbol / number / table), scales (list of beta; sweep of beta*potential).
/// Key scalar: pressure of the potential. Also checks h + beta int phi = P to 1e-9 on every row.
inline Outcome run_pressure(const ExperimentConfig& c, OutputDir& out) {
  const Sft sft = config_sft(c);
  const auto phi = config_function(c, sft, "potential", 0.0);
  const auto scales = c.has("scales") ? c.numbers("scales") : std::vector<double>{1.0};
  std::vector<PressureSweepRow> rows(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    const auto pot = scales[i] * phi;
    const auto mu = gibbs_measure(sft, pot);
    rows[i] = {scales[i], pressure(sft, pot), entropy(mu), integrate(mu, phi)};
  });
  double variational = 0.0;
  for (const auto& r : rows) variational = std::max(variational, std::abs(r.entropy + r.parameter * r.integral - r.pressure));
  auto f = out.open("pressure.csv");
  write_pressure_csv(f, rows);
  const double value = pressure(sft, phi);
  auto o = check_expected(c, "pressure", value, 1e-10);
  if (variational > 1e-9) {
    o.pass = false;
    o.note += " variational residual " + fmt(variational);
  }
  json j{{"pressure", round15(value)}, {"variational_residual", round15(variational)}};
  out.open("result.json") << j.dump(2) << '\n';
  return o;
}

/// suspension: sft+roof or flow, g (height-independent base function), nu (base potential for
/// the measures), nu_scales. Key scalar: flow pressure of g. Also checks Abramov to 1e-9.
inline Outcome run_suspension(const ExperimentConfig& c, OutputDir& out) {
  const auto flow = config_flow(c);
  const auto g = config_function(c, flow.base(), "g", 0.0);
  const auto nu_pot = config_function(c, flow.base(), "nu", 0.0);
  const auto scales = c.has("nu_scales") ? c.numbers("nu_scales") : std::vector<double>{0.0, 1.0};
  const double p = flow_pressure(flow, FlowFunction::from_base(g));
  auto f = out.open("abramov.csv");
  f << "parameter,base_entropy,mean_roof,flow_entropy,residual\n";
  double worst = 0.0;
  for (double s : scales) {
    const auto nu = gibbs_measure(flow.base(), s * nu_pot);
    const double h = entropy(nu), mean = integrate(nu, flow.roof().function()), hf = abramov_entropy(flow, nu);
    const double residual = std::abs(hf * mean - h);
    worst = std::max(worst, residual);
    f << fmt(s) << ',' << fmt(h) << ',' << fmt(mean) << ',' << fmt(hf) << ',' << fmt(residual) << '\n';
  }
  auto o = check_expected(c, "flow_pressure", p, 1e-9);
  if (worst > 1e-9) {
    o.pass = false;
    o.note += " abramov residual " + fmt(worst);
  }
  json j{{"flow_pressure", round15(p)}, {"abramov_worst_residual", round15(worst)}};
  out.open("result.json") << j.dump(2) << '\n';
  return o;
}

/// equivalence: flow, family (lifted: xi, psi | linear: rate | cocycle: cocycle), N, T or T_factor,
/// check = max_flow_defect (every point <= tolerance) | decay_ratio (last / first <= tolerance).
inline Outcome run_equivalence(const ExperimentConfig& c, OutputDir& out) {
  const auto flow = config_flow(c);
  const auto fam = config_family(c, flow);
  const int n = c.integer("N", 8);
  const double horizon = c.has("T") ? c.num("T") : c.num("T_factor", 64.0) * flow.roof().sup();
  PipelineOptions opt;
  opt.sample_period = c.integer("sample_period", opt.sample_period);
  opt.heights = c.integer("heights", opt.heights);
  const auto report = equivalence_pipeline(flow, fam, n, horizon, opt);
  out.open("report.json") << to_json(report).dump(2) << '\n';
  auto d = out.open("discrete_defect.csv");
  write_defect_csv(d, report.discrete_defect);
  auto fd = out.open("flow_defect.csv");
  write_curve_csv(fd, report.flow_defect);

  const std::string check = c.str("check", "max_flow_defect");
  if (check == "max_flow_defect") {
    double worst = 0.0;
    for (const auto& p : report.flow_defect) worst = std::max(worst, p.value);
    const double tol = c.num("tolerance", 1e-8);
    return {"max_flow_defect", worst, tol, worst <= tol, ""};
  }
  if (check == "decay_ratio") {
    const double ratio = report.flow_defect.back().value / report.flow_defect.front().value;
    const double tol = c.num("tolerance", 0.25);
    return {"decay_ratio", ratio, tol, ratio <= tol, "final " + fmt(report.flow_defect.back().value)};
  }
  c.fail("unknown equivalence check '" + check + "'");
}

/// spectrum: sft, roof, a (xi of the lifted family a), b (xi of b; default b_t = t), u (height-independent
/// base function, default 1), alphas or alpha_min/alpha_max/alpha_steps, N (default 1),
/// check = binary_entropy | duality, expect_empty (alphas that must have empty level sets).
inline Outcome run_spectrum(const ExperimentConfig& c, OutputDir& out) {
  const auto flow = config_flow(c);
  const auto a = FlowFamily::additive(flow, lift(flow, config_function(c, flow.base(), "a", 0.0)), "a");
  const auto b = c.has("b") ? FlowFamily::additive(flow, lift(flow, config_function(c, flow.base(), "b", 1.0)), "b") : FlowFamily::linear(1.0);
  const auto u = FlowFunction::from_base(config_function(c, flow.base(), "u", 1.0));
  const SpectrumProblem problem{flow, a, b, u, c.integer("N", 1)};
  const auto model = prepare(problem);
  const auto alphas = detail::config_alphas(c);
  const auto rows = compute_spectrum(model, alphas);
  auto f = out.open("spectrum.csv");
  write_spectrum_csv(f, rows);

  const std::string check = c.str("check", "duality");
  const double tol = c.num("tolerance", check == "binary_entropy" ? 1e-4 : 1e-3);
  double worst = 0.0;
  bool pass = true;
  for (const auto& r : rows) {
    if (!r.dim_formula2) continue;
    double err = 0.0;
    if (check == "binary_entropy") {
      const double x = r.alpha;
      err = std::abs(*r.dim_formula2 - (-x * std::log(x) - (1 - x) * std::log(1 - x)));
    } else if (check == "duality") {
      if (!r.dim_formula1) {
        pass = false;
        continue;
      }
      err = std::abs(*r.dim_formula2 - *r.dim_formula1);
    } else {
      c.fail("unknown spectrum check '" + check + "'");
    }
    worst = std::max(worst, err);
  }
  std::string note;
  if (c.has("expect_empty")) {
    for (double alpha : c.numbers("expect_empty"))
      if (spectrum_dim(model, alpha).dim) {
        pass = false;
        note += " alpha=" + fmt(alpha) + " not empty";
      }
  }
  const auto iv = model.interval();
  json j{{"alpha_min", round15(iv.lo)}, {"alpha_max", round15(iv.hi)}, {"peak", round15(spectrum_peak(model))}, {"worst_error", round15(worst)}};
  out.open("result.json") << j.dump(2) << '\n';
  return {check, worst, tol, pass && worst <= tol, note};
}

/// embedding: case = exp-log | exp-poly | sawtooth | solve | resolvent | coboundary.
inline Outcome run_embedding(const ExperimentConfig& c, OutputDir& out) {
  const std::string which = c.str("case");
  json j{{"case", which}};
  Outcome o;
  if (which == "exp-log" || which == "exp-poly") {
    // analytic average against 64-panel quadrature on a grid of points
    const ScalarExpFlow flow(which == "exp-poly");
    const auto xs = c.has("points") ? c.numbers("points") : std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0};
    double worst = 0.0;
    if (which == "exp-log") {
      const LogFunction f{1.0, 0.0};
      const auto analytic = average_operator(flow, f);
      const auto quad = average_operator<ScalarExpFlow>(flow, [f](double x) { return f(x); });
      for (double x : xs) worst = std::max(worst, std::abs(quad(x) - analytic(x)));
      j["offset"] = round15(analytic.offset);
    } else {
      const HomogeneousPolynomial p{c.num("coefficient", 1.0), c.integer("degree", 2)};
      const auto analytic = average_operator(flow, p);
      const auto quad = average_operator<ScalarExpFlow>(flow, [p](double x) { return p(x); });
      for (double x : xs) worst = std::max(worst, std::abs(quad(x) - analytic(x)) / std::max(1.0, std::abs(analytic(x))));
      j["factor"] = round15(analytic.coefficient / p.coefficient);
    }
    const double tol = c.num("tolerance", which == "exp-log" ? 1e-12 : 1e-7);
    o = {"quadrature_gap", worst, tol, worst <= tol, ""};
  } else if (which == "sawtooth") {
    const auto dir = c.numbers("direction");
    if (dir.size() != 2) c.fail("sawtooth needs a 2-dimensional direction");
    const TorusLinearFlow flow(dir);
    BbpOptions bopt;
    const double reach = 2.0 * bopt.h_grid.front() * (std::abs(dir[0]) + std::abs(dir[1])) + 1e-9;
    auto sawtooth = [](const Point& x) {
      const double v = x[0] + x[1];
      return v - std::floor(v);
    };
    auto near_jump = [reach](const Point& x) {
      const double v = x[0] + x[1];
      const double frac = v - std::floor(v);
      return frac < reach || frac > 1.0 - reach;
    };
    const auto r = bbp_test(flow, sawtooth, torus_grid(2, c.integer("grid", 40)), near_jump, bopt);
    j["bbp"] = to_json(r);
    const double target = dir[0] + dir[1];
    const double tol = c.num("tolerance", 1e-6);
    o = {"mean_derivative", r.mean, tol, r.obstruction && std::abs(r.mean - target) <= tol,
         r.obstruction ? "obstruction: derivative ~ " + fmt(target) + " = alpha1+alpha2" : "no obstruction"};
  } else if (which == "solve") {
    const TorusLinearFlow flow(c.numbers("direction"));
    const auto bt = config_trig(c, "btilde");
    const auto s = solve_embedding(flow, bt);
    j["solution"] = to_json(s);
    const double tol = c.num("tolerance", 1e-12);
    if (c.flag("expect_obstruction", false)) {
      o = {"resonances", static_cast<double>(s.resonances.size() + s.small_divisors.size()), tol, !s.solved(), "obstruction expected"};
    } else {
      const double gap = s.solved() ? coefficient_distance(average_operator(flow, *s.b), bt) : INFINITY;
      o = {"round_trip", gap, tol, s.solved() && gap <= tol, s.solved() ? "" : "obstructed"};
    }
  } else if (which == "resolvent") {
    const TorusLinearFlow flow(c.numbers("direction"));
    const auto r = resolvent_solve(flow, config_trig(c, "b"), c.num("lambda"));
    j["resolvent"] = to_json(r);
    const double tol = c.num("tolerance", 1e-10);
    o = {"residual", r.residual, tol, r.residual <= tol, ""};
  } else if (which == "coboundary") {
    const TorusLinearFlow flow(c.numbers("direction"));
    const auto g = config_trig(c, "g");
    const double tol = c.num("tolerance", kCertificateTolerance);
    try {
      const auto r = coboundary_lift(flow, g, torus_grid(flow.dimension(), c.integer("grid", 8)));
      j["certificate"] = to_json(r.certificate);
      j["b"] = frequency_list_json(r.b);
      o = {"certificate_residual", r.worst_residual, tol, r.worst_residual <= tol, ""};
    } catch (const NumericFailure& e) {
      o = {"certificate_residual", INFINITY, tol, false, e.what()};
    }
  } else {
    c.fail("unknown embedding case '" + which + "'");
  }
  out.open("result.json") << j.dump(2) << '\n';
  return o;
}

inline Outcome dispatch(const ExperimentConfig& c, OutputDir& out) {
  if (c.kind() == "pressure") return run_pressure(c, out);
  if (c.kind() == "suspension") return run_suspension(c, out);
  if (c.kind() == "equivalence") return run_equivalence(c, out);
  if (c.kind() == "spectrum") return run_spectrum(c, out);
  return run_embedding(c, out);
}

}  // namespace detail

/// Runs the experiment, writing into `output_dir` (default from the config).
inline RunResult run(const ExperimentConfig& c, std::optional<std::filesystem::path> output_dir = std::nullopt) {
  RunResult r;
  try {
    detail::OutputDir out(output_dir.value_or(c.output_dir()));
    const auto o = detail::dispatch(c, out);
    r.status = o.pass ? 0 : 2;
    r.summary = c.name() + " [" + c.kind() + "] " + o.key + "=" + fmt(o.value) + " tol=" + fmt(o.tolerance) + " " + (o.pass ? "PASS" : "FAIL");
    if (!o.note.empty()) r.summary += " (" + (o.note.front() == ' ' ? o.note.substr(1) : o.note) + ")";
    r.outputs = out.written();
  } catch (const InvalidArgument& e) {
    r.status = 1;
    r.summary = std::string("input error: ") + e.what();
  } catch (const UnsupportedInput& e) {
    r.status = 1;
    r.summary = std::string("unsupported input: ") + e.what();
  } catch (const ResourceLimit& e) {
    r.status = 1;
    r.summary = std::string("resource limit: ") + e.what();
  } catch (const NumericFailure& e) {
    r.status = 2;
    r.summary = std::string("numeric failure: ") + e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    r.status = 1;
    r.summary = std::string("output error: ") + e.what();
  }
  return r;
}

/// Checks that the config is well formed and every input it references loads,
/// without running the experiment. Throws on the first problem.
inline void validate(const ExperimentConfig& c) {
  if (c.kind() == "pressure") {
    const Sft sft = detail::config_sft(c);
    detail::config_function(c, sft, "potential", 0.0);
    if (c.has("scales")) c.numbers("scales");
  } else if (c.kind() == "suspension") {
    const auto flow = detail::config_flow(c);
    detail::config_function(c, flow.base(), "g", 0.0);
    detail::config_function(c, flow.base(), "nu", 0.0);
  } else if (c.kind() == "equivalence") {
    const auto flow = detail::config_flow(c);
    detail::config_family(c, flow);
    if (c.integer("N", 8) < 1) c.fail("N must be >= 1");
  } else if (c.kind() == "spectrum") {
    const auto flow = detail::config_flow(c);
    detail::config_function(c, flow.base(), "a", 0.0);
    detail::config_function(c, flow.base(), "b", 1.0);
    detail::config_function(c, flow.base(), "u", 1.0);
    detail::config_alphas(c);
  } else {
    const std::string which = c.str("case");
    if (which == "solve") detail::config_trig(c, "btilde");
    if (which == "resolvent") {
      detail::config_trig(c, "b");
      if (!(c.num("lambda") > 1.0)) c.fail("lambda must exceed 1");
    }
    if (which == "coboundary") detail::config_trig(c, "g");
    if (which == "sawtooth" || which == "solve" || which == "resolvent" || which == "coboundary") c.numbers("direction");
    if (which != "exp-log" && which != "exp-poly" && which != "sawtooth" && which != "solve" && which != "resolvent" && which != "coboundary")
      c.fail("unknown embedding case '" + which + "'");
  }
}

struct ExperimentTemplate {
  std::string name;
  std::string description;
  std::string anchor;
  std::string schema;
  json config;
};

/// The bundled experiment catalog. Every template is self-contained (inline data).
inline const std::vector<ExperimentTemplate>& list_experiments() {
  static const std::vector<ExperimentTemplate> catalog = [] {
    const double phi = std::numbers::phi;
    const double sqrt2m1 = std::numbers::sqrt2 - 1.0;
    const std::string pressure_schema = "pressure.csv(parameter,pressure,entropy,integral); result.json";
    const std::string suspension_schema = "abramov.csv(parameter,base_entropy,mean_roof,flow_entropy,residual); result.json";
    const std::string equivalence_schema = "report.json; discrete_defect.csv(n,defect,exact); flow_defect.csv(t,defect)";
    const std::string spectrum_schema = "spectrum.csv(alpha,dim_formula2,dim_formula1,q_star,witness_params); result.json";
    const std::string embedding_schema = "result.json";
    std::vector<ExperimentTemplate> t;
    t.push_back({"pressure-full-shift", "zero potential on the full 2-shift; pressure log 2", "topological entropy as pressure",
                 pressure_schema,
                 {{"kind", "pressure"}, {"name", "pressure-full-shift"}, {"sft", "full:2"}, {"potential", 0.0},
                  {"expected", std::log(2.0)}, {"tolerance", 1e-10}}});
    t.push_back({"pressure-golden-mean", "zero potential on the golden-mean shift; pressure log of the golden ratio",
                 "Perron eigenvalue of the transition matrix", pressure_schema,
                 {{"kind", "pressure"}, {"name", "pressure-golden-mean"}, {"sft", "golden-mean"}, {"potential", 0.0},
                  {"expected", std::log(phi)}, {"tolerance", 1e-10}}});
    t.push_back({"pressure-bernoulli-sweep", "normalized Bernoulli(1/3,2/3) potential with an inverse-temperature sweep",
                 "variational principle", pressure_schema,
                 {{"kind", "pressure"}, {"name", "pressure-bernoulli-sweep"}, {"sft", "full:2"},
                  {"potential", {std::log(1.0 / 3.0), std::log(2.0 / 3.0)}}, {"scales", {0.0, 0.5, 1.0, 2.0, 4.0}},
                  {"expected", 0.0}, {"tolerance", 1e-10}}});
    t.push_back({"suspension-two-roofs", "roof (1,2) over the full 2-shift; flow entropy solves e^-s + e^-2s = 1",
                 "flow pressure as a root of the base pressure equation", suspension_schema,
                 {{"kind", "suspension"}, {"name", "suspension-two-roofs"}, {"sft", "full:2"}, {"roof", {1.0, 2.0}}, {"g", 0.0},
                  {"expected", std::log(phi)}, {"tolerance", 1e-9}}});
    t.push_back({"suspension-abramov", "Abramov's formula for Gibbs measures of a golden-mean suspension", "Abramov entropy formula",
                 suspension_schema,
                 {{"kind", "suspension"}, {"name", "suspension-abramov"}, {"sft", "golden-mean"}, {"roof", {0.5, 1.5}}, {"g", {0.3, -0.2}},
                  {"nu", {0.0, 1.0}}, {"nu_scales", {-2.0, -1.0, 0.0, 1.0, 2.0, 3.0}}}});
    t.push_back({"equivalence-lifted", "family generated by a lifted function is recovered exactly", "pipeline closure",
                 equivalence_schema,
                 {{"kind", "equivalence"}, {"name", "equivalence-lifted"}, {"sft", "full:2"}, {"roof", {1.0, 2.0}}, {"family", "lifted"},
                  {"xi", {0.7, -0.4}}, {"N", 1}, {"T_factor", 64.0}, {"check", "max_flow_defect"}, {"tolerance", 1e-8}}});
    t.push_back({"equivalence-linear", "a_t = 0.3 t on a golden-mean suspension; defect decays with the horizon", "additive family with constant rate",
                 equivalence_schema,
                 {{"kind", "equivalence"}, {"name", "equivalence-linear"}, {"sft", "golden-mean"}, {"roof", {1.0, 1.5}},
                  {"family", "linear"}, {"rate", 0.3}, {"N", 8}, {"T_factor", 64.0}, {"check", "decay_ratio"}, {"tolerance", 0.25}}});
    t.push_back({"equivalence-cocycle", "log-norm family of a positive matrix cocycle over a suspension",
                 "asymptotically additive families from matrix cocycles", equivalence_schema,
                 {{"kind", "equivalence"}, {"name", "equivalence-cocycle"}, {"sft", "full:2"}, {"roof", {1.0, 2.0}}, {"family", "cocycle"},
                  {"cocycle", {{{2.0, 1.0}, {1.0, 1.0}}, {{1.0, 1.0}, {1.0, 2.0}}}}, {"N", 8}, {"T_factor", 64.0},
                  {"check", "decay_ratio"}, {"tolerance", 0.25}}});
    t.push_back({"spectrum-bernoulli", "Birkhoff spectrum of the indicator of symbol 1; closed form binary entropy",
                 "multifractal duality", spectrum_schema,
                 {{"kind", "spectrum"}, {"name", "spectrum-bernoulli"}, {"sft", "full:2"}, {"roof", 1.0}, {"a", {0.0, 1.0}},
                  {"alphas", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}}, {"check", "binary_entropy"}, {"tolerance", 1e-4},
                  {"expect_empty", {1.5}}}});
    t.push_back({"spectrum-roof-duality", "ratio spectrum over a suspension with roof (1,2); both formulas compared",
                 "conditional variational principle", spectrum_schema,
                 {{"kind", "spectrum"}, {"name", "spectrum-roof-duality"}, {"sft", "full:2"}, {"roof", {1.0, 2.0}}, {"a", {0.0, 1.0}},
                  {"u", {1.0, 0.75}}, {"alpha_min", 0.05}, {"alpha_max", 0.45}, {"alpha_steps", 9}, {"check", "duality"},
                  {"tolerance", 1e-3}}});
    t.push_back({"embedding-exp-log", "time-one average of log x under x -> e^t x", "exponential flow, logarithm", embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-exp-log"}, {"case", "exp-log"}, {"tolerance", 1e-12}}});
    t.push_back({"embedding-exp-poly", "time-one average of a homogeneous cubic under x -> e^t x", "exponential flow, homogeneous polynomial",
                 embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-exp-poly"}, {"case", "exp-poly"}, {"degree", 3}, {"coefficient", 2.0},
                  {"points", {-2.0, -0.5, 0.5, 1.0, 3.0}}, {"tolerance", 1e-7}}});
    t.push_back({"embedding-sawtooth", "sawtooth (x+y) mod 1 on a torus flow: orbit-derivative obstruction", "embedding counterexample",
                 embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-sawtooth"}, {"case", "sawtooth"}, {"direction", {sqrt2m1, (std::sqrt(5.0) - 2.0)}},
                  {"grid", 40}, {"tolerance", 1e-6}}});
    t.push_back({"embedding-solve", "solve the embedding equation for a trigonometric polynomial", "Fourier multiplier division",
                 embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-solve"}, {"case", "solve"}, {"direction", {sqrt2m1}},
                  {"btilde", {{0, 1.0, 0.0}, {1, 0.5, -0.25}, {-1, 0.5, 0.25}, {3, 0.0, 0.1}, {-3, 0.0, -0.1}}}, {"tolerance", 1e-12}}});
    t.push_back({"embedding-resonance", "rational direction with an active resonant mode reports an obstruction",
                 "resonant frequencies", embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-resonance"}, {"case", "solve"}, {"direction", {0.5}},
                  {"btilde", {{2, 0.5, 0.0}, {-2, 0.5, 0.0}}}, {"expect_obstruction", true}}});
    t.push_back({"embedding-resolvent", "resolvent (L - 2I) a = cos(2 pi x) on an irrational rotation", "resolvent construction",
                 embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-resolvent"}, {"case", "resolvent"}, {"direction", {sqrt2m1}}, {"lambda", 2.0},
                  {"b", {{1, 0.5, 0.0}, {-1, 0.5, 0.0}}}, {"tolerance", 1e-10}}});
    t.push_back({"embedding-coboundary", "coboundary lift of sin(2 pi (x + 2y)) with its integral certificate",
                 "coboundary lift", embedding_schema,
                 {{"kind", "embedding"}, {"name", "embedding-coboundary"}, {"case", "coboundary"}, {"direction", {sqrt2m1, 0.1}},
                  {"g", {{1, 2, 0.0, -0.5}, {-1, -2, 0.0, 0.5}}}, {"grid", 6}, {"tolerance", 1e-7}}});
    return t;
  }();
  return catalog;
}

inline std::optional<ExperimentTemplate> find_template(const std::string& name) {
  for (const auto& t : list_experiments())
    if (t.name == name) return t;
  return std::nullopt;
}

}  // namespace sflow

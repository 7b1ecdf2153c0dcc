#pragma once

// From an asymptotically additive flow family a = (a_t) to a continuous
// generator b whose flow integrals track a_t, with the defect measured at
// every stage: induced discrete sequence c_n = a_{tau_n}, additive candidate
// xi = c_N / N, lift b of xi, and the normalized flow defect.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sflow/error.hpp"
#include "sflow/potential.hpp"
#include "sflow/suspension.hpp"
#include "sflow/symbolic.hpp"

namespace sflow {

/// A family (a_t)_{t >= 0} of functions on the flow space, evaluated lazily.
class FlowFamily {
 public:
  using Evaluator = std::function<double(const FlowPoint&, double)>;

  FlowFamily(Additivity kind, Evaluator eval, std::string label, std::optional<FlowFunction> generator = std::nullopt, int depth = 1)
      : kind_(kind), eval_(std::move(eval)), label_(std::move(label)), generator_(std::move(generator)), depth_(depth) {
    if (depth < 1) throw InvalidArgument("FlowFamily: depth must be >= 1");
  }

  /// a_t = int_0^t b o phi_s ds.
  static FlowFamily additive(const SuspensionFlow& flow, const FlowFunction& b, std::string label = "additive") {
    return FlowFamily(
        Additivity::Additive, [flow, b](const FlowPoint& p, double t) { return flow_integral(flow, b, p, t); }, std::move(label), b, b.depth());
  }

  /// a_t = rate * t.
  static FlowFamily linear(double rate) {
    return FlowFamily(
        Additivity::Additive, [rate](const FlowPoint&, double t) { return rate * t; }, "linear", FlowFunction::constant(rate));
  }

  /// Log-norm cocycle driven by roof crossings: with c_n(x) = log||M_{x_{n-1}}...M_{x_0}||,
  /// A(x, t) interpolates c_n linearly in height across the n-th flight and
  /// a_t(x, s) = A(x, s + t) - A(x, s).
  static FlowFamily cocycle(const SuspensionFlow& flow, const MatrixCocycle& m) {
    if (m.symbols() != flow.base().k()) throw InvalidArgument("FlowFamily::cocycle: need one matrix per symbol");
    auto accumulated = [flow, m](const BasePoint& x, double t) {
      Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(m.dimension(), m.dimension());
      double log_scale = 0.0;
      auto log_norm = [&](const Eigen::MatrixXd& p) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
        return log_scale + std::log(svd.singularValues()(0));
      };
      BasePoint y = x;
      double elapsed = 0.0;
      while (elapsed < t) {
        const double tau = flow.roof_at(y);
        const bool partial = elapsed + tau > t;
        const double before = partial ? log_norm(prod) : 0.0;
        prod = m.matrix(y.at(0)) * prod;
        const double scale = prod.cwiseAbs().maxCoeff();
        prod /= scale;
        log_scale += std::log(scale);
        if (partial) return before + (t - elapsed) / tau * (log_norm(prod) - before);
        elapsed += tau;
        y = y.shifted(1);
      }
      return log_norm(prod);
    };
    return FlowFamily(
        Additivity::AlmostAdditive,
        [accumulated](const FlowPoint& p, double t) {
          if (p.height == 0.0) return accumulated(p.base, t);
          return accumulated(p.base, p.height + t) - accumulated(p.base, p.height);
        },
        "cocycle");
  }

  Additivity kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  const std::optional<FlowFunction>& generator() const noexcept { return generator_; }
  /// Base symbols read per flight, beyond those the roof reads.
  int depth() const noexcept { return depth_; }

  double operator()(const FlowPoint& p, double t) const {
    if (t < 0.0) throw InvalidArgument("FlowFamily: negative time");
    return eval_(p, t);
  }

 private:
  Additivity kind_;
  Evaluator eval_;
  std::string label_;
  std::optional<FlowFunction> generator_;
  int depth_;
};

/// c_n(x) = a_{tau_n(x)}(x) on base points at height 0. Words need
/// n + max(depth(roof), depth(a)) - 1 symbols.
inline PotentialFamily induced_sequence(const SuspensionFlow& flow, const FlowFamily& a) {
  const int lookahead = std::max(flow.roof().depth(), a.depth()) - 1;
  auto eval = [flow, a](std::span<const int> w, int n) {
    const double tau_n = flow.roof_sum(w, n);
    return a(FlowPoint{BasePoint(Word(w.begin(), w.end())), 0.0}, tau_n);
  };
  return PotentialFamily::custom(flow.base(), a.kind(), eval, lookahead,
                                 a.generator() ? std::optional(roof_integral(flow, *a.generator())) : std::nullopt);
}

/// Flow points over periodic base points of period <= max_period, each at
/// `heights` equally spaced heights in [0, tau).
inline std::vector<FlowPoint> flow_samples(const SuspensionFlow& flow, int max_period, int heights = 8) {
  if (heights < 1) throw InvalidArgument("flow_samples: need at least one height");
  std::vector<FlowPoint> out;
  std::vector<bool> covered(static_cast<std::size_t>(flow.base().k()), false);
  for (const auto& p : periodic_samples(flow.base(), max_period)) {
    const BasePoint x(p);
    const double tau = flow.roof_at(x);
    covered[static_cast<std::size_t>(p.at(0))] = true;
    for (int j = 0; j < heights; ++j) out.push_back(FlowPoint{x, tau * j / heights});
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end())
    throw InvalidArgument("flow_samples: periodic points do not cover every 1-cylinder; raise max_period");
  return out;
}

struct CurvePoint {
  double time;
  double value;
};

/// For each t: (1/t) max over samples of |a_t(p) - int_0^t b(phi_s p) ds|.
inline std::vector<CurvePoint> flow_defect(const SuspensionFlow& flow, const FlowFamily& a, const FlowFunction& b,
                                           std::span<const double> times, std::span<const FlowPoint> samples) {
  if (samples.empty()) throw InvalidArgument("flow_defect: empty sample set");
  std::vector<CurvePoint> out;
  double previous = 0.0;
  for (double t : times) {
    if (!(t > previous)) throw InvalidArgument("flow_defect: times must be positive and increasing");
    previous = t;
    double sup = 0.0;
    for (const auto& p : samples) sup = std::max(sup, std::abs(a(p, t) - flow_integral(flow, b, p, t)));
    out.push_back({t, sup / t});
  }
  return out;
}

/// (1/t) max over base samples of |a_t(x) - a_{tau_n(x)}(x)| with n the number
/// of roof crossings completed by time t.
inline std::vector<CurvePoint> crossing_defect(const SuspensionFlow& flow, const FlowFamily& a, std::span<const double> times,
                                               std::span<const FlowPoint> samples) {
  std::vector<CurvePoint> out;
  for (double t : times) {
    double sup = 0.0;
    for (const auto& p : samples) {
      if (p.height != 0.0) continue;
      BasePoint x = p.base;
      double elapsed = 0.0;
      while (true) {
        const double tau = flow.roof_at(x);
        if (elapsed + tau > t) break;
        elapsed += tau;
        x = x.shifted(1);
      }
      sup = std::max(sup, std::abs(a(p, t) - a(p, elapsed)));
    }
    out.push_back({t, sup / t});
  }
  return out;
}

struct DiscreteDefectPoint {
  int n;
  double value;
  bool exact;  // exhaustive over all cylinders, otherwise over periodic samples
};

struct EquivalenceReport {
  int n_used = 0;
  double horizon = 0.0;
  std::vector<DiscreteDefectPoint> discrete_defect;
  std::vector<CurvePoint> flow_defect;
  LocallyConstantFunction xi;
  FlowFunction b = FlowFunction::constant(0.0);
  std::string family_label;
};

struct PipelineOptions {
  int sample_period = 8;
  int heights = 8;
  double exact_word_budget = 1e6;
};

/// Geometric time grid 4 sup tau, 8 sup tau, ... up to the horizon (inclusive).
inline std::vector<double> default_times(const SuspensionFlow& flow, double horizon) {
  std::vector<double> times;
  for (double t = 4.0 * flow.roof().sup(); t < horizon; t *= 2.0) times.push_back(t);
  times.push_back(horizon);
  return times;
}

inline EquivalenceReport equivalence_pipeline(const SuspensionFlow& flow, const FlowFamily& a, int n, double horizon,
                                              const PipelineOptions& opt = {}) {
  if (n < 1) throw InvalidArgument("equivalence_pipeline: N must be >= 1");
  if (!(horizon > flow.roof().sup())) throw InvalidArgument("equivalence_pipeline: horizon must exceed sup tau");
  EquivalenceReport r;
  r.n_used = n;
  r.horizon = horizon;
  r.family_label = a.label();

  const PotentialFamily c = induced_sequence(flow, a);
  r.xi = cuneo_candidate(c, n);
  r.b = lift(flow, r.xi);

  const auto base_samples = periodic_samples(flow.base(), opt.sample_period);
  const int n_max = std::max(1, static_cast<int>(std::floor(horizon / flow.roof().inf())));
  std::vector<int> ns;
  for (int m = std::max(1, r.xi.depth()); m < n_max; m *= 2) ns.push_back(m);
  if (ns.empty() || ns.back() != n_max) ns.push_back(std::max(n_max, r.xi.depth()));
  for (int m : ns) {
    const int len = std::max(m + r.xi.depth() - 1, m + c.lookahead());
    if (count_words(flow.base(), len) <= opt.exact_word_budget)
      r.discrete_defect.push_back({m, equivalence_defect(c, r.xi, m), true});
    else
      r.discrete_defect.push_back({m, equivalence_defect_on(c, r.xi, m, base_samples), false});
  }

  const auto samples = flow_samples(flow, opt.sample_period, opt.heights);
  const auto times = default_times(flow, horizon);
  r.flow_defect = flow_defect(flow, a, r.b, times, samples);
  return r;
}

}  // namespace sflow

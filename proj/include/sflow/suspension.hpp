#pragma once

// Suspension flows over an SFT under a locally constant roof: the flow map,
// roof integrals I_g, induced measures, Abramov's formula, flow pressure as
// the root of a base pressure equation, and the bump-profile lift.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sflow/error.hpp"
#include "sflow/potential.hpp"
#include "sflow/symbolic.hpp"
#include "sflow/transfer.hpp"

namespace sflow {

namespace detail {

/// Composite Simpson rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  if (b > a && !(h > 0.0)) throw NumericFailure("simpson: panel width underflow");
  if (!std::isfinite(h)) throw NumericFailure("simpson: non-finite panel width");
  if (b == a) return 0.0;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Panel count on an interval of the given length. 256 per unit keeps Simpson
/// near 1e-10 for integrands with a few oscillations per unit.
inline int panels_for(double length, int per_unit = 256) {
  const double p = std::ceil(std::max(length, 1e-300) * per_unit);
  const int n = static_cast<int>(std::min(p, 1e7));
  return std::max(n + (n % 2), per_unit);
}

}  // namespace detail

/// A forward symbol sequence: either a periodic point or a finite word.
/// Shifting moves the origin; finite words throw when read past their end.
class BasePoint {
 public:
  explicit BasePoint(const PeriodicPoint& p) : data_(std::make_shared<const Word>(p.cycle())), periodic_(true) {}
  explicit BasePoint(Word w) : data_(std::make_shared<const Word>(std::move(w))), periodic_(false) {
    if (data_->empty()) throw InvalidArgument("BasePoint: empty word");
  }

  bool periodic() const noexcept { return periodic_; }

  int at(long long i) const {
    const auto n = static_cast<long long>(data_->size());
    const long long j = offset_ + i;
    if (periodic_) return (*data_)[static_cast<std::size_t>(((j % n) + n) % n)];
    if (j < 0 || j >= n) throw InvalidArgument("BasePoint: finite base word read out of range");
    return (*data_)[static_cast<std::size_t>(j)];
  }

  /// Symbols available from the origin (unbounded for periodic points).
  long long available() const noexcept {
    return periodic_ ? std::numeric_limits<long long>::max() : static_cast<long long>(data_->size()) - offset_;
  }

  Word window(int len) const {
    Word w(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) w[static_cast<std::size_t>(i)] = at(i);
    return w;
  }

  BasePoint shifted(long long by = 1) const {
    BasePoint b = *this;
    b.offset_ += by;
    if (periodic_) b.offset_ %= static_cast<long long>(data_->size());
    return b;
  }

 private:
  std::shared_ptr<const Word> data_;
  bool periodic_;
  long long offset_ = 0;
};

/// Strictly positive locally constant roof.
class RoofFunction {
 public:
  explicit RoofFunction(LocallyConstantFunction tau) : tau_(std::move(tau)) {
    inf_ = tau_.min();
    sup_ = tau_.max();
    if (!(inf_ > 0.0)) throw InvalidArgument("RoofFunction: roof must be strictly positive");
  }

  const LocallyConstantFunction& function() const noexcept { return tau_; }
  int depth() const noexcept { return tau_.depth(); }
  double inf() const noexcept { return inf_; }
  double sup() const noexcept { return sup_; }
  double operator()(std::span<const int> w) const { return tau_(w); }

 private:
  LocallyConstantFunction tau_;
  double inf_ = 0.0, sup_ = 0.0;
};

class SuspensionFlow {
 public:
  SuspensionFlow(Sft base, RoofFunction roof) : base_(std::move(base)), roof_(std::move(roof)) {
    if (!(roof_.function().sft() == base_)) throw InvalidArgument("SuspensionFlow: roof defined over a different shift");
  }

  static SuspensionFlow constant_roof(const Sft& base, double c) {
    return SuspensionFlow(base, RoofFunction(LocallyConstantFunction::constant(base, c)));
  }

  const Sft& base() const noexcept { return base_; }
  const RoofFunction& roof() const noexcept { return roof_; }
  double roof_at(const BasePoint& x) const { return roof_(x.window(roof_.depth())); }

  /// tau_n(w) accumulated left to right; w needs n + depth(roof) - 1 symbols.
  double roof_sum(std::span<const int> w, int n) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += roof_(w.subspan(static_cast<std::size_t>(j)));
    return s;
  }

 private:
  Sft base_;
  RoofFunction roof_;
};

struct FlowPoint {
  BasePoint base;
  double height = 0.0;
};

/// psi on [0,1], nondecreasing C^1, psi(0)=0, psi(1)=1, psi'(0)=psi'(1)=0.
struct BumpProfile {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  static BumpProfile smoothstep() {
    return {"smoothstep", [](double u) { return u * u * (3.0 - 2.0 * u); }, [](double u) { return 6.0 * u * (1.0 - u); }};
  }

  static BumpProfile smootherstep() {
    return {"smootherstep", [](double u) { return u * u * u * (u * (6.0 * u - 15.0) + 10.0); },
            [](double u) { return 30.0 * u * u * (u - 1.0) * (u - 1.0); }};
  }

  static BumpProfile by_name(const std::string& name) {
    if (name == "smoothstep") return smoothstep();
    if (name == "smootherstep") return smootherstep();
    throw InvalidArgument("unknown bump profile '" + name + "'");
  }
};

/// A function on the flow space. Lifted functions are xi(x)/tau(x) psi'(s/tau(x));
/// sampled functions are arbitrary g(word, height) depending on the first
/// `depth` symbols of the base.
class FlowFunction {
 public:
  struct Lifted {
    LocallyConstantFunction xi;
    BumpProfile psi;
  };
  struct Sampled {
    int depth;
    std::function<double(std::span<const int>, double)> g;
    std::string label;
  };

  static FlowFunction lifted(LocallyConstantFunction xi, BumpProfile psi) { return FlowFunction(Lifted{std::move(xi), std::move(psi)}); }

  static FlowFunction sampled(int depth, std::function<double(std::span<const int>, double)> g, std::string label = "sampled") {
    if (depth < 1) throw InvalidArgument("FlowFunction: depth must be >= 1");
    return FlowFunction(Sampled{depth, std::move(g), std::move(label)});
  }

  static FlowFunction constant(double c) {
    return sampled(1, [c](std::span<const int>, double) { return c; }, "constant");
  }

  /// Height-independent function given by a locally constant table.
  static FlowFunction from_base(const LocallyConstantFunction& f) {
    return sampled(f.depth(), [f](std::span<const int> w, double) { return f(w); }, "base");
  }

  bool is_lifted() const noexcept { return std::holds_alternative<Lifted>(rep_); }
  const Lifted& as_lifted() const { return std::get<Lifted>(rep_); }
  const Sampled& as_sampled() const { return std::get<Sampled>(rep_); }

  /// Number of base symbols the function reads, not counting the roof.
  int depth() const { return is_lifted() ? as_lifted().xi.depth() : as_sampled().depth; }

  /// Value at height s over the base word w (w must cover depth and roof depth).
  double operator()(const SuspensionFlow& flow, std::span<const int> w, double s) const {
    if (const auto* l = std::get_if<Lifted>(&rep_)) {
      const double tau = flow.roof()(w);
      return l->xi(w) / tau * l->psi.derivative(s / tau);
    }
    return std::get<Sampled>(rep_).g(w, s);
  }

  double operator()(const SuspensionFlow& flow, const FlowPoint& p) const {
    const Word w = p.base.window(std::max(depth(), flow.roof().depth()));
    return (*this)(flow, w, p.height);
  }

 private:
  explicit FlowFunction(std::variant<Lifted, Sampled> rep) : rep_(std::move(rep)) {}
  std::variant<Lifted, Sampled> rep_;
};

/// phi_t(p) for t >= 0, crossing roofs as often as needed.
inline FlowPoint flow_map(const SuspensionFlow& flow, const FlowPoint& p, double t) {
  if (t < 0.0) throw InvalidArgument("flow_map: backward flow is not supported");
  if (!std::isfinite(t)) throw InvalidArgument("flow_map: non-finite time");
  const double target = p.height + t;
  BasePoint x = p.base;
  double elapsed = 0.0;
  while (elapsed < target) {
    const double tau = flow.roof_at(x);
    if (elapsed + tau > target) break;
    elapsed += tau;
    x = x.shifted(1);
  }
  return FlowPoint{std::move(x), target - elapsed};
}

/// I_g(w) = int_0^{tau(w)} g(w, s) ds. Exact for lifted functions, Simpson otherwise.
inline double I_g(const SuspensionFlow& flow, const FlowFunction& g, std::span<const int> w) {
  if (g.is_lifted()) return g.as_lifted().xi(w);
  const double tau = flow.roof()(w);
  const auto& s = g.as_sampled();
  return detail::simpson([&](double h) { return s.g(w, h); }, 0.0, tau, detail::panels_for(tau));
}

/// I_g as a locally constant function on the base.
inline LocallyConstantFunction roof_integral(const SuspensionFlow& flow, const FlowFunction& g) {
  if (g.is_lifted()) return g.as_lifted().xi;
  const int depth = std::max(g.depth(), flow.roof().depth());
  return LocallyConstantFunction::from(flow.base(), depth, [&](std::span<const int> w) { return I_g(flow, g, w); });
}

/// int_0^t g(phi_s p) ds, integrating whole roof flights through I_g and the
/// partial ones exactly (lifted) or by Simpson.
inline double flow_integral(const SuspensionFlow& flow, const FlowFunction& g, const FlowPoint& p, double t) {
  if (t < 0.0) throw InvalidArgument("flow_integral: negative time");
  const int window = std::max(g.depth(), flow.roof().depth());
  const double target = p.height + t;
  BasePoint x = p.base;
  double elapsed = 0.0, total = 0.0, start = p.height;
  auto partial = [&](const Word& w, double tau, double a, double b) {
    if (b <= a) return 0.0;
    if (g.is_lifted()) {
      const auto& l = g.as_lifted();
      return l.xi(w) * (l.psi.value(b / tau) - l.psi.value(a / tau));
    }
    const auto& s = g.as_sampled();
    return detail::simpson([&](double h) { return s.g(w, h); }, a, b, detail::panels_for(b - a));
  };
  while (true) {
    const Word w = x.window(window);
    const double tau = flow.roof()(w);
    if (elapsed + tau > target) {
      total += partial(w, tau, start, target - elapsed);
      break;
    }
    total += start == 0.0 ? I_g(flow, g, w) : partial(w, tau, start, tau);
    elapsed += tau;
    start = 0.0;
    x = x.shifted(1);
    if (elapsed >= target) break;
  }
  return total;
}

/// The lift b(x, s) = xi(x)/tau(x) psi'(s/tau(x)); I_b = xi.
inline FlowFunction lift(const SuspensionFlow& flow, const LocallyConstantFunction& xi, const BumpProfile& psi = BumpProfile::smoothstep()) {
  if (!(xi.sft() == flow.base())) throw InvalidArgument("lift: xi defined over a different shift");
  return FlowFunction::lifted(xi, psi);
}

/// The flow-invariant measure induced by a base measure nu:
/// int g dmu = int I_g dnu / int tau dnu.
class FlowMeasure {
 public:
  FlowMeasure(SuspensionFlow flow, GibbsMarkovMeasure nu)
      : flow_(std::move(flow)), nu_(std::move(nu)), mean_roof_(sflow::integrate(nu_, flow_.roof().function())) {}

  const GibbsMarkovMeasure& base_measure() const noexcept { return nu_; }
  double mean_roof() const noexcept { return mean_roof_; }

  double integrate(const FlowFunction& g) const { return sflow::integrate(nu_, roof_integral(flow_, g)) / mean_roof_; }

  /// Entropy of the flow measure (Abramov).
  double entropy() const { return nu_.entropy() / mean_roof_; }

 private:
  SuspensionFlow flow_;
  GibbsMarkovMeasure nu_;
  double mean_roof_;
};

inline FlowMeasure induce_measure(const SuspensionFlow& flow, const GibbsMarkovMeasure& nu) {
  if (!(nu.sft() == flow.base())) throw InvalidArgument("induce_measure: measure over a different shift");
  return FlowMeasure(flow, nu);
}

/// h_nu(T) / int tau dnu.
inline double abramov_entropy(const SuspensionFlow& flow, const GibbsMarkovMeasure& nu) {
  return entropy(nu) / integrate(nu, flow.roof().function());
}

inline constexpr double kFlowPressureTolerance = 1e-12;
inline constexpr int kBracketExpansions = 60;

/// The unique s with P(I - s tau) = 0 for a locally constant base potential I.
inline double pressure_root(const Sft& base, const LocallyConstantFunction& integrand, const LocallyConstantFunction& weight,
                            double tolerance = kFlowPressureTolerance) {
  const int depth = std::max(integrand.depth(), weight.depth());
  const auto f = integrand.refined(depth);
  const auto w = weight.refined(depth);
  if (!(w.min() > 0.0)) throw InvalidArgument("pressure_root: weight must be strictly positive");
  auto p = [&](double s) { return pressure(base, f - s * w); };
  // P(f - s w) lies between P(f) - s max w and P(f) - s min w
  const double p0 = p(0.0);
  double lo = std::min(p0 / w.max(), p0 / w.min()) - 1.0;
  double hi = std::max(p0 / w.max(), p0 / w.min()) + 1.0;
  int expansions = 0;
  while (p(lo) < 0.0 || p(hi) > 0.0) {
    if (++expansions > kBracketExpansions) throw NumericFailure("pressure_root: bracket expansion failed");
    const double width = hi - lo;
    lo -= width;
    hi += width;
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (p(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// P_flow(g): the root s of P_base(I_g - s tau) = 0.
inline double flow_pressure(const SuspensionFlow& flow, const FlowFunction& g) {
  return pressure_root(flow.base(), roof_integral(flow, g), flow.roof().function());
}

}  // namespace sflow

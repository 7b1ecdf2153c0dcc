#pragma once

// The time-one averaging operator L f = int_0^1 f o phi_s ds on model flows,
// the embedding equation L b = btilde, the orbit-derivative obstruction test,
// coboundary lifts and the resolvent (L - lambda I) a = b.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sflow/error.hpp"
#include "sflow/suspension.hpp"

namespace sflow {

using Point = std::vector<double>;
using Frequency = std::vector<int>;
using cplx = std::complex<double>;

/// phi_t(x) = x + t alpha (mod 1) on the n-torus.
class TorusLinearFlow {
 public:
  explicit TorusLinearFlow(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.empty()) throw InvalidArgument("TorusLinearFlow: empty direction");
  }

  int dimension() const noexcept { return static_cast<int>(alpha_.size()); }
  const std::vector<double>& direction() const noexcept { return alpha_; }

  Point apply(const Point& x, double t) const {
    if (x.size() != alpha_.size()) throw InvalidArgument("TorusLinearFlow: point of wrong dimension");
    Point y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i] + t * alpha_[i];
      y[i] = v - std::floor(v);
    }
    return y;
  }

  /// n . alpha
  double rotation(const Frequency& n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) s += n[i] * alpha_[i];
    return s;
  }

 private:
  std::vector<double> alpha_;
};

/// phi_t(x) = e^t x on (0, infinity) or on the real line.
class ScalarExpFlow {
 public:
  explicit ScalarExpFlow(bool whole_line = false) : whole_line_(whole_line) {}

  bool whole_line() const noexcept { return whole_line_; }

  double apply(double x, double t) const {
    if (!whole_line_ && !(x > 0.0)) throw InvalidArgument("ScalarExpFlow: point outside the positive half-line");
    return std::exp(t) * x;
  }

 private:
  bool whole_line_;
};

/// f(x) = scale log x + offset on the positive half-line.
struct LogFunction {
  double scale = 1.0;
  double offset = 0.0;
  double operator()(double x) const { return scale * std::log(x) + offset; }
};

/// p(x) = coefficient x^degree.
struct HomogeneousPolynomial {
  double coefficient = 1.0;
  int degree = 1;
  double operator()(double x) const { return coefficient * std::pow(x, degree); }
};

/// Real trigonometric polynomial sum_n c_n e^{2 pi i n.x} with c_{-n} = conj(c_n).
class TrigPolynomial {
 public:
  explicit TrigPolynomial(int dimension) : dim_(dimension) {
    if (dimension < 1) throw InvalidArgument("TrigPolynomial: dimension must be positive");
  }

  TrigPolynomial(int dimension, std::map<Frequency, cplx> coefficients) : TrigPolynomial(dimension) {
    for (auto& [n, c] : coefficients) add(n, c);
    if (!is_real(1e-12)) throw InvalidArgument("TrigPolynomial: coefficients lack conjugate symmetry");
  }

  static TrigPolynomial constant(int dimension, double c) {
    TrigPolynomial p(dimension);
    p.add(Frequency(static_cast<std::size_t>(dimension), 0), c);
    return p;
  }

  /// amplitude cos(2 pi n.x)
  static TrigPolynomial cosine(const Frequency& n, double amplitude = 1.0) {
    TrigPolynomial p(static_cast<int>(n.size()));
    p.add_real_mode(n, cplx(amplitude / 2.0, 0.0));
    return p;
  }

  /// amplitude sin(2 pi n.x)
  static TrigPolynomial sine(const Frequency& n, double amplitude = 1.0) {
    TrigPolynomial p(static_cast<int>(n.size()));
    p.add_real_mode(n, cplx(0.0, -amplitude / 2.0));
    return p;
  }

  int dimension() const noexcept { return dim_; }
  const std::map<Frequency, cplx>& coefficients() const noexcept { return c_; }

  cplx coefficient(const Frequency& n) const {
    const auto it = c_.find(n);
    return it == c_.end() ? cplx(0.0) : it->second;
  }

  void add(const Frequency& n, cplx c) {
    if (static_cast<int>(n.size()) != dim_) throw InvalidArgument("TrigPolynomial: frequency of wrong dimension");
    c_[n] += c;
  }

  /// Adds c at n and conj(c) at -n (once for n = 0).
  void add_real_mode(const Frequency& n, cplx c) {
    Frequency neg(n.size());
    std::transform(n.begin(), n.end(), neg.begin(), [](int v) { return -v; });
    if (neg == n) {
      add(n, cplx(c.real(), 0.0));
      return;
    }
    add(n, c);
    add(neg, std::conj(c));
  }

  bool is_real(double tol) const {
    for (const auto& [n, c] : c_) {
      Frequency neg(n.size());
      std::transform(n.begin(), n.end(), neg.begin(), [](int v) { return -v; });
      if (std::abs(coefficient(neg) - std::conj(c)) > tol * std::max(1.0, std::abs(c))) return false;
    }
    return true;
  }

  double operator()(const Point& x) const {
    if (static_cast<int>(x.size()) != dim_) throw InvalidArgument("TrigPolynomial: point of wrong dimension");
    double s = 0.0;
    for (const auto& [n, c] : c_) {
      double phase = 0.0;
      for (int i = 0; i < dim_; ++i) phase += n[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      s += (c * std::exp(cplx(0.0, 2.0 * std::numbers::pi * phase))).real();
    }
    return s;
  }

  template <class F>
  TrigPolynomial transform(F&& f) const {
    TrigPolynomial p(dim_);
    for (const auto& [n, c] : c_) p.c_[n] = f(n, c);
    return p;
  }

  /// Largest coefficientwise difference.
  friend double coefficient_distance(const TrigPolynomial& x, const TrigPolynomial& y) {
    double d = 0.0;
    for (const auto& [n, c] : x.c_) d = std::max(d, std::abs(c - y.coefficient(n)));
    for (const auto& [n, c] : y.c_) d = std::max(d, std::abs(c - x.coefficient(n)));
    return d;
  }

 private:
  int dim_;
  std::map<Frequency, cplx> c_;
};

/// m(theta) = (e^{i theta} - 1) / (i theta), m(0) = 1.
inline cplx averaging_multiplier(double theta) {
  if (theta == 0.0) return 1.0;
  if (std::abs(theta) < 1e-5) return cplx(1.0 - theta * theta / 6.0, theta / 2.0 - theta * theta * theta / 24.0);
  return (std::exp(cplx(0.0, theta)) - 1.0) / cplx(0.0, theta);
}

inline cplx averaging_multiplier(const TorusLinearFlow& flow, const Frequency& n) {
  return averaging_multiplier(2.0 * std::numbers::pi * flow.rotation(n));
}

/// L f for a trigonometric polynomial: coefficientwise multiplication by m_n.
inline TrigPolynomial average_operator(const TorusLinearFlow& flow, const TrigPolynomial& f) {
  if (f.dimension() != flow.dimension()) throw InvalidArgument("average_operator: dimension mismatch");
  return f.transform([&](const Frequency& n, cplx c) { return c * averaging_multiplier(flow, n); });
}

/// L(scale log x + offset) = scale log x + offset + scale / 2.
inline LogFunction average_operator(const ScalarExpFlow&, const LogFunction& f) { return {f.scale, f.offset + f.scale / 2.0}; }

/// L p = p (e^d - 1) / d for p homogeneous of degree d.
inline HomogeneousPolynomial average_operator(const ScalarExpFlow&, const HomogeneousPolynomial& p) {
  if (p.degree == 0) return p;
  const double d = p.degree;
  return {p.coefficient * std::expm1(d) / d, p.degree};
}

/// L f by composite Simpson quadrature along the orbit (`panels` per unit time).
template <class Flow, class F>
auto average_operator(const Flow& flow, F f, int panels = 64) {
  return [flow, f, panels](const auto& x) {
    return detail::simpson([&](double s) { return f(flow.apply(x, s)); }, 0.0, 1.0, panels);
  };
}

struct Resonance {
  Frequency n;
  double rotation;  // n . alpha, within 1e-9 of a nonzero integer
  cplx coefficient;
};

struct SmallDivisor {
  Frequency n;
  double modulus;  // |m_n|
};

struct EmbeddingSolution {
  std::optional<TrigPolynomial> b;
  std::vector<Resonance> resonances;
  std::vector<SmallDivisor> small_divisors;
  bool solved() const noexcept { return b.has_value(); }
};

inline constexpr double kResonanceTolerance = 1e-9;
inline constexpr double kSmallDivisor = 1e-12;

/// Solves L b = btilde coefficientwise, or reports the obstructing frequencies.
inline EmbeddingSolution solve_embedding(const TorusLinearFlow& flow, const TrigPolynomial& btilde) {
  if (btilde.dimension() != flow.dimension()) throw InvalidArgument("solve_embedding: dimension mismatch");
  if (!btilde.is_real(1e-12)) throw InvalidArgument("solve_embedding: btilde is not real-valued");
  EmbeddingSolution out;
  for (const auto& [n, c] : btilde.coefficients()) {
    if (c == cplx(0.0)) continue;
    const double x = flow.rotation(n);
    const double r = std::round(x);
    if (r != 0.0 && std::abs(x - r) <= kResonanceTolerance) {
      out.resonances.push_back({n, x, c});
      continue;
    }
    const double mod = std::abs(averaging_multiplier(flow, n));
    if (mod <= kSmallDivisor) out.small_divisors.push_back({n, mod});
  }
  if (out.resonances.empty() && out.small_divisors.empty())
    out.b = btilde.transform([&](const Frequency& n, cplx c) { return c / averaging_multiplier(flow, n); });
  return out;
}

struct BbpReport {
  std::vector<Point> samples;       // the samples actually used (exclusions removed)
  std::vector<double> derivative;   // Richardson-extrapolated orbit derivative per sample
  double mean = 0.0;                // uniform-measure mean of the derivative field
  double spread = 0.0;              // max - min of the field
  double worst_disagreement = 0.0;  // largest change of the estimate across the h grid
  bool inconclusive = false;
  bool obstruction = false;
};

struct BbpOptions {
  std::vector<double> h_grid{1e-3, 5e-4, 2.5e-4};
  double convergence_tolerance = 1e-6;
  double obstruction_tolerance = 1e-6;
};

/// Estimates d/dt btilde(phi_t x) at t = 0 by central differences with Richardson
/// extrapolation. A field whose uniform mean is nonzero cannot come from a
/// continuous b with L b = btilde.
template <class Flow, class F>
BbpReport bbp_test(const Flow& flow, F btilde, const std::vector<Point>& samples,
                   const std::function<bool(const Point&)>& exclude = {}, const BbpOptions& opt = {}) {
  if (opt.h_grid.size() < 2) throw InvalidArgument("bbp_test: need at least two step sizes");
  BbpReport r;
  auto central = [&](const Point& x, double h) { return (btilde(flow.apply(x, h)) - btilde(flow.apply(x, -h))) / (2.0 * h); };
  for (const auto& x : samples) {
    if (exclude && exclude(x)) continue;
    std::vector<double> est;
    for (double h : opt.h_grid) est.push_back((4.0 * central(x, h / 2.0) - central(x, h)) / 3.0);
    double disagreement = 0.0;
    for (std::size_t i = 1; i < est.size(); ++i) disagreement = std::max(disagreement, std::abs(est[i] - est[i - 1]));
    r.worst_disagreement = std::max(r.worst_disagreement, disagreement);
    if (disagreement > opt.convergence_tolerance * std::max(1.0, std::abs(est.back()))) r.inconclusive = true;
    r.samples.push_back(x);
    r.derivative.push_back(est.back());
  }
  if (r.derivative.empty()) throw InvalidArgument("bbp_test: every sample was excluded");
  double sum = 0.0, lo = r.derivative.front(), hi = lo;
  for (double d : r.derivative) {
    sum += d;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  r.mean = sum / static_cast<double>(r.derivative.size());
  r.spread = hi - lo;
  r.obstruction = !r.inconclusive && std::abs(r.mean) > opt.obstruction_tolerance;
  return r;
}

struct CertificateRow {
  double t;
  double max_residual;
};

inline const std::vector<double>& certificate_times() {
  static const std::vector<double> times{0.5, 1.0, 2.0, 5.0};
  return times;
}

/// max over samples of |int_0^t b(phi_s x) ds - (g(phi_t x) - g(x))| for each t.
template <class Flow, class G, class B, class P>
std::vector<CertificateRow> coboundary_certificate(const Flow& flow, const G& g, const B& b, const std::vector<P>& samples,
                                                   const std::vector<double>& times = certificate_times(), int panels_per_unit = 256) {
  std::vector<CertificateRow> rows;
  for (double t : times) {
    double worst = 0.0;
    for (const auto& x : samples) {
      const double integral = detail::simpson([&](double s) { return b(flow.apply(x, s)); }, 0.0, t,
                                              std::max(2, static_cast<int>(std::ceil(t * panels_per_unit))));
      worst = std::max(worst, std::abs(integral - (g(flow.apply(x, t)) - g(x))));
    }
    rows.push_back({t, worst});
  }
  return rows;
}

template <class B>
struct CoboundaryResult {
  B b;
  std::vector<CertificateRow> certificate;
  double worst_residual = 0.0;
};

inline constexpr double kCertificateTolerance = 1e-7;

namespace detail {

template <class B>
CoboundaryResult<B> certify(B b, std::vector<CertificateRow> rows) {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.max_residual);
  if (worst > kCertificateTolerance) throw NumericFailure("coboundary_lift: certificate failed, worst residual " + std::to_string(worst));
  return {std::move(b), std::move(rows), worst};
}

}  // namespace detail

/// Torus flow, trigonometric g: b = d/ds g(phi_s x)|_0 has coefficients 2 pi i (n.alpha) g_n.
inline CoboundaryResult<TrigPolynomial> coboundary_lift(const TorusLinearFlow& flow, const TrigPolynomial& g, const std::vector<Point>& samples) {
  TrigPolynomial b = g.transform([&](const Frequency& n, cplx c) { return c * cplx(0.0, 2.0 * std::numbers::pi * flow.rotation(n)); });
  auto rows = coboundary_certificate(flow, g, b, samples);
  return detail::certify(std::move(b), std::move(rows));
}

/// Exponential flow, g = scale log x + offset: b is the constant scale.
inline CoboundaryResult<HomogeneousPolynomial> coboundary_lift(const ScalarExpFlow& flow, const LogFunction& g, const std::vector<double>& samples) {
  HomogeneousPolynomial b{g.scale, 0};
  auto rows = coboundary_certificate(flow, g, b, samples);
  return detail::certify(b, std::move(rows));
}

/// Exponential flow, g homogeneous of degree d: b = d g.
inline CoboundaryResult<HomogeneousPolynomial> coboundary_lift(const ScalarExpFlow& flow, const HomogeneousPolynomial& g, const std::vector<double>& samples) {
  HomogeneousPolynomial b{g.coefficient * g.degree, g.degree};
  auto rows = coboundary_certificate(flow, g, b, samples);
  return detail::certify(b, std::move(rows));
}

/// b(x) = (g(phi_h x) - g(phi_{-h} x)) / 2h for inputs without an analytic derivative.
template <class Flow, class G>
auto finite_difference_generator(const Flow& flow, G g, double h = 1e-6) {
  return [flow, g, h](const auto& x) { return (g(flow.apply(x, h)) - g(flow.apply(x, -h))) / (2.0 * h); };
}

template <class Flow, class G, class P>
auto coboundary_lift_numeric(const Flow& flow, G g, const std::vector<P>& samples, double h = 1e-6) {
  auto b = finite_difference_generator(flow, g, h);
  auto rows = coboundary_certificate(flow, g, b, samples);
  return detail::certify(std::move(b), std::move(rows));
}

struct ResolventResult {
  TrigPolynomial a;
  TrigPolynomial c;   // a - lambda * mean(a)
  double residual;    // max coefficientwise |L a - lambda a - b|
};

/// Solves (L - lambda I) a = b on the circle for lambda > 1.
inline ResolventResult resolvent_solve(const TorusLinearFlow& flow, const TrigPolynomial& b, double lambda) {
  if (flow.dimension() != 1) throw InvalidArgument("resolvent_solve: only circle rotations are supported");
  if (!(lambda > 1.0)) throw InvalidArgument("resolvent_solve: lambda must exceed 1");
  if (b.dimension() != 1) throw InvalidArgument("resolvent_solve: dimension mismatch");
  TrigPolynomial a = b.transform([&](const Frequency& n, cplx c) { return c / (averaging_multiplier(flow, n) - lambda); });
  const double mean = a.coefficient({0}).real();
  TrigPolynomial c = a;
  c.add({0}, -lambda * mean);
  const TrigPolynomial la = average_operator(flow, a);
  double residual = 0.0;
  for (const auto& [n, bn] : b.coefficients()) residual = std::max(residual, std::abs(la.coefficient(n) - lambda * a.coefficient(n) - bn));
  if (residual > 1e-10) throw NumericFailure("resolvent_solve: identity residual " + std::to_string(residual));
  return {std::move(a), std::move(c), residual};
}

/// Uniform grid of m^d points on the d-torus.
inline std::vector<Point> torus_grid(int dimension, int m) {
  std::vector<Point> pts;
  Point x(static_cast<std::size_t>(dimension), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(dimension), 0);
  while (true) {
    for (int i = 0; i < dimension; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / m;
    pts.push_back(x);
    int i = 0;
    while (i < dimension && ++idx[static_cast<std::size_t>(i)] == m) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == dimension) break;
  }
  return pts;
}

}  // namespace sflow

#pragma once

// u-dimension spectra of ratio level sets K_alpha(a, b) for flow families.
// Families enter through their additive base representatives, so every
// quantity reduces to pressures of locally constant potentials on the base:
//   T_u(q) = root t of P(q (A - alpha B) - t U) = 0,   dim = inf_q T_u(q),
// cross-checked against the conditional variational principle over the
// Gibbs-Markov family nu_q.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sflow/equivalence.hpp"
#include "sflow/error.hpp"
#include "sflow/parallel.hpp"
#include "sflow/potential.hpp"
#include "sflow/suspension.hpp"
#include "sflow/transfer.hpp"

namespace sflow {

struct SpectrumProblem {
  SuspensionFlow flow;
  FlowFamily a;
  FlowFamily b;
  FlowFunction u;
  int n = 1;  // depth of the additive candidates c_N / N
};

struct AlphaInterval {
  double lo;
  double hi;
};

inline constexpr double kSpectrumRootTolerance = 1e-12;
inline constexpr int kGoldenSectionSteps = 200;
inline constexpr double kConstraintTolerance = 1e-6;

/// Base representatives A, B, U of a spectrum problem at one common depth,
/// together with the detected ratio interval.
class SpectrumModel {
 public:
  static SpectrumModel from_problem(const SpectrumProblem& p, int max_period = 12) {
    const auto a_rep = cuneo_candidate(induced_sequence(p.flow, p.a), p.n);
    const auto b_rep = cuneo_candidate(induced_sequence(p.flow, p.b), p.n);
    const auto u_rep = roof_integral(p.flow, p.u);
    if (!p.u.is_lifted()) {
      // u itself must be positive, not only its roof integral
      for_each_word(p.flow.base(), std::max(p.u.depth(), p.flow.roof().depth()), [&](const Word& w) {
        const double tau = p.flow.roof()(w);
        for (int j = 0; j <= 16; ++j)
          if (!(p.u(p.flow, w, tau * j / 16.0 * (1 - 1e-12)) > 0.0)) throw InvalidArgument("SpectrumProblem: u must be positive");
      });
    }
    return from_base(p.flow.base(), a_rep, b_rep, u_rep, max_period);
  }

  /// Discrete-time model on the base directly.
  static SpectrumModel from_base(const Sft& sft, const LocallyConstantFunction& a, const LocallyConstantFunction& b,
                                 const LocallyConstantFunction& u, int max_period = 12) {
    if (!sft.primitive()) throw UnsupportedInput("SpectrumModel: base shift is not primitive");
    SpectrumModel m;
    m.sft_ = sft;
    const int depth = std::max({a.depth(), b.depth(), u.depth()});
    m.a_ = a.refined(depth);
    m.b_ = b.refined(depth);
    m.u_ = u.refined(depth);
    if (!(m.u_.min() > 0.0)) throw InvalidArgument("SpectrumModel: I_u must be strictly positive");
    m.max_period_ = max_period;
    m.interval_ = m.detect_interval();
    return m;
  }

  const Sft& sft() const noexcept { return sft_; }
  const LocallyConstantFunction& a() const noexcept { return a_; }
  const LocallyConstantFunction& b() const noexcept { return b_; }
  const LocallyConstantFunction& u() const noexcept { return u_; }
  AlphaInterval interval() const noexcept { return interval_; }

  LocallyConstantFunction ratio_potential(double q, double alpha) const { return q * (a_ - alpha * b_); }

  /// min / max of int A / int B over periodic-orbit measures up to max_period and
  /// Gibbs measures of +-50 (A - alpha_0 B); an inner approximation.
  AlphaInterval detect_interval() const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double min_b = std::numeric_limits<double>::infinity();
    const int d = a_.depth();
    for (int p = 1; p <= max_period_; ++p) {
      for (const auto& x : periodic_points(sft_, p)) {
        if (x.minimal_period() != p) continue;
        const Word w = x.prefix(p + d - 1);
        const double sa = birkhoff_sum(a_, w, p), sb = birkhoff_sum(b_, w, p);
        min_b = std::min(min_b, sb / p);
        if (sb > 0.0) {
          lo = std::min(lo, sa / sb);
          hi = std::max(hi, sa / sb);
        }
      }
    }
    if (!(min_b > 0.0))
      throw UnsupportedInput("SpectrumModel: b has a non-positive average on some periodic orbit (degenerate case)");
    const auto parry = gibbs_measure(sft_, LocallyConstantFunction::constant(sft_, 0.0));
    const double alpha0 = integrate(parry, a_) / integrate(parry, b_);
    for (double q : {-50.0, 50.0}) {
      const auto nu = gibbs_measure(sft_, ratio_potential(q, alpha0));
      const double r = integrate(nu, a_) / integrate(nu, b_);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return {lo, hi};
  }

 private:
  Sft sft_;
  LocallyConstantFunction a_, b_, u_;
  int max_period_ = 12;
  AlphaInterval interval_{0.0, 0.0};
};

inline SpectrumModel prepare(const SpectrumProblem& p) { return SpectrumModel::from_problem(p); }

/// T_u(q) for level alpha: the root t of P(q (A - alpha B) - t U) = 0.
inline double T_u(const SpectrumModel& m, double q, double alpha) {
  return pressure_root(m.sft(), m.ratio_potential(q, alpha), m.u(), kSpectrumRootTolerance);
}

inline AlphaInterval alpha_interval(const SpectrumModel& m) { return m.interval(); }

struct SpectrumValue {
  std::optional<double> dim;  // empty when the level set is empty
  double q_star = 0.0;
};

/// inf over q of T_u(q) by golden section on an expanding bracket.
inline SpectrumValue spectrum_dim(const SpectrumModel& m, double alpha) {
  const auto iv = m.interval();
  const double slack = 1e-12 * std::max(1.0, std::abs(alpha));
  if (!std::isfinite(alpha) || alpha < iv.lo - slack || alpha > iv.hi + slack) return {std::nullopt, 0.0};
  auto T = [&](double q) { return T_u(m, q, alpha); };

  // bracket a minimum: lo < mid < hi with T(mid) <= T(lo), T(hi)
  double lo = -1.0, mid = 0.0, hi = 1.0;
  double t_lo = T(lo), t_mid = T(mid), t_hi = T(hi);
  int expansions = 0;
  while (!(t_mid <= t_lo && t_mid <= t_hi)) {
    if (++expansions > 60) return {std::nullopt, 0.0};  // infimum escapes to |q| = infinity
    if (t_hi < t_mid) {
      lo = mid, t_lo = t_mid;
      mid = hi, t_mid = t_hi;
      hi = mid + 2.0 * (mid - lo);
      t_hi = T(hi);
    } else {
      hi = mid, t_hi = t_mid;
      mid = lo, t_mid = t_lo;
      lo = mid - 2.0 * (hi - mid);
      t_lo = T(lo);
    }
  }

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = T(x1), f2 = T(x2);
  for (int step = 0; step < kGoldenSectionSteps; ++step) {
    if (hi - lo <= 1e-9 * (1.0 + std::abs(mid))) {
      const double q = f1 < f2 ? x1 : x2;
      return {std::min({f1, f2, t_mid}), q};
    }
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = T(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = T(x2);
    }
  }
  throw NumericFailure("spectrum_dim: golden section did not converge in 200 steps");
}

struct CvpWitness {
  double q = 0.0;
  double t = 0.0;        // T_u(q)
  double ratio = 0.0;    // int A dnu / int B dnu
  double entropy = 0.0;  // h_nu(T)
  double u_integral = 0.0;
};

struct CvpValue {
  std::optional<double> dim;  // empty: no witness met the constraint
  CvpWitness witness;
};

namespace detail {

inline CvpWitness cvp_candidate(const SpectrumModel& m, double q, double alpha) {
  CvpWitness w;
  w.q = q;
  w.t = T_u(m, q, alpha);
  const auto nu = gibbs_measure(m.sft(), m.ratio_potential(q, alpha) - w.t * m.u());
  w.ratio = integrate(nu, m.a()) / integrate(nu, m.b());
  w.entropy = entropy(nu);
  w.u_integral = integrate(nu, m.u());
  return w;
}

}  // namespace detail

/// Conditional variational principle: sup of h_nu / int U dnu over the Gibbs-Markov
/// family nu_q subject to int A / int B = alpha. A lower bound for the sup over all
/// ergodic measures.
inline CvpValue cvp_dim(const SpectrumModel& m, double alpha) {
  std::vector<double> grid{0.0};
  for (int j = -6; j <= 6; ++j) {
    grid.push_back(std::ldexp(1.0, j));
    grid.push_back(-std::ldexp(1.0, j));
  }
  std::sort(grid.begin(), grid.end());
  std::vector<CvpWitness> sweep;
  sweep.reserve(grid.size());
  for (double q : grid) sweep.push_back(detail::cvp_candidate(m, q, alpha));

  CvpValue best;
  auto consider = [&](const CvpWitness& w) {
    if (std::abs(w.ratio - alpha) > kConstraintTolerance) return;
    const double v = w.entropy / w.u_integral;
    if (!best.dim || v > *best.dim) {
      best.dim = v;
      best.witness = w;
    }
  };
  for (const auto& w : sweep) consider(w);
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
    double g_lo = sweep[i].ratio - alpha, g_hi = sweep[i + 1].ratio - alpha;
    if (g_lo == 0.0 || g_hi == 0.0 || (g_lo > 0.0) == (g_hi > 0.0)) continue;
    double lo = sweep[i].q, hi = sweep[i + 1].q;
    CvpWitness w = sweep[i];
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
      w = detail::cvp_candidate(m, 0.5 * (lo + hi), alpha);
      const double g = w.ratio - alpha;
      if (std::abs(g) <= 1e-13) break;
      if ((g > 0.0) == (g_lo > 0.0))
        lo = w.q, g_lo = g;
      else
        hi = w.q;
    }
    consider(w);
  }
  return best;
}

struct SpectrumRow {
  double alpha;
  std::optional<double> dim_formula2;  // inf_q T_u(q)
  std::optional<double> dim_formula1;  // conditional variational principle
  double q_star;
  CvpWitness witness;
};

/// Both formulas over an alpha grid, evaluated in parallel.
inline std::vector<SpectrumRow> compute_spectrum(const SpectrumModel& m, const std::vector<double>& alphas) {
  std::vector<SpectrumRow> rows(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) {
    const auto s = spectrum_dim(m, alphas[i]);
    SpectrumRow r{alphas[i], s.dim, std::nullopt, s.q_star, {}};
    if (s.dim) {
      const auto c = cvp_dim(m, alphas[i]);
      r.dim_formula1 = c.dim;
      r.witness = c.witness;
    }
    rows[i] = r;
  });
  return rows;
}

/// The q = 0 value: root of P(-t U) = 0, the maximum of the spectrum.
inline double spectrum_peak(const SpectrumModel& m) { return T_u(m, 0.0, 0.0); }

}  // namespace sflow

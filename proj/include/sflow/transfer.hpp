#pragma once

// Topological pressure and Gibbs-Markov equilibrium measures of locally
// constant potentials via the Perron data of the weighted transfer matrix.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sflow/error.hpp"
#include "sflow/potential.hpp"
#include "sflow/symbolic.hpp"

namespace sflow {

inline constexpr int kPerronMaxIterations = 100000;
inline constexpr double kPerronTolerance = 1e-13;

/// The Ruelle operator of phi restricted to cylinder functions of a fixed
/// order n: states are the admissible n-words and L[w -> w'] = exp(phi(w))
/// whenever w' = w_1 ... w_{n-1} a is admissible.
class WeightedTransferMatrix {
 public:
  WeightedTransferMatrix(const LocallyConstantFunction& phi, int order) : sft_(phi.sft()), order_(order) {
    if (order < phi.depth()) throw InvalidArgument("WeightedTransferMatrix: order below potential depth");
    const int k = sft_.k();
    states_ = admissible_words(sft_, order);
    index_.assign(static_cast<std::size_t>(std::pow(static_cast<double>(k), order)), -1);
    for (std::size_t i = 0; i < states_.size(); ++i) index_[detail::word_code(states_[i], k, order)] = static_cast<int>(i);

    log_weight_.resize(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) log_weight_[i] = phi(states_[i]);
    // exponentiate relative to the maximum; the shift is added back to the pressure
    shift_ = *std::max_element(log_weight_.begin(), log_weight_.end());
    weight_.resize(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) weight_[i] = std::exp(log_weight_[i] - shift_);

    successors_.resize(states_.size());
    Word next(static_cast<std::size_t>(order));
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const Word& w = states_[i];
      std::copy(w.begin() + 1, w.end(), next.begin());
      for (int a = 0; a < k; ++a) {
        if (!sft_.allowed(w.back(), a)) continue;
        next.back() = a;
        successors_[i].push_back(index_[detail::word_code(next, k, order)]);
      }
    }
  }

  const Sft& sft() const noexcept { return sft_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<Word>& states() const noexcept { return states_; }
  const std::vector<int>& successors(std::size_t i) const { return successors_[i]; }
  /// exp(phi(state) - shift())
  double weight(std::size_t i) const { return weight_[i]; }
  double log_weight(std::size_t i) const { return log_weight_[i]; }
  double shift() const noexcept { return shift_; }

  int index_of(std::span<const int> w) const { return index_[detail::word_code(w, sft_.k(), order_)]; }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
      double s = 0.0;
      for (int j : successors_[i]) s += v[static_cast<std::size_t>(j)];
      out[i] = weight_[i] * s;
    }
    return out;
  }

  std::vector<double> apply_left(const std::vector<double>& u) const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
      for (int j : successors_[i]) out[static_cast<std::size_t>(j)] += u[i] * weight_[i];
    return out;
  }

 private:
  Sft sft_;
  int order_;
  std::vector<Word> states_;
  std::vector<int> index_;
  std::vector<double> log_weight_;
  std::vector<double> weight_;
  double shift_ = 0.0;
  std::vector<std::vector<int>> successors_;
};

struct PerronData {
  double log_eigenvalue = 0.0;  // includes the weight shift
  std::vector<double> right;     // normalized to sum 1
  std::vector<double> left;      // normalized so that <left, right> = 1
  int iterations = 0;
};

namespace detail {

// Power iteration. Stops when the Collatz-Wielandt bracket
// min (Mv)_i / v_i <= lambda <= max (Mv)_i / v_i closes to kPerronTolerance.
// After a short plain phase it iterates with M + delta I, delta the current
// upper bound: same eigenvectors, but eigenvalues near -lambda (nearly
// periodic weights at extreme potentials) no longer stall the iteration.
template <class Apply>
inline std::pair<double, std::vector<double>> power_iterate(std::size_t n, Apply&& apply, int& iterations) {
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= kPerronMaxIterations; ++it) {
    std::vector<double> w = apply(v);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      total += w[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericFailure("power iteration: degenerate iterate");
    // total = sum (Mv) with sum v = 1; it must have settled as well as the bracket
    const bool settled = std::abs(total - previous) <= kPerronTolerance * total;
    previous = total;
    if (hi - lo <= kPerronTolerance * hi && settled) {
      for (auto& x : w) x /= total;
      iterations = std::max(iterations, it);
      return {0.5 * (hi + lo), std::move(w)};
    }
    double mass = 0.0;
    const double delta = it > 64 ? hi : 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += w[i] += delta * v[i];
    for (auto& x : w) x /= mass;
    v = std::move(w);
  }
  throw NumericFailure("power iteration did not converge after " + std::to_string(kPerronMaxIterations) + " steps");
}

inline void require_primitive(const Sft& sft) {
  if (!sft.primitive()) throw UnsupportedInput("transfer operator: transition matrix is not primitive");
}

}  // namespace detail

inline PerronData perron_data(const WeightedTransferMatrix& m) {
  PerronData out;
  auto [lambda, right] = detail::power_iterate(m.size(), [&](const std::vector<double>& v) { return m.apply(v); }, out.iterations);
  auto [lambda_left, left] = detail::power_iterate(m.size(), [&](const std::vector<double>& u) { return m.apply_left(u); }, out.iterations);
  (void)lambda_left;
  const double dot = std::inner_product(left.begin(), left.end(), right.begin(), 0.0);
  for (auto& x : left) x /= dot;
  out.log_eigenvalue = std::log(lambda) + m.shift();
  out.right = std::move(right);
  out.left = std::move(left);
  return out;
}

/// Topological pressure of a locally constant potential; `order` defaults to
/// max(depth, 1). Any order >= depth gives the same value.
inline double pressure(const Sft& sft, const LocallyConstantFunction& phi, std::optional<int> order = std::nullopt) {
  detail::require_primitive(sft);
  if (!(phi.sft() == sft)) throw InvalidArgument("pressure: potential defined over a different shift");
  const WeightedTransferMatrix m(phi, order.value_or(std::max(phi.depth(), 1)));
  int iterations = 0;
  const auto [lambda, v] = detail::power_iterate(m.size(), [&](const std::vector<double>& x) { return m.apply(x); }, iterations);
  return std::log(lambda) + m.shift();
}

/// A stationary Markov measure on Sigma_A whose states are the admissible
/// words of a fixed order. Cylinder weights of any length follow from the
/// stationary distribution and the transition kernel.
class GibbsMarkovMeasure {
 public:
  struct Transition {
    int to;
    double probability;
  };

  GibbsMarkovMeasure(const Sft& sft, int order, std::vector<Word> states, std::vector<double> stationary,
                     std::vector<std::vector<Transition>> kernel)
      : sft_(sft), order_(order), states_(std::move(states)), pi_(std::move(stationary)), kernel_(std::move(kernel)) {
    if (order < 1) throw InvalidArgument("GibbsMarkovMeasure: order must be >= 1");
    if (states_.size() != pi_.size() || states_.size() != kernel_.size())
      throw InvalidArgument("GibbsMarkovMeasure: inconsistent sizes");
    index_.assign(static_cast<std::size_t>(std::pow(static_cast<double>(sft.k()), order)), -1);
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (static_cast<int>(states_[i].size()) != order || !sft.is_admissible(states_[i]))
        throw InvalidArgument("GibbsMarkovMeasure: bad state word");
      index_[detail::word_code(states_[i], sft.k(), order)] = static_cast<int>(i);
    }
    const double mass = std::accumulate(pi_.begin(), pi_.end(), 0.0);
    if (std::abs(mass - 1.0) > 1e-9) throw InvalidArgument("GibbsMarkovMeasure: stationary vector does not sum to 1");
    for (std::size_t i = 0; i < kernel_.size(); ++i) {
      double row = 0.0;
      for (const auto& t : kernel_[i]) {
        const auto& from = states_[i];
        const auto& to = states_.at(static_cast<std::size_t>(t.to));
        if (!std::equal(from.begin() + 1, from.end(), to.begin())) throw InvalidArgument("GibbsMarkovMeasure: kernel entry is not a shift move");
        row += t.probability;
      }
      if (pi_[i] > 0.0 && std::abs(row - 1.0) > 1e-9) throw InvalidArgument("GibbsMarkovMeasure: kernel row does not sum to 1");
    }
  }

  /// Order-1 Markov chain from a k x k stochastic matrix compatible with A.
  static GibbsMarkovMeasure from_symbol_chain(const Sft& sft, const std::vector<std::vector<double>>& p) {
    const int k = sft.k();
    if (static_cast<int>(p.size()) != k) throw InvalidArgument("from_symbol_chain: wrong matrix size");
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k);
    std::vector<std::vector<Transition>> kernel(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      if (static_cast<int>(p[static_cast<std::size_t>(i)].size()) != k) throw InvalidArgument("from_symbol_chain: wrong matrix size");
      for (int j = 0; j < k; ++j) {
        const double pij = p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (pij < 0.0) throw InvalidArgument("from_symbol_chain: negative probability");
        if (pij > 0.0 && !sft.allowed(i, j)) throw InvalidArgument("from_symbol_chain: probability on a forbidden transition");
        if (pij > 0.0) kernel[static_cast<std::size_t>(i)].push_back({j, pij});
        sys(j, i) += pij;
      }
      sys(i, i) -= 1.0;
      sys(k, i) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1.0;
    const Eigen::VectorXd pi = sys.colPivHouseholderQr().solve(rhs);
    std::vector<Word> states;
    std::vector<double> stationary;
    for (int i = 0; i < k; ++i) {
      states.push_back({i});
      stationary.push_back(std::max(0.0, pi(i)));
    }
    return GibbsMarkovMeasure(sft, 1, std::move(states), std::move(stationary), std::move(kernel));
  }

  /// The invariant probability equidistributed on the orbit of a periodic point.
  static GibbsMarkovMeasure periodic_orbit(const Sft& sft, const PeriodicPoint& x) {
    const int p = x.minimal_period();
    std::vector<std::pair<Word, int>> rot;
    for (int r = 0; r < p; ++r) rot.emplace_back(x.shifted(r).prefix(p), r);
    std::sort(rot.begin(), rot.end());
    std::vector<int> where(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) where[static_cast<std::size_t>(rot[static_cast<std::size_t>(i)].second)] = i;
    std::vector<Word> states;
    std::vector<double> pi(static_cast<std::size_t>(p), 1.0 / p);
    std::vector<std::vector<Transition>> kernel(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      states.push_back(rot[static_cast<std::size_t>(i)].first);
      const int r = rot[static_cast<std::size_t>(i)].second;
      kernel[static_cast<std::size_t>(i)].push_back({where[static_cast<std::size_t>((r + 1) % p)], 1.0});
    }
    return GibbsMarkovMeasure(sft, p, std::move(states), std::move(pi), std::move(kernel));
  }

  const Sft& sft() const noexcept { return sft_; }
  int order() const noexcept { return order_; }
  const std::vector<Word>& states() const noexcept { return states_; }
  const std::vector<double>& stationary() const noexcept { return pi_; }
  const std::vector<Transition>& transitions(std::size_t state) const { return kernel_[state]; }

  /// Markov entropy rate -sum_i pi_i sum_j P_ij log P_ij.
  double entropy() const {
    double h = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i)
      for (const auto& t : kernel_[i])
        if (t.probability > 0.0) h -= pi_[i] * t.probability * std::log(t.probability);
    return std::max(h, 0.0);
  }

  /// mu[w] for a word of any length.
  double weight(std::span<const int> w) const {
    if (w.empty()) return 1.0;
    if (!sft_.is_admissible(w)) return 0.0;
    if (static_cast<int>(w.size()) <= order_) {
      double s = 0.0;
      for (std::size_t i = 0; i < states_.size(); ++i)
        if (std::equal(w.begin(), w.end(), states_[i].begin())) s += pi_[i];
      return s;
    }
    int state = index_[detail::word_code(w, sft_.k(), order_)];
    if (state < 0) return 0.0;
    double mass = pi_[static_cast<std::size_t>(state)];
    for (std::size_t pos = static_cast<std::size_t>(order_); pos < w.size() && mass > 0.0; ++pos) {
      const int target = index_[detail::word_code(w.subspan(pos + 1 - static_cast<std::size_t>(order_)), sft_.k(), order_)];
      double p = 0.0;
      for (const auto& t : kernel_[static_cast<std::size_t>(state)])
        if (t.to == target) p = t.probability;
      mass *= p;
      state = target;
    }
    return mass;
  }

  /// Calls visit(word, mass) for every cylinder of the given length with positive mass,
  /// in lexicographic order.
  template <class Visitor>
  void for_each_cylinder(int depth, Visitor&& visit) const {
    if (depth < 1) throw InvalidArgument("for_each_cylinder: depth must be >= 1");
    if (depth <= order_) {
      std::vector<std::pair<Word, double>> acc;
      for (std::size_t i = 0; i < states_.size(); ++i) {
        if (pi_[i] <= 0.0) continue;
        Word head(states_[i].begin(), states_[i].begin() + depth);
        if (!acc.empty() && acc.back().first == head)
          acc.back().second += pi_[i];
        else
          acc.emplace_back(std::move(head), pi_[i]);
      }
      for (const auto& [w, m] : acc) visit(std::as_const(w), m);
      return;
    }
    Word w;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (pi_[i] <= 0.0) continue;
      w = states_[i];
      extend(static_cast<int>(i), pi_[i], depth, w, visit);
    }
  }

  std::vector<std::pair<Word, double>> cylinder_weights(int depth) const {
    std::vector<std::pair<Word, double>> out;
    for_each_cylinder(depth, [&](const Word& w, double m) { out.emplace_back(w, m); });
    return out;
  }

 private:
  template <class Visitor>
  void extend(int state, double mass, int depth, Word& w, Visitor& visit) const {
    if (static_cast<int>(w.size()) == depth) {
      visit(std::as_const(w), mass);
      return;
    }
    auto moves = kernel_[static_cast<std::size_t>(state)];
    std::sort(moves.begin(), moves.end(), [this](const Transition& a, const Transition& b) {
      return states_[static_cast<std::size_t>(a.to)].back() < states_[static_cast<std::size_t>(b.to)].back();
    });
    for (const auto& t : moves) {
      if (t.probability <= 0.0) continue;
      w.push_back(states_[static_cast<std::size_t>(t.to)].back());
      extend(t.to, mass * t.probability, depth, w, visit);
      w.pop_back();
    }
  }

  Sft sft_;
  int order_;
  std::vector<Word> states_;
  std::vector<double> pi_;
  std::vector<std::vector<Transition>> kernel_;
  std::vector<int> index_;
};

/// The equilibrium measure of phi: P_ij = L_ij v_j / (lambda v_i), pi_i = u_i v_i.
inline GibbsMarkovMeasure gibbs_measure(const Sft& sft, const LocallyConstantFunction& phi) {
  detail::require_primitive(sft);
  if (!(phi.sft() == sft)) throw InvalidArgument("gibbs_measure: potential defined over a different shift");
  const WeightedTransferMatrix m(phi, std::max(phi.depth(), 1));
  const PerronData perron = perron_data(m);
  const double lambda = std::exp(perron.log_eigenvalue - m.shift());
  std::vector<double> pi(m.size());
  std::vector<std::vector<GibbsMarkovMeasure::Transition>> kernel(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    pi[i] = perron.left[i] * perron.right[i];
    double row = 0.0;
    for (int j : m.successors(i)) {
      const double p = m.weight(i) * perron.right[static_cast<std::size_t>(j)] / (lambda * perron.right[i]);
      kernel[i].push_back({j, p});
      row += p;
    }
    // remove the O(tolerance) drift so rows are stochastic to rounding
    for (auto& t : kernel[i]) t.probability /= row;
  }
  const double mass = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (auto& x : pi) x /= mass;
  return GibbsMarkovMeasure(sft, m.order(), m.states(), std::move(pi), std::move(kernel));
}

inline double entropy(const GibbsMarkovMeasure& mu) { return mu.entropy(); }

/// sum_w mu[w] f(w) over cylinders of length depth(f).
inline double integrate(const GibbsMarkovMeasure& mu, const LocallyConstantFunction& f) {
  if (!(f.sft() == mu.sft())) throw InvalidArgument("integrate: function over a different shift");
  double s = 0.0;
  if (f.depth() <= mu.order()) {
    for (std::size_t i = 0; i < mu.states().size(); ++i)
      if (mu.stationary()[i] > 0.0) s += mu.stationary()[i] * f(mu.states()[i]);
    return s;
  }
  mu.for_each_cylinder(f.depth(), [&](const Word& w, double m) { s += m * f(w); });
  return s;
}

struct FamilyPressure {
  double value;
  int n;
};

/// Pressure of a nonadditive family through its depth-N additive candidate.
inline FamilyPressure family_pressure(const Sft& sft, const PotentialFamily& fam, int n) {
  return {pressure(sft, cuneo_candidate(fam, n)), n};
}

}  // namespace sflow

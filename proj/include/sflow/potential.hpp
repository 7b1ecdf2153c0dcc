#pragma once

// Locally constant functions on an SFT and discrete-time potential families
// (additive, almost additive, asymptotically additive), including the
// log-norm family of a matrix cocycle.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sflow/error.hpp"
#include "sflow/symbolic.hpp"

namespace sflow {

namespace detail {

inline constexpr double kDenseTableLimit = 1 << 24;

inline std::size_t word_code(std::span<const int> w, int k, int depth) {
  std::size_t code = 0;
  for (int i = 0; i < depth; ++i) code = code * static_cast<std::size_t>(k) + static_cast<std::size_t>(w[static_cast<std::size_t>(i)]);
  return code;
}

}  // namespace detail

/// A function on Sigma_A that depends only on the first `depth` symbols.
/// Values are stored densely by base-k word code; inadmissible codes hold NaN.
class LocallyConstantFunction {
 public:
  LocallyConstantFunction() = default;

  /// Builds the table by calling f(word) on every admissible word of length depth.
  template <class F>
  static LocallyConstantFunction from(const Sft& sft, int depth, F&& f) {
    LocallyConstantFunction g(sft, depth);
    for_each_word(sft, depth, [&](const Word& w) {
      g.values_[detail::word_code(w, sft.k(), depth)] = static_cast<double>(f(std::span<const int>(w)));
    });
    return g;
  }

  static LocallyConstantFunction constant(const Sft& sft, double c) {
    return from(sft, 1, [c](std::span<const int>) { return c; });
  }

  /// Indicator of the cylinder [pattern].
  static LocallyConstantFunction indicator(const Sft& sft, const Word& pattern) {
    if (pattern.empty()) throw InvalidArgument("indicator: empty pattern");
    return from(sft, static_cast<int>(pattern.size()), [&](std::span<const int> w) {
      return std::equal(pattern.begin(), pattern.end(), w.begin()) ? 1.0 : 0.0;
    });
  }

  /// Depth-1 function from a per-symbol table.
  static LocallyConstantFunction per_symbol(const Sft& sft, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != sft.k()) throw InvalidArgument("per_symbol: need one value per symbol");
    return from(sft, 1, [&](std::span<const int> w) { return v[static_cast<std::size_t>(w[0])]; });
  }

  const Sft& sft() const noexcept { return sft_; }
  int depth() const noexcept { return depth_; }

  /// Value on any word of length >= depth (only the first depth symbols matter).
  double operator()(std::span<const int> w) const {
    if (static_cast<int>(w.size()) < depth_)
      throw InvalidArgument("LocallyConstantFunction: word shorter than depth " + std::to_string(depth_));
    const double v = values_[detail::word_code(w, sft_.k(), depth_)];
    if (std::isnan(v)) throw InvalidArgument("LocallyConstantFunction: inadmissible word");
    return v;
  }

  double operator()(const PeriodicPoint& x) const {
    const Word w = x.prefix(depth_);
    return (*this)(w);
  }

  /// Same function viewed at a larger depth.
  LocallyConstantFunction refined(int depth) const {
    if (depth < depth_) throw InvalidArgument("refined: cannot lower depth");
    if (depth == depth_) return *this;
    return from(sft_, depth, [this](std::span<const int> w) { return (*this)(w); });
  }

  template <class Op>
  friend LocallyConstantFunction combine(const LocallyConstantFunction& f, const LocallyConstantFunction& g, Op op) {
    if (!(f.sft_ == g.sft_)) throw InvalidArgument("combine: functions over different shifts");
    const int depth = std::max(f.depth_, g.depth_);
    return from(f.sft_, depth, [&](std::span<const int> w) { return op(f(w), g(w)); });
  }

  friend LocallyConstantFunction operator+(const LocallyConstantFunction& f, const LocallyConstantFunction& g) {
    return combine(f, g, std::plus<>{});
  }
  friend LocallyConstantFunction operator-(const LocallyConstantFunction& f, const LocallyConstantFunction& g) {
    return combine(f, g, std::minus<>{});
  }
  friend LocallyConstantFunction operator*(double c, const LocallyConstantFunction& f) { return f.map([c](double v) { return c * v; }); }
  friend LocallyConstantFunction operator+(const LocallyConstantFunction& f, double c) { return f.map([c](double v) { return v + c; }); }

  template <class F>
  LocallyConstantFunction map(F&& fn) const {
    LocallyConstantFunction g = *this;
    for (auto& v : g.values_)
      if (!std::isnan(v)) v = fn(v);
    return g;
  }

  double min() const { return reduce([](double a, double b) { return std::min(a, b); }, std::numeric_limits<double>::infinity()); }
  double max() const { return reduce([](double a, double b) { return std::max(a, b); }, -std::numeric_limits<double>::infinity()); }
  double sup_norm() const { return std::max(std::abs(min()), std::abs(max())); }

  /// (word, value) pairs in lexicographic order.
  std::vector<std::pair<Word, double>> table() const {
    std::vector<std::pair<Word, double>> out;
    for_each_word(sft_, depth_, [&](const Word& w) { out.emplace_back(w, (*this)(w)); });
    return out;
  }

 private:
  LocallyConstantFunction(const Sft& sft, int depth) : sft_(sft), depth_(depth) {
    if (depth < 1) throw InvalidArgument("LocallyConstantFunction: depth must be >= 1");
    const double size = std::pow(static_cast<double>(sft.k()), depth);
    if (size > detail::kDenseTableLimit) throw ResourceLimit("LocallyConstantFunction: table of k^depth entries too large");
    values_.assign(static_cast<std::size_t>(size), std::numeric_limits<double>::quiet_NaN());
  }

  template <class Op>
  double reduce(Op op, double init) const {
    double acc = init;
    for (double v : values_)
      if (!std::isnan(v)) acc = op(acc, v);
    return acc;
  }

  Sft sft_;
  int depth_ = 0;
  std::vector<double> values_;
};

/// S_n f(w) = sum_{j<n} f(w_j ... w_{j+depth-1}).
inline double birkhoff_sum(const LocallyConstantFunction& f, std::span<const int> w, int n) {
  if (n < 1) throw InvalidArgument("birkhoff_sum: n must be >= 1");
  if (static_cast<int>(w.size()) < n + f.depth() - 1)
    throw InvalidArgument("birkhoff_sum: word too short for n + depth - 1");
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += f(w.subspan(static_cast<std::size_t>(j)));
  return s;
}

/// Per-symbol matrices M_0..M_{k-1}; the cocycle over a word x_0..x_{n-1}
/// is the product M_{x_{n-1}} ... M_{x_0}.
class MatrixCocycle {
 public:
  explicit MatrixCocycle(std::vector<Eigen::MatrixXd> matrices) : m_(std::move(matrices)) {
    if (m_.empty()) throw InvalidArgument("MatrixCocycle: no matrices");
    const auto d = m_.front().rows();
    for (const auto& m : m_)
      if (m.rows() != d || m.cols() != d || d == 0) throw InvalidArgument("MatrixCocycle: matrices must be square and of one size");
  }

  int symbols() const noexcept { return static_cast<int>(m_.size()); }
  int dimension() const noexcept { return static_cast<int>(m_.front().rows()); }
  const Eigen::MatrixXd& matrix(int symbol) const { return m_.at(static_cast<std::size_t>(symbol)); }

  bool entrywise_positive() const {
    return std::all_of(m_.begin(), m_.end(), [](const Eigen::MatrixXd& m) { return (m.array() > 0.0).all(); });
  }

  Eigen::MatrixXd product(std::span<const int> w) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(dimension(), dimension());
    for (int s : w) p = matrix(s) * p;
    return p;
  }

  /// Singular values of the product, largest first.
  Eigen::VectorXd singular_values(std::span<const int> w) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(product(w));
    return svd.singularValues();
  }

  double log_norm(std::span<const int> w) const { return std::log(singular_values(w)(0)); }

  /// sigma_max / sigma_min of the product; 1 for conformal products.
  double quasiconformal_ratio(std::span<const int> w) const {
    const auto sv = singular_values(w);
    return sv(0) / sv(sv.size() - 1);
  }

 private:
  std::vector<Eigen::MatrixXd> m_;
};

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

enum class Additivity { Additive, AlmostAdditive, Asymptotic };

inline const char* to_string(Additivity a) {
  switch (a) {
    case Additivity::Additive: return "additive";
    case Additivity::AlmostAdditive: return "almost-additive";
    case Additivity::Asymptotic: return "asymptotically-additive";
  }
  return "?";
}

/// A sequence (f_n) of functions on Sigma_A. f_n is evaluated on admissible
/// words of length >= n + lookahead(); lookahead is depth-1 for Birkhoff sums
/// of a depth-m generator and 0 for cocycle log-norms.
class PotentialFamily {
 public:
  using Evaluator = std::function<double(std::span<const int>, int)>;

  static PotentialFamily additive(const LocallyConstantFunction& g) {
    PotentialFamily f(g.sft(), Additivity::Additive, g.depth() - 1);
    f.generator_ = g;
    f.eval_ = [g](std::span<const int> w, int n) { return birkhoff_sum(g, w, n); };
    f.claimed_c_ = 0.0;
    return f;
  }

  /// f_n = n c.
  static PotentialFamily constant(const Sft& sft, double c) { return additive(LocallyConstantFunction::constant(sft, c)); }

  static PotentialFamily almost_additive(const Sft& sft, Evaluator eval, int lookahead, double claimed_c) {
    if (claimed_c < 0.0) throw InvalidArgument("almost_additive: claimed constant must be >= 0");
    PotentialFamily f(sft, Additivity::AlmostAdditive, lookahead);
    f.eval_ = std::move(eval);
    f.claimed_c_ = claimed_c;
    return f;
  }

  static PotentialFamily asymptotic(const Sft& sft, Evaluator eval, int lookahead) {
    PotentialFamily f(sft, Additivity::Asymptotic, lookahead);
    f.eval_ = std::move(eval);
    return f;
  }

  /// A family with an arbitrary evaluator; an attached generator is metadata
  /// for ground-truth comparisons and does not replace the evaluator.
  static PotentialFamily custom(const Sft& sft, Additivity kind, Evaluator eval, int lookahead,
                                std::optional<LocallyConstantFunction> generator = std::nullopt) {
    PotentialFamily f(sft, kind, lookahead);
    f.eval_ = std::move(eval);
    f.generator_ = std::move(generator);
    if (kind == Additivity::Additive) f.claimed_c_ = 0.0;
    return f;
  }

  /// f_n(x) = log || M_{x_{n-1}} ... M_{x_0} ||. Positive matrices give an
  /// almost additive family; otherwise it is only tagged asymptotic.
  static PotentialFamily from_cocycle(const Sft& sft, const MatrixCocycle& cocycle) {
    if (cocycle.symbols() != sft.k()) throw InvalidArgument("from_cocycle: need one matrix per symbol");
    auto eval = [cocycle](std::span<const int> w, int n) { return cocycle.log_norm(w.first(static_cast<std::size_t>(n))); };
    if (cocycle.entrywise_positive()) return almost_additive(sft, eval, 0, std::numeric_limits<double>::infinity());
    return asymptotic(sft, eval, 0);
  }

  const Sft& sft() const noexcept { return sft_; }
  Additivity kind() const noexcept { return kind_; }
  int lookahead() const noexcept { return lookahead_; }
  const std::optional<LocallyConstantFunction>& generator() const noexcept { return generator_; }
  /// Claimed almost-additivity constant (infinity when unknown).
  double claimed_constant() const noexcept { return claimed_c_; }

  double operator()(std::span<const int> w, int n) const {
    if (n < 1) throw InvalidArgument("PotentialFamily: n must be >= 1");
    if (static_cast<int>(w.size()) < n + lookahead_) throw InvalidArgument("PotentialFamily: word too short");
    return eval_(w, n);
  }

 private:
  PotentialFamily(const Sft& sft, Additivity kind, int lookahead)
      : sft_(sft), kind_(kind), lookahead_(lookahead), claimed_c_(std::numeric_limits<double>::infinity()) {
    if (lookahead < 0) throw InvalidArgument("PotentialFamily: negative lookahead");
  }

  Sft sft_;
  Additivity kind_;
  int lookahead_;
  Evaluator eval_;
  std::optional<LocallyConstantFunction> generator_;
  double claimed_c_;
};

/// sup over admissible words and m + n <= n_max of |f_{m+n}(x) - f_m(x) - f_n(sigma^m x)|.
/// Returns +infinity if an evaluation is not finite.
inline double almost_additivity_constant(const PotentialFamily& fam, int n_max) {
  if (n_max < 2) throw InvalidArgument("almost_additivity_constant: n_max must be >= 2");
  double sup = 0.0;
  for (int len = 2; len <= n_max; ++len) {
    for_each_word(fam.sft(), len + fam.lookahead(), [&](const Word& w) {
      const std::span<const int> all(w);
      const double whole = fam(all, len);
      for (int m = 1; m < len; ++m) {
        const double gap = whole - fam(all, m) - fam(all.subspan(static_cast<std::size_t>(m)), len - m);
        sup = std::isfinite(gap) ? std::max(sup, std::abs(gap)) : std::numeric_limits<double>::infinity();
      }
    });
  }
  return sup;
}

/// The additive candidate x -> f_N(x) / N, a locally constant function of depth N + lookahead.
inline LocallyConstantFunction cuneo_candidate(const PotentialFamily& fam, int n) {
  if (n < 1) throw InvalidArgument("cuneo_candidate: N must be >= 1");
  const double inv = 1.0 / n;
  return LocallyConstantFunction::from(fam.sft(), n + fam.lookahead(), [&](std::span<const int> w) { return fam(w, n) * inv; });
}

inline constexpr double kDefectWordBudget = 1e7;

/// (1/n) max over admissible words of |f_n - S_n g|, exact for locally constant data.
inline double equivalence_defect(const PotentialFamily& fam, const LocallyConstantFunction& g, int n) {
  if (n < 1 || n < g.depth()) throw InvalidArgument("equivalence_defect: need n >= depth(g)");
  const int len = std::max(n + g.depth() - 1, n + fam.lookahead());
  if (count_words(fam.sft(), len) > kDefectWordBudget)
    throw ResourceLimit("equivalence_defect: more than 1e7 words of length " + std::to_string(len));
  double sup = 0.0;
  for_each_word(fam.sft(), len, [&](const Word& w) { sup = std::max(sup, std::abs(fam(w, n) - birkhoff_sum(g, w, n))); });
  return sup / n;
}

/// Same quantity restricted to the forward orbits of the given periodic points;
/// a lower bound for equivalence_defect used when exhaustive enumeration is too large.
inline double equivalence_defect_on(const PotentialFamily& fam, const LocallyConstantFunction& g, int n,
                                    std::span<const PeriodicPoint> samples) {
  if (n < 1 || n < g.depth()) throw InvalidArgument("equivalence_defect_on: need n >= depth(g)");
  if (samples.empty()) throw InvalidArgument("equivalence_defect_on: no samples");
  const int len = std::max(n + g.depth() - 1, n + fam.lookahead());
  double sup = 0.0;
  for (const auto& p : samples) {
    const Word w = p.prefix(len);
    sup = std::max(sup, std::abs(fam(w, n) - birkhoff_sum(g, w, n)));
  }
  return sup / n;
}

/// All periodic points of period 1..max_period.
inline std::vector<PeriodicPoint> periodic_samples(const Sft& sft, int max_period) {
  std::vector<PeriodicPoint> out;
  for (int p = 1; p <= max_period; ++p) {
    auto pts = periodic_points(sft, p);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

}  // namespace sflow

#pragma once

// Subshifts of finite type: transition matrices, admissible words,
// periodic points and the two-sided d_beta metric.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sflow/error.hpp"

namespace sflow {

using Word = std::vector<int>;

/// A 0/1 transition matrix over the alphabet {0, ..., k-1}.
class Sft {
 public:
  Sft() = default;

  explicit Sft(std::vector<std::vector<int>> rows) {
    const auto k = rows.size();
    if (k == 0) throw InvalidArgument("Sft: empty transition matrix");
    k_ = static_cast<int>(k);
    a_.assign(k * k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (rows[i].size() != k) throw InvalidArgument("Sft: transition matrix is not square");
      for (std::size_t j = 0; j < k; ++j) {
        const int v = rows[i][j];
        if (v != 0 && v != 1) throw InvalidArgument("Sft: entries must be 0 or 1");
        a_[i * k + j] = static_cast<std::uint8_t>(v);
      }
    }
    for (int i = 0; i < k_; ++i) {
      bool row = false, col = false;
      for (int j = 0; j < k_; ++j) {
        row = row || allowed(i, j);
        col = col || allowed(j, i);
      }
      if (!row || !col)
        throw InvalidArgument("Sft: symbol " + std::to_string(i) + " has an empty row or column");
    }
    compute_primitivity();
  }

  static Sft full_shift(int k) {
    if (k < 1) throw InvalidArgument("Sft::full_shift: k must be positive");
    return Sft(std::vector<std::vector<int>>(k, std::vector<int>(k, 1)));
  }

  static Sft golden_mean() { return Sft({{1, 1}, {1, 0}}); }

  int k() const noexcept { return k_; }
  bool allowed(int i, int j) const noexcept { return a_[static_cast<std::size_t>(i * k_ + j)] != 0; }
  int entry(int i, int j) const noexcept { return allowed(i, j) ? 1 : 0; }

  /// True when some power A^m with m <= k^2 - 2k + 2 is entrywise positive.
  bool primitive() const noexcept { return primitive_exponent_ > 0; }
  /// Smallest certifying exponent, or 0 when the matrix is not primitive.
  int primitive_exponent() const noexcept { return primitive_exponent_; }

  bool is_admissible(std::span<const int> w) const {
    for (int s : w)
      if (s < 0 || s >= k_) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!allowed(w[i], w[i + 1])) return false;
    return true;
  }

  friend bool operator==(const Sft& x, const Sft& y) { return x.k_ == y.k_ && x.a_ == y.a_; }

 private:
  void compute_primitivity() {
    const int bound = k_ * k_ - 2 * k_ + 2;
    const auto n = static_cast<std::size_t>(k_);
    std::vector<std::uint8_t> power = a_;
    for (int m = 1; m <= std::max(bound, 1); ++m) {
      if (std::all_of(power.begin(), power.end(), [](std::uint8_t v) { return v != 0; })) {
        primitive_exponent_ = m;
        return;
      }
      std::vector<std::uint8_t> next(n * n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l)
          if (power[i * n + l])
            for (std::size_t j = 0; j < n; ++j) next[i * n + j] |= a_[l * n + j];
      power = std::move(next);
    }
    primitive_exponent_ = 0;
  }

  int k_ = 0;
  std::vector<std::uint8_t> a_;
  int primitive_exponent_ = 0;
};

/// Number of admissible words of length n, i.e. the entry sum of A^{n-1}.
/// Returned as a double so that it can serve as an overflow guard.
inline double count_words(const Sft& sft, int n) {
  if (n < 1) throw InvalidArgument("count_words: n must be >= 1");
  const int k = sft.k();
  std::vector<double> ends(static_cast<std::size_t>(k), 1.0);
  for (int step = 1; step < n; ++step) {
    std::vector<double> next(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (sft.allowed(i, j)) next[static_cast<std::size_t>(j)] += ends[static_cast<std::size_t>(i)];
    ends = std::move(next);
  }
  return std::accumulate(ends.begin(), ends.end(), 0.0);
}

/// Visits every admissible word of length n in lexicographic order.
template <class Visitor>
void for_each_word(const Sft& sft, int n, Visitor&& visit) {
  if (n < 1) throw InvalidArgument("for_each_word: n must be >= 1");
  Word w(static_cast<std::size_t>(n), 0);
  const int k = sft.k();
  // iterative DFS; pos is the index being assigned
  std::vector<int> next(static_cast<std::size_t>(n), 0);
  int pos = 0;
  while (pos >= 0) {
    auto& cand = next[static_cast<std::size_t>(pos)];
    bool placed = false;
    while (cand < k) {
      const int s = cand++;
      if (pos == 0 || sft.allowed(w[static_cast<std::size_t>(pos - 1)], s)) {
        w[static_cast<std::size_t>(pos)] = s;
        placed = true;
        break;
      }
    }
    if (!placed) {
      next[static_cast<std::size_t>(pos)] = 0;
      --pos;
      continue;
    }
    if (pos == n - 1) {
      visit(std::as_const(w));
    } else {
      ++pos;
    }
  }
}

/// All admissible words of length n, lexicographically ordered.
inline std::vector<Word> admissible_words(const Sft& sft, int n) {
  if (n < 1) throw InvalidArgument("admissible_words: n must be >= 1");
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(count_words(sft, n)));
  for_each_word(sft, n, [&](const Word& w) { out.push_back(w); });
  return out;
}

/// A point of Sigma_A given by repeating `cycle` in both time directions.
class PeriodicPoint {
 public:
  PeriodicPoint(const Sft& sft, Word cycle) : k_(sft.k()), cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw InvalidArgument("PeriodicPoint: empty cycle");
    if (!sft.is_admissible(cycle_) || !sft.allowed(cycle_.back(), cycle_.front()))
      throw InvalidArgument("PeriodicPoint: cycle is not admissible");
  }

  int alphabet() const noexcept { return k_; }
  const Word& cycle() const noexcept { return cycle_; }
  int length() const noexcept { return static_cast<int>(cycle_.size()); }

  /// Symbol at any (possibly negative) index of the bi-infinite sequence.
  int at(long long i) const noexcept {
    const auto p = static_cast<long long>(cycle_.size());
    return cycle_[static_cast<std::size_t>(((i % p) + p) % p)];
  }

  int minimal_period() const {
    const int p = length();
    for (int d = 1; d <= p; ++d) {
      if (p % d != 0) continue;
      bool ok = true;
      for (int i = 0; i < p && ok; ++i) ok = cycle_[static_cast<std::size_t>(i)] == at(i + d);
      if (ok) return d;
    }
    return p;
  }

  /// The first n forward symbols x_0 ... x_{n-1}.
  Word prefix(int n) const {
    Word w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = at(i);
    return w;
  }

  PeriodicPoint shifted(int by = 1) const {
    PeriodicPoint p = *this;
    std::rotate(p.cycle_.begin(), p.cycle_.begin() + ((by % length()) + length()) % length(), p.cycle_.end());
    return p;
  }

 private:
  int k_;
  Word cycle_;
};

/// Every admissible cycle of length n (closing transition included).
/// The count equals trace(A^n).
inline std::vector<PeriodicPoint> periodic_points(const Sft& sft, int n) {
  if (n < 1) throw InvalidArgument("periodic_points: n must be >= 1");
  std::vector<PeriodicPoint> out;
  for_each_word(sft, n, [&](const Word& w) {
    if (sft.allowed(w.back(), w.front())) out.emplace_back(sft, w);
  });
  return out;
}

/// d_beta(x, y) = beta^{-n}, n the first index with x_n != y_n or x_{-n} != y_{-n}.
inline double d_beta(const PeriodicPoint& x, const PeriodicPoint& y, double beta) {
  if (!(beta > 1.0)) throw InvalidArgument("d_beta: beta must exceed 1");
  if (x.alphabet() != y.alphabet()) throw InvalidArgument("d_beta: points over different alphabets");
  const long long period = std::lcm(static_cast<long long>(x.length()), static_cast<long long>(y.length()));
  for (long long n = 0; n < period; ++n) {
    if (x.at(n) != y.at(n) || x.at(-n) != y.at(-n)) return std::pow(beta, -static_cast<double>(n));
  }
  return 0.0;
}

}  // namespace sflow

#pragma once

/// @file
/// Truncated probability mass functions on the nonnegative integers.
///
/// A `Pmf` tabulates P(0..K) and keeps the untabulated mass P(> K) as an
/// explicit `tail_mass`. Every operation propagates that tail
/// conservatively, so a number derived from a `Pmf` always comes with an
/// error budget instead of a silent truncation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/error.hpp"

namespace inarlab {

inline constexpr double kDefaultTailBudget = 1e-12;
inline constexpr double kMassTolerance = 1e-12;

namespace detail {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

}  // namespace detail

class Pmf {
 public:
  /// Point mass at zero.
  Pmf() : probs_{1.0} {}

  /// Validates the invariants: entries in [0,1], tail >= 0 and total mass
  /// one within kMassTolerance.
  explicit Pmf(std::vector<double> probs, double tail_mass = 0.0)
      : probs_(std::move(probs)), tail_(tail_mass) {
    if (probs_.empty()) probs_.push_back(0.0);
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) throw invalid_parameter("Pmf: entry outside [0,1]");
    }
    if (!(tail_ >= 0.0 && tail_ <= 1.0)) throw invalid_parameter("Pmf: tail mass outside [0,1]");
    const double total = detail::compensated_sum(probs_) + tail_;
    if (std::abs(total - 1.0) > kMassTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "Pmf: total mass " << total << " differs from 1";
      throw invalid_parameter(os.str());
    }
    trim();
  }

  static Pmf point_mass(std::size_t k) {
    std::vector<double> p(k + 1, 0.0);
    p[k] = 1.0;
    return Pmf(std::move(p));
  }

  [[nodiscard]] std::span<const double> probs() const { return probs_; }
  [[nodiscard]] std::size_t size() const { return probs_.size(); }
  [[nodiscard]] std::size_t max_state() const { return probs_.size() - 1; }
  [[nodiscard]] double tail_mass() const { return tail_; }

  /// P(k) for tabulated k, zero beyond the table.
  [[nodiscard]] double operator[](std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }

  /// Mean over the tabulated part.
  [[nodiscard]] double mean() const {
    detail::CompensatedSum s;
    for (std::size_t k = 0; k < probs_.size(); ++k) s.add(static_cast<double>(k) * probs_[k]);
    return s.value();
  }

  [[nodiscard]] double tabulated_mass() const { return detail::compensated_sum(probs_); }

 private:
  struct unchecked_tag {};
  Pmf(unchecked_tag, std::vector<double> probs, double tail) : probs_(std::move(probs)), tail_(tail) {
    if (probs_.empty()) probs_.push_back(0.0);
    trim();
  }

  void trim() {
    while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
  }

  std::vector<double> probs_;
  double tail_ = 0.0;

  friend Pmf make_pmf_unchecked(std::vector<double> probs, double tail);
};

// For internal producers whose outputs are correct by construction; skips
// the O(K) validation pass.
inline Pmf make_pmf_unchecked(std::vector<double> probs, double tail) {
  for (double& p : probs) p = std::clamp(p, 0.0, 1.0);
  return Pmf(Pmf::unchecked_tag{}, std::move(probs), std::clamp(tail, 0.0, 1.0));
}

/// Poisson(mean) tabulated up to the smallest K whose upper tail is at most
/// `tail_budget`. The recorded tail is the directly summed mass beyond K.
inline Pmf poisson_pmf(double mean, double tail_budget = kDefaultTailBudget) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw invalid_parameter("poisson_pmf: mean must be positive");
  if (!(tail_budget > 0.0 && tail_budget < 1.0)) {
    throw invalid_parameter("poisson_pmf: tail_budget must lie in (0,1)");
  }
  const double log_mean = std::log(mean);
  std::vector<double> terms;
  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double term = std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    terms.push_back(term);
    if (kd > mean && term < 1e-300) break;
  }
  // suffix[k] = sum_{i >= k} terms[i], accumulated from the small end.
  std::vector<double> suffix(terms.size() + 1, 0.0);
  detail::CompensatedSum acc;
  for (std::size_t i = terms.size(); i-- > 0;) {
    acc.add(terms[i]);
    suffix[i] = acc.value();
  }
  std::size_t cut = 0;
  while (suffix[cut + 1] > tail_budget) ++cut;
  const double tail = suffix[cut + 1];
  terms.resize(cut + 1);
  return make_pmf_unchecked(std::move(terms), tail);
}

/// Binomial(n, p). `n == 0` or `p == 0` is the point mass at zero.
inline Pmf binomial_pmf(std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw invalid_parameter("binomial_pmf: p must lie in [0,1]");
  if (n == 0 || p == 0.0) return Pmf::point_mass(0);
  if (p == 1.0) return Pmf::point_mass(n);
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  std::vector<double> probs(n + 1);
  const double log_q0 = nd * std::log1p(-p);
  if (n <= 1000 && log_q0 > -700.0) {
    // Multiplicative recurrence from P(0) = q^n.
    probs[0] = std::pow(q, nd);
    const double ratio = p / q;
    for (std::uint64_t k = 1; k <= n; ++k) {
      probs[k] = probs[k - 1] * (static_cast<double>(n - k + 1) / static_cast<double>(k)) * ratio;
    }
  } else {
    // Ratio recurrences outward from the mode. The lgamma anchor carries a
    // relative error of order n * eps that every term shares, so dividing by
    // the total removes it.
    const auto mode = static_cast<std::uint64_t>(std::floor((nd + 1.0) * p));
    const std::uint64_t k0 = std::min(mode, n);
    const double k0d = static_cast<double>(k0);
    probs[k0] = std::exp(std::lgamma(nd + 1.0) - std::lgamma(k0d + 1.0) - std::lgamma(nd - k0d + 1.0) +
                         k0d * std::log(p) + (nd - k0d) * std::log1p(-p));
    const double ratio = p / q;
    for (std::uint64_t k = k0 + 1; k <= n; ++k) {
      probs[k] = probs[k - 1] * (static_cast<double>(n - k + 1) / static_cast<double>(k)) * ratio;
    }
    for (std::uint64_t k = k0; k-- > 0;) {
      probs[k] = probs[k + 1] * (static_cast<double>(k + 1) / static_cast<double>(n - k)) / ratio;
    }
    const double total = detail::compensated_sum(probs);
    for (double& x : probs) x /= total;
  }
  return make_pmf_unchecked(std::move(probs), 0.0);
}

/// Law of the sum of independent draws from `p` and `q`. Any pairing that
/// touches either tail lands in the result's tail.
inline Pmf convolve(const Pmf& p, const Pmf& q) {
  const auto a = p.probs();
  const auto b = q.probs();
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  const double tail = p.tail_mass() + q.tail_mass() - p.tail_mass() * q.tail_mass();
  return make_pmf_unchecked(std::move(out), tail);
}

/// Binomial thinning: the mixture sum_y p(y) Binomial(y, a).
inline Pmf thin(const Pmf& p, double a) {
  if (!(a > 0.0 && a < 1.0)) throw invalid_parameter("thin: a must lie in (0,1)");
  const auto src = p.probs();
  std::vector<double> out(src.size(), 0.0);
  for (std::size_t y = 0; y < src.size(); ++y) {
    if (src[y] == 0.0) continue;
    const Pmf row = binomial_pmf(y, a);
    const auto r = row.probs();
    for (std::size_t z = 0; z < r.size(); ++z) out[z] += src[y] * r[z];
  }
  return make_pmf_unchecked(std::move(out), p.tail_mass());
}

/// Upper bound on the total variation distance: half the L1 distance of the
/// tables plus both tails (each tail may sit anywhere beyond its table).
inline double total_variation(const Pmf& p, const Pmf& q) {
  const std::size_t n = std::max(p.size(), q.size());
  detail::CompensatedSum s;
  for (std::size_t k = 0; k < n; ++k) s.add(std::abs(p[k] - q[k]));
  return std::min(1.0, 0.5 * (s.value() + p.tail_mass() + q.tail_mass()));
}

/// Largest pointwise difference of the tables.
inline double sup_distance(const Pmf& p, const Pmf& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(p[k] - q[k]));
  return d;
}

}  // namespace inarlab

#pragma once

/// @file
/// Interlaced mixing coefficients on finite windows, the gap certificate
/// for indicator chains and exponential decay-rate fits.
///
/// rho*(X, n) is the supremum of rho(sigma(X_k, k in S), sigma(X_k, k in T))
/// over disjoint nonempty S, T at distance >= n. Here S and T range over a
/// finite window {0, ..., W-1}, so every value reported is a certified lower
/// bound on the infinite-window coefficient.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/chains.hpp"
#include "inarlab/dependence.hpp"
#include "inarlab/error.hpp"
#include "inarlab/parallel.hpp"
#include "inarlab/window.hpp"

namespace inarlab {

inline constexpr std::uint64_t kDefaultMaxWindowWidth = 8;

struct WindowSpec {
  std::uint64_t width = 0;
  std::vector<std::uint64_t> s;
  std::vector<std::uint64_t> t;
  std::uint64_t gap = 1;

  [[nodiscard]] std::uint64_t distance() const {
    std::uint64_t d = ~std::uint64_t{0};
    for (auto i : s) {
      for (auto j : t) d = std::min(d, i > j ? i - j : j - i);
    }
    return d;
  }

  void validate() const {
    detail::require(!s.empty() && !t.empty(), "WindowSpec: S and T must be nonempty");
    for (auto i : s) {
      detail::require(i < width, "WindowSpec: S index outside the window");
      detail::require(std::find(t.begin(), t.end(), i) == t.end(), "WindowSpec: S and T must be disjoint");
    }
    for (auto j : t) detail::require(j < width, "WindowSpec: T index outside the window");
    detail::require(distance() >= gap, "WindowSpec: dist(S, T) below the gap");
  }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// All unordered pairs {S, T} of disjoint nonempty subsets of {0..W-1}
/// with dist(S, T) >= n. Each pair is listed once, with the smallest index
/// of S u T in S; order is base-3 counting over index assignments.
inline std::vector<WindowSpec> enumerate_window_pairs(std::uint64_t width, std::uint64_t gap,
                                                      std::uint64_t max_width = kDefaultMaxWindowWidth) {
  detail::require(width >= 1, "enumerate_window_pairs: width must be positive");
  detail::require(gap >= 1, "enumerate_window_pairs: gap must be positive");
  if (width > max_width) {
    throw resource_limit("enumerate_window_pairs: window width " + std::to_string(width) + " exceeds the maximum " +
                         std::to_string(max_width));
  }
  std::vector<WindowSpec> out;
  if (width <= gap) return out;
  std::uint64_t total = 1;
  for (std::uint64_t i = 0; i < width; ++i) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    WindowSpec w{width, {}, {}, gap};
    std::uint64_t c = code;
    int first_owner = 0;
    for (std::uint64_t i = 0; i < width; ++i, c /= 3) {
      const auto digit = c % 3;
      if (digit == 1) w.s.push_back(i);
      if (digit == 2) w.t.push_back(i);
      if (digit != 0 && first_owner == 0) first_owner = static_cast<int>(digit);
    }
    if (w.s.empty() || w.t.empty() || first_owner != 1) continue;
    if (w.distance() < gap) continue;
    out.push_back(std::move(w));
  }
  return out;
}

namespace detail {

inline std::string tuple_label(std::span<const std::uint64_t> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(xs[i]);
  }
  return s;
}

}  // namespace detail

/// Joint law of (tuple at positions `s_pos`, tuple at positions `t_pos`) of
/// a window law; positions index into law.indices. The result is
/// renormalized over the tabulated mass (law.tail is reported separately).
inline JointPmf joint_from_window(const WindowLaw& law, std::span<const std::size_t> s_pos,
                                  std::span<const std::size_t> t_pos) {
  detail::require(!law.codes.empty(), "joint_from_window: window law has no atoms");
  const std::size_t w = law.width();
  std::vector<std::uint64_t> div(w, 1);
  for (std::size_t i = w - 1; i-- > 0;) div[i] = div[i + 1] * law.radix[i + 1];
  auto sub_code = [&](std::uint64_t code, std::span<const std::size_t> pos) {
    std::uint64_t c = 0;
    for (auto p : pos) c = c * law.radix[p] + (code / div[p]) % law.radix[p];
    return c;
  };
  std::vector<std::uint64_t> sc(law.codes.size());
  std::vector<std::uint64_t> tc(law.codes.size());
  for (std::size_t k = 0; k < law.codes.size(); ++k) {
    sc[k] = sub_code(law.codes[k], s_pos);
    tc[k] = sub_code(law.codes[k], t_pos);
  }
  auto unique_sorted = [](std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto rows = unique_sorted(sc);
  const auto cols = unique_sorted(tc);
  std::vector<double> m(rows.size() * cols.size(), 0.0);
  detail::CompensatedSum total;
  for (std::size_t k = 0; k < law.codes.size(); ++k) {
    const auto r = static_cast<std::size_t>(std::lower_bound(rows.begin(), rows.end(), sc[k]) - rows.begin());
    const auto c = static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), tc[k]) - cols.begin());
    m[r * cols.size() + c] += law.mass[k];
    total.add(law.mass[k]);
  }
  const double z = total.value();
  for (double& x : m) x /= z;
  auto labels = [&](const std::vector<std::uint64_t>& codes, std::span<const std::size_t> pos) {
    std::vector<std::string> out;
    out.reserve(codes.size());
    std::vector<std::uint64_t> digits(pos.size());
    for (auto code : codes) {
      for (std::size_t i = pos.size(); i-- > 0;) {
        digits[i] = code % law.radix[pos[i]];
        code /= law.radix[pos[i]];
      }
      out.push_back(detail::tuple_label(digits));
    }
    return out;
  };
  return JointPmf(labels(rows, s_pos), labels(cols, t_pos), std::move(m));
}

struct RhoStarResult {
  double value = 0.0;
  std::optional<WindowSpec> attaining;
  std::size_t pair_count = 0;
  double truncation_error = 0.0;
  bool vacuous = false;
};

struct RhoStarOptions {
  std::uint64_t atom_limit = kDefaultAtomLimit;
  std::uint64_t max_width = kDefaultMaxWindowWidth;
  unsigned threads = 1;
};

/// max over enumerated pairs of the maximal correlation between the S-tuple
/// and the T-tuple, from exact window laws truncated at `cap`.
inline RhoStarResult rho_star_window(const MarkovChainSpec& spec, std::uint64_t width, std::uint64_t gap,
                                     std::uint64_t cap, const RhoStarOptions& options = {}) {
  const auto pairs = enumerate_window_pairs(width, gap, options.max_width);
  RhoStarResult result;
  result.pair_count = pairs.size();
  if (pairs.empty()) {
    result.vacuous = true;
    return result;
  }
  std::vector<std::uint64_t> used;
  for (const auto& p : pairs) {
    used.insert(used.end(), p.s.begin(), p.s.end());
    used.insert(used.end(), p.t.begin(), p.t.end());
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  auto positions = [](const std::vector<std::uint64_t>& idx, const std::vector<std::uint64_t>& among) {
    std::vector<std::size_t> pos;
    for (auto i : idx) {
      pos.push_back(static_cast<std::size_t>(std::lower_bound(among.begin(), among.end(), i) - among.begin()));
    }
    return pos;
  };

  std::optional<WindowLaw> shared;
  try {
    shared = window_joint_pmf(spec, std::span<const std::uint64_t>(used), cap, options.atom_limit);
  } catch (const resource_limit&) {
    // Fall back to one (smaller) law per pair; those may still overflow.
  }

  std::vector<double> values(pairs.size(), 0.0);
  std::vector<double> tails(pairs.size(), 0.0);
  parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    const auto& p = pairs[i];
    if (shared) {
      const auto sp = positions(p.s, used);
      const auto tp = positions(p.t, used);
      values[i] = maximal_correlation(joint_from_window(*shared, sp, tp));
      tails[i] = shared->tail;
      return;
    }
    std::vector<std::uint64_t> own(p.s);
    own.insert(own.end(), p.t.begin(), p.t.end());
    std::sort(own.begin(), own.end());
    const WindowLaw law = window_joint_pmf(spec, std::span<const std::uint64_t>(own), cap, options.atom_limit);
    values[i] = maximal_correlation(joint_from_window(law, positions(p.s, own), positions(p.t, own)));
    tails[i] = law.tail;
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!result.attaining || values[i] > result.value) {
      result.value = values[i];
      result.attaining = pairs[i];
    }
    result.truncation_error = std::max(result.truncation_error, tails[i]);
  }
  return result;
}

struct RhoMarkovResult {
  double value = 0.0;
  double truncation_error = 0.0;
};

/// Maximal correlation of (X_0, X_n): for a Markov chain this is the
/// past/future coefficient at gap n.
inline RhoMarkovResult rho_markov(const MarkovChainSpec& spec, std::uint64_t n, std::uint64_t cap) {
  detail::require(n >= 1, "rho_markov: n must be positive");
  const std::vector<std::uint64_t> idx{0, n};
  const WindowLaw law = window_joint_pmf(spec, std::span<const std::uint64_t>(idx), cap);
  const std::vector<std::size_t> s{0};
  const std::vector<std::size_t> t{1};
  return {maximal_correlation(joint_from_window(law, s, t)), law.tail};
}

/// epsilon -> delta such that lambda <= delta forces rho <= epsilon.
struct DeltaBound {
  std::string name;
  std::function<double(double)> evaluate;

  double operator()(double epsilon) const { return evaluate(epsilon); }
};

/// delta(eps) = eps. Runnable placeholder, not a sharp bound.
inline DeltaBound identity_delta_bound() {
  return {"identity", [](double eps) { return eps; }};
}

class DeltaBoundRegistry {
 public:
  DeltaBoundRegistry() { add(identity_delta_bound()); }

  /// Registers `bound` after checking it is positive, at most 1 and
  /// nondecreasing on the grid eps = 0.01, 0.02, ..., 1.
  void add(DeltaBound bound) {
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double d = bound(k / 100.0);
      if (!(d > 0.0 && d <= 1.0) || d < prev) {
        throw invalid_parameter("DeltaBound '" + bound.name + "' is not monotone with values in (0,1]");
      }
      prev = d;
    }
    bounds_[bound.name] = std::move(bound);
  }

  [[nodiscard]] const DeltaBound& find(const std::string& name) const {
    const auto it = bounds_.find(name);
    if (it == bounds_.end()) throw invalid_parameter("unknown delta bound '" + name + "'");
    return it->second;
  }

  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : bounds_) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, DeltaBound> bounds_;
};

struct GapCertificate {
  double a = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  std::uint64_t m = 0;
  std::string bound_name;
};

// Relative slack when testing a^m <= gamma, so that exact ties such as
// 0.1^2 = 0.01 resolve to the smaller m despite rounding.
inline constexpr double kGapTieTolerance = 1e-12;

/// gamma = min(1/9, (delta/3)^2) with delta = bound(epsilon), and m the
/// smallest positive integer with a^m <= gamma.
inline GapCertificate gap_for_epsilon(double a, double epsilon, const DeltaBound& bound) {
  detail::require(a > 0.0 && a < 1.0, "gap_for_epsilon: a must lie in (0,1)");
  detail::require(epsilon > 0.0 && epsilon <= 1.0, "gap_for_epsilon: epsilon must lie in (0,1]");
  const double delta = bound(epsilon);
  if (!(delta > 0.0 && delta <= 1.0)) throw invalid_parameter("gap_for_epsilon: bound returned delta outside (0,1]");
  double gamma = std::min(1.0 / 9.0, (delta / 3.0) * (delta / 3.0));
  while (3.0 * std::sqrt(gamma) > delta) gamma = std::nextafter(gamma, 0.0);
  std::uint64_t m = 1;
  while (std::pow(a, static_cast<double>(m)) > gamma * (1.0 + kGapTieTolerance)) ++m;
  return {a, epsilon, delta, gamma, m, bound.name};
}

struct IndicatorBoundReport {
  GapCertificate certificate;
  RhoStarResult rho_star;
  double margin = 0.0;
  bool pass = false;
};

/// Exact finite-window rho* of the indicator chain at the certified gap m,
/// compared with epsilon.
inline IndicatorBoundReport verify_indicator_bound(double p0, double a, double epsilon, const DeltaBound& bound,
                                                   std::uint64_t width, const RhoStarOptions& options = {}) {
  IndicatorBoundReport r;
  r.certificate = gap_for_epsilon(a, epsilon, bound);
  r.rho_star = rho_star_window(indicator_chain_spec(p0, a), width, r.certificate.m, 1, options);
  r.margin = epsilon - r.rho_star.value;
  r.pass = r.rho_star.value <= epsilon;
  return r;
}

struct AbsorbingBoundReport {
  bool hypothesis_holds = false;
  std::string hypothesis_note;
  double lambda = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

inline constexpr std::uint64_t kAbsorbingMaxLength = 6;

/// For a window law of (X_1, ..., X_L) where 0 is absorbing and every step
/// enters 0 with conditional probability at least 1 - epsilon, checks
/// lambda(odd-indexed coordinates, even-indexed coordinates) <= 3 sqrt(epsilon).
/// A law violating the hypothesis yields hypothesis_holds = false and no
/// verdict.
inline AbsorbingBoundReport verify_absorbing_lambda_bound(const WindowLaw& law, double epsilon,
                                                          double tol = 1e-12) {
  AbsorbingBoundReport r;
  r.bound = 3.0 * std::sqrt(epsilon);
  const std::size_t len = law.width();
  if (len > kAbsorbingMaxLength) throw resource_limit("verify_absorbing_lambda_bound: at most 6 coordinates");
  if (!(epsilon > 0.0 && epsilon <= 1.0 / 9.0)) {
    r.hypothesis_note = "epsilon must lie in (0, 1/9]";
    return r;
  }
  if (len < 2) {
    r.hypothesis_note = "need at least two coordinates";
    return r;
  }
  std::vector<std::uint64_t> div(len, 1);
  for (std::size_t i = len - 1; i-- > 0;) div[i] = div[i + 1] * law.radix[i + 1];
  for (std::size_t n = 1; n < len; ++n) {
    // prefix (X_0..X_{n-1}) -> (mass, mass with X_n = 0)
    std::map<std::uint64_t, std::pair<double, double>> prefix;
    double prev_zero = 0.0;
    double prev_zero_next_zero = 0.0;
    for (std::size_t k = 0; k < law.codes.size(); ++k) {
      const std::uint64_t code = law.codes[k];
      const bool next_zero = (code / div[n]) % law.radix[n] == 0;
      auto& e = prefix[code / div[n - 1]];
      e.first += law.mass[k];
      if (next_zero) e.second += law.mass[k];
      if ((code / div[n - 1]) % law.radix[n - 1] == 0) {
        prev_zero += law.mass[k];
        if (next_zero) prev_zero_next_zero += law.mass[k];
      }
    }
    if (prev_zero > 0.0 && prev_zero_next_zero < prev_zero * (1.0 - tol)) {
      r.hypothesis_note = "0 is not absorbing at step " + std::to_string(n);
      return r;
    }
    for (const auto& [code, e] : prefix) {
      if (e.first > 0.0 && e.second < e.first * (1.0 - epsilon - tol)) {
        r.hypothesis_note = "conditional probability of entering 0 below 1 - epsilon at step " + std::to_string(n);
        return r;
      }
    }
  }
  r.hypothesis_holds = true;
  std::vector<std::size_t> odd;
  std::vector<std::size_t> even;
  // Coordinates are X_1..X_L: position 0 holds X_1.
  for (std::size_t i = 0; i < len; ++i) (i % 2 == 0 ? odd : even).push_back(i);
  r.lambda = lambda_coefficient(joint_from_window(law, odd, even));
  r.margin = r.bound - r.lambda;
  r.pass = r.lambda <= r.bound;
  return r;
}

struct DecayFit {
  double rate = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points_used = 0;
};

inline constexpr double kDecayFloor = 1e-13;

/// Least-squares fit of log(coefficient) = intercept + slope * n over points
/// with coefficient above kDecayFloor; rate = exp(slope).
inline DecayFit fit_decay_rate(std::span<const std::pair<double, double>> values) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, c] : values) {
    if (c > kDecayFloor && std::isfinite(c)) pts.emplace_back(n, std::log(c));
  }
  if (pts.size() < 3) throw insufficient_data("fit_decay_rate: fewer than 3 usable points");
  const double k = static_cast<double>(pts.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw insufficient_data("fit_decay_rate: all points share one n");
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.rate = std::exp(fit.slope);
  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points_used = pts.size();
  return fit;
}

inline DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& values) {
  return fit_decay_rate(std::span<const std::pair<double, double>>(values));
}

}  // namespace inarlab

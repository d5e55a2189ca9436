#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "inarlab/pmf.hpp"

namespace inarlab::stats {

inline constexpr double kMinExpectedCount = 5.0;

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  bool impossible_observation = false;  // a count landed where the null puts zero mass
};

inline double chi_square_upper_tail(double statistic, std::size_t df) {
  if (df == 0) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  const boost::math::chi_squared dist(static_cast<double>(df));
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

/// Goodness of fit of the counts (counts[k] = #observations equal to k)
/// against `law`. Adjacent cells are pooled left to right until each pooled
/// cell expects at least kMinExpectedCount observations; the untabulated
/// tail of `law` joins the last cell.
inline ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, const Pmf& law) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  ChiSquareResult r;
  if (n == 0.0) return r;
  const std::size_t cells = std::max(counts.size(), law.size());
  std::vector<double> expected(cells);
  std::vector<double> observed(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    expected[k] = n * law[k];
    observed[k] = k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
  }
  expected.back() += n * law.tail_mass();
  for (std::size_t k = 0; k < cells; ++k) {
    if (expected[k] == 0.0 && observed[k] > 0.0) {
      r.impossible_observation = true;
      r.statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
      return r;
    }
  }
  std::vector<double> pe;
  std::vector<double> po;
  double ae = 0.0;
  double ao = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    ae += expected[k];
    ao += observed[k];
    if (ae >= kMinExpectedCount) {
      pe.push_back(ae);
      po.push_back(ao);
      ae = ao = 0.0;
    }
  }
  if (ae > 0.0 || ao > 0.0) {
    if (pe.empty()) {
      pe.push_back(ae);
      po.push_back(ao);
    } else {
      pe.back() += ae;
      po.back() += ao;
    }
  }
  for (std::size_t i = 0; i < pe.size(); ++i) r.statistic += (po[i] - pe[i]) * (po[i] - pe[i]) / pe[i];
  r.df = pe.size() - 1;
  r.p_value = chi_square_upper_tail(r.statistic, r.df);
  return r;
}

/// Contiguous value bins each holding at least `min_share` of the sample.
inline std::map<std::uint64_t, std::size_t> pooled_bins(std::span<const std::uint64_t> values, double min_share) {
  std::map<std::uint64_t, std::uint64_t> freq;
  for (auto v : values) ++freq[v];
  const double need = min_share * static_cast<double>(values.size());
  std::map<std::uint64_t, std::size_t> bin;
  std::size_t current = 0;
  double acc = 0.0;
  std::vector<std::uint64_t> pending;
  for (const auto& [v, c] : freq) {
    pending.push_back(v);
    acc += static_cast<double>(c);
    if (acc >= need) {
      for (auto p : pending) bin[p] = current;
      ++current;
      pending.clear();
      acc = 0.0;
    }
  }
  // Leftover values join the last complete bin.
  const std::size_t last = current == 0 ? 0 : current - 1;
  for (auto p : pending) bin[p] = last;
  return bin;
}

/// Pearson chi-square test of independence between paired samples. Values
/// are pooled into contiguous bins holding at least max(1%, sqrt(10/n)) of
/// the sample each, which keeps every expected cell count >= 10. A side
/// with a single bin gives df = 0 and p = 1.
inline ChiSquareResult chi_square_independence(std::span<const std::uint64_t> xs, std::span<const std::uint64_t> ys) {
  ChiSquareResult r;
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n == 0) return r;
  const double share = std::max(0.01, std::sqrt(10.0 / static_cast<double>(n)));
  const auto bx = pooled_bins(xs.first(n), share);
  const auto by = pooled_bins(ys.first(n), share);
  std::size_t rx = 0;
  std::size_t ry = 0;
  for (const auto& [v, b] : bx) rx = std::max(rx, b + 1);
  for (const auto& [v, b] : by) ry = std::max(ry, b + 1);
  if (rx < 2 || ry < 2) return r;
  std::vector<double> table(rx * ry, 0.0);
  std::vector<double> row(rx, 0.0);
  std::vector<double> col(ry, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = bx.at(xs[i]);
    const auto b = by.at(ys[i]);
    table[a * ry + b] += 1.0;
    row[a] += 1.0;
    col[b] += 1.0;
  }
  const double nd = static_cast<double>(n);
  for (std::size_t a = 0; a < rx; ++a) {
    for (std::size_t b = 0; b < ry; ++b) {
      const double e = row[a] * col[b] / nd;
      const double d = table[a * ry + b] - e;
      r.statistic += d * d / e;
    }
  }
  r.df = (rx - 1) * (ry - 1);
  r.p_value = chi_square_upper_tail(r.statistic, r.df);
  return r;
}

}  // namespace inarlab::stats

#pragma once

/// @file
/// Exact joint laws of a Markov chain observed at finitely many times.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/chains.hpp"
#include "inarlab/error.hpp"
#include "inarlab/pmf.hpp"

namespace inarlab {

inline constexpr std::uint64_t kDefaultAtomLimit = 2'000'000;

/// Sparse joint law of (X_i, i in indices). Atoms are tuple codes in mixed
/// radix (first index most significant), stored in ascending order; only
/// atoms with positive mass are kept. `tail` bounds the mass lost to
/// truncation at the per-coordinate cap.
struct WindowLaw {
  std::vector<std::uint64_t> indices;
  std::vector<std::uint64_t> radix;
  std::vector<std::uint64_t> codes;
  std::vector<double> mass;
  double tail = 0.0;

  [[nodiscard]] std::size_t width() const { return indices.size(); }
  [[nodiscard]] std::size_t atom_count() const { return codes.size(); }

  [[nodiscard]] std::vector<std::uint64_t> decode(std::uint64_t code) const {
    std::vector<std::uint64_t> t(radix.size());
    for (std::size_t i = radix.size(); i-- > 0;) {
      t[i] = code % radix[i];
      code /= radix[i];
    }
    return t;
  }

  /// Marginal law of coordinate `pos` (a position into `indices`).
  [[nodiscard]] Pmf coordinate_marginal(std::size_t pos) const {
    std::vector<double> out(radix.at(pos), 0.0);
    std::uint64_t below = 1;
    for (std::size_t i = pos + 1; i < radix.size(); ++i) below *= radix[i];
    for (std::size_t k = 0; k < codes.size(); ++k) out[(codes[k] / below) % radix[pos]] += mass[k];
    return make_pmf_unchecked(std::move(out), tail);
  }
};

namespace detail {

// Kernel rows 0..cap with everything above the cap folded into the tail.
class TruncatedKernel {
 public:
  TruncatedKernel(const MarkovChainSpec& spec, std::uint64_t cap) : cap_(cap) {
    rows_.reserve(cap + 1);
    loss_.reserve(cap + 1);
    for (std::uint64_t x = 0; x <= cap; ++x) {
      const Pmf r = spec.kernel(x);
      const auto p = r.probs();
      std::vector<double> row(std::min<std::size_t>(p.size(), cap + 1));
      std::copy_n(p.begin(), row.size(), row.begin());
      CompensatedSum lost;
      lost.add(r.tail_mass());
      for (std::size_t y = row.size(); y < p.size(); ++y) lost.add(p[y]);
      rows_.push_back(std::move(row));
      loss_.push_back(lost.value());
    }
  }

  [[nodiscard]] std::uint64_t cap() const { return cap_; }
  [[nodiscard]] const std::vector<double>& row(std::uint64_t x) const { return rows_[x]; }
  [[nodiscard]] double loss(std::uint64_t x) const { return loss_[x]; }

  // d-step rows by repeated one-step products.
  [[nodiscard]] TruncatedKernel power(std::uint64_t d) const {
    TruncatedKernel out = *this;
    for (std::uint64_t step = 1; step < d; ++step) {
      for (std::uint64_t x = 0; x <= cap_; ++x) {
        std::vector<double> next(cap_ + 1, 0.0);
        double lost = out.loss_[x];
        const auto& cur = out.rows_[x];
        for (std::size_t y = 0; y < cur.size(); ++y) {
          if (cur[y] == 0.0) continue;
          const auto& r = rows_[y];
          for (std::size_t z = 0; z < r.size(); ++z) next[z] += cur[y] * r[z];
          lost += cur[y] * loss_[y];
        }
        while (next.size() > 1 && next.back() == 0.0) next.pop_back();
        out.rows_[x] = std::move(next);
        out.loss_[x] = lost;
      }
    }
    return out;
  }

  // One step applied to a truncated law; returns the extra loss.
  double apply(std::vector<double>& law) const {
    std::vector<double> next(cap_ + 1, 0.0);
    double lost = 0.0;
    for (std::size_t x = 0; x < law.size(); ++x) {
      if (law[x] == 0.0) continue;
      const auto& r = rows_[x];
      for (std::size_t y = 0; y < r.size(); ++y) next[y] += law[x] * r[y];
      lost += law[x] * loss_[x];
    }
    law = std::move(next);
    return lost;
  }

 private:
  std::uint64_t cap_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> loss_;
};

inline std::uint64_t support_size(std::span<const double> law) {
  std::uint64_t n = law.size();
  while (n > 1 && law[n - 1] == 0.0) --n;
  return n;
}

}  // namespace detail

/// Exact joint law of (X_i, i in indices) for a strictly increasing index
/// list, truncating every coordinate at `cap`. Throws resource_limit when
/// the product of per-coordinate support sizes exceeds `atom_limit`.
inline WindowLaw window_joint_pmf(const MarkovChainSpec& spec, std::span<const std::uint64_t> indices,
                                  std::uint64_t cap, std::uint64_t atom_limit = kDefaultAtomLimit) {
  detail::require(!indices.empty(), "window_joint_pmf: empty index list");
  detail::require(cap >= 1, "window_joint_pmf: cap must be positive");
  for (std::size_t i = 1; i < indices.size(); ++i) {
    detail::require(indices[i] > indices[i - 1], "window_joint_pmf: indices must be strictly increasing");
  }
  const detail::TruncatedKernel step(spec, cap);

  // Truncated marginals at every requested index fix the alphabets.
  // Dropped mass is summed directly; 1 - (kept mass) cannot resolve tails
  // below the rounding level of 1.
  detail::CompensatedSum lost;
  std::vector<double> law(cap + 1, 0.0);
  {
    const auto p = spec.initial().probs();
    lost.add(spec.initial().tail_mass());
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (x <= cap) {
        law[x] = p[x];
      } else {
        lost.add(p[x]);
      }
    }
  }
  WindowLaw out;
  out.indices.assign(indices.begin(), indices.end());
  std::vector<double> first_marginal;
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    while (t < indices[i]) {
      const double l = step.apply(law);
      // Later losses are charged per atom below, through the d-step rows.
      if (i == 0) lost.add(l);
      ++t;
    }
    if (i == 0) first_marginal = law;
    out.radix.push_back(detail::support_size(law));
  }
  double atoms = 1.0;
  for (auto r : out.radix) atoms *= static_cast<double>(r);
  if (atoms > static_cast<double>(atom_limit)) {
    throw resource_limit("window_joint_pmf: window needs " + std::to_string(static_cast<long double>(atoms)) +
                         " atoms, above the limit of " + std::to_string(atom_limit) +
                         "; shrink the window or the cap");
  }

  struct Entry {
    std::uint64_t code;
    std::uint64_t state;
    double mass;
  };
  std::vector<Entry> layer;
  for (std::uint64_t x = 0; x < out.radix[0]; ++x) {
    if (first_marginal[x] > 0.0) layer.push_back({x, x, first_marginal[x]});
  }
  std::map<std::uint64_t, detail::TruncatedKernel> powers;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const std::uint64_t d = indices[i] - indices[i - 1];
    auto it = powers.find(d);
    if (it == powers.end()) it = powers.emplace(d, step.power(d)).first;
    const auto& kd = it->second;
    const std::uint64_t r = out.radix[i];
    std::vector<Entry> next;
    next.reserve(layer.size() * 2);
    for (const auto& e : layer) {
      const auto& row = kd.row(e.state);
      lost.add(e.mass * kd.loss(e.state));
      for (std::uint64_t y = 0; y < row.size(); ++y) {
        if (row[y] == 0.0) continue;
        if (y >= r) {
          lost.add(e.mass * row[y]);
          continue;
        }
        next.push_back({e.code * r + y, y, e.mass * row[y]});
      }
    }
    layer = std::move(next);
  }
  out.codes.reserve(layer.size());
  out.mass.reserve(layer.size());
  for (const auto& e : layer) {
    out.codes.push_back(e.code);
    out.mass.push_back(e.mass);
  }
  out.tail = std::max(0.0, lost.value());
  return out;
}

inline WindowLaw window_joint_pmf(const MarkovChainSpec& spec, std::initializer_list<std::uint64_t> indices,
                                  std::uint64_t cap, std::uint64_t atom_limit = kDefaultAtomLimit) {
  const std::vector<std::uint64_t> v(indices);
  return window_joint_pmf(spec, std::span<const std::uint64_t>(v), cap, atom_limit);
}

/// Contiguous window 0..width-1.
inline WindowLaw window_law_contiguous(const MarkovChainSpec& spec, std::uint64_t width, std::uint64_t cap,
                                       std::uint64_t atom_limit = kDefaultAtomLimit) {
  std::vector<std::uint64_t> idx(width);
  for (std::uint64_t i = 0; i < width; ++i) idx[i] = i;
  return window_joint_pmf(spec, std::span<const std::uint64_t>(idx), cap, atom_limit);
}

}  // namespace inarlab

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "inarlab/error.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/rng.hpp"

namespace inarlab {

inline constexpr double kDefaultSamplingThreshold = 1e-12;

// Inverse-CDF sampler over a tabulated Pmf. A uniform that lands in the
// untabulated tail (probability <= threshold) returns the last tabulated
// state.
class CdfTable {
 public:
  CdfTable() = default;

  explicit CdfTable(const Pmf& pmf, double threshold = kDefaultSamplingThreshold) {
    if (pmf.tail_mass() > threshold) {
      throw refuse_to_sample("sample: tail mass exceeds the sampling threshold");
    }
    const auto p = pmf.probs();
    cdf_.resize(p.size());
    detail::CompensatedSum s;
    for (std::size_t k = 0; k < p.size(); ++k) {
      s.add(p[k]);
      cdf_[k] = s.value();
    }
  }

  [[nodiscard]] std::uint64_t draw(Engine& engine) const {
    const double u = uniform01(engine);
    // Most laws here concentrate on small states, so a forward scan beats
    // bisection for the common case.
    if (cdf_.size() <= 32) {
      for (std::size_t k = 0; k < cdf_.size(); ++k) {
        if (u < cdf_[k]) return k;
      }
      return cdf_.size() - 1;
    }
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::uint64_t>(it - cdf_.begin());
  }

  [[nodiscard]] bool empty() const { return cdf_.empty(); }

 private:
  std::vector<double> cdf_;
};

/// `count` i.i.d. draws from `p`, a pure function of (p, seed, count).
inline std::vector<std::uint64_t> sample(const Pmf& p, const SeedSpec& seed, std::size_t count,
                                         double threshold = kDefaultSamplingThreshold) {
  if (count == 0) throw invalid_parameter("sample: count must be positive");
  const CdfTable table(p, threshold);
  Engine engine = make_engine(seed);
  std::vector<std::uint64_t> out(count);
  for (auto& x : out) x = table.draw(engine);
  return out;
}

// Binomial(n, a) draw as a sum of n Bernoulli trials.
inline std::uint64_t draw_binomial(Engine& engine, std::uint64_t n, double a) {
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i < n; ++i) s += uniform01(engine) < a ? 1 : 0;
  return s;
}

}  // namespace inarlab

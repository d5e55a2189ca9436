#pragma once

/// @file
/// Seeded path simulation: generic Markov chains, the indicator chain, and
/// the two INAR(1) constructions (direct thinning recursion and the
/// superposition of independent Poisson-start death chains).
///
/// Path i always draws from stream path_stream(seed, i), so an ensemble is
/// bitwise identical for any thread count.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "inarlab/chains.hpp"
#include "inarlab/error.hpp"
#include "inarlab/parallel.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/rng.hpp"
#include "inarlab/sampling.hpp"

namespace inarlab {

struct PathEnsemble {
  std::size_t n_paths = 0;
  std::size_t length = 0;
  std::vector<std::uint64_t> values;  // row-major, n_paths x length
  SeedSpec seed;
  std::string construction;
  ParamMap params;

  PathEnsemble() = default;
  PathEnsemble(std::size_t paths, std::size_t len, SeedSpec s, std::string name, ParamMap p)
      : n_paths(paths), length(len), values(paths * len, 0), seed(s), construction(std::move(name)), params(std::move(p)) {}

  [[nodiscard]] std::uint64_t at(std::size_t path, std::size_t k) const { return values[path * length + k]; }
  std::uint64_t& at(std::size_t path, std::size_t k) { return values[path * length + k]; }
  [[nodiscard]] std::span<const std::uint64_t> path(std::size_t i) const {
    return std::span<const std::uint64_t>(values).subspan(i * length, length);
  }
  friend bool operator==(const PathEnsemble&, const PathEnsemble&) = default;
};

/// One path of X_k = U_k + V_k with its thinned part U and innovation V.
struct InnovationDecomposition {
  std::vector<std::uint64_t> x;
  std::vector<std::uint64_t> u;
  std::vector<std::uint64_t> v;
};

/// Ensemble of X paths plus aligned U and V matrices of the same shape.
struct DecomposedEnsemble {
  PathEnsemble x;
  std::vector<std::uint64_t> u;
  std::vector<std::uint64_t> v;

  [[nodiscard]] std::uint64_t u_at(std::size_t path, std::size_t k) const { return u[path * x.length + k]; }
  [[nodiscard]] std::uint64_t v_at(std::size_t path, std::size_t k) const { return v[path * x.length + k]; }

  [[nodiscard]] InnovationDecomposition decomposition(std::size_t path) const {
    const auto b = static_cast<std::ptrdiff_t>(path * x.length);
    const auto e = b + static_cast<std::ptrdiff_t>(x.length);
    const auto xs = x.path(path);
    return {{xs.begin(), xs.end()}, {u.begin() + b, u.begin() + e}, {v.begin() + b, v.begin() + e}};
  }
};

struct SimulationOptions {
  unsigned threads = 1;
  double sampling_threshold = kDefaultSamplingThreshold;
};

namespace detail {

inline void check_shape(std::size_t length, std::size_t n_paths) {
  require(length >= 1, "simulate: length must be positive");
  require(n_paths >= 1, "simulate: n_paths must be positive");
}

}  // namespace detail

/// i.i.d. paths of the chain described by `spec`.
inline PathEnsemble simulate_chain(const MarkovChainSpec& spec, std::size_t length, std::size_t n_paths,
                                   const SeedSpec& seed, const SimulationOptions& options = {}) {
  detail::check_shape(length, n_paths);
  const CdfTable init(spec.initial(), options.sampling_threshold);
  std::vector<CdfTable> rows;
  rows.reserve(spec.state_cap() + 1);
  for (std::uint64_t x = 0; x <= spec.state_cap(); ++x) rows.emplace_back(spec.row(x), options.sampling_threshold);

  PathEnsemble out(n_paths, length, seed, spec.name(), spec.params());
  parallel_for(n_paths, options.threads, [&](std::size_t i) {
    Engine engine = make_engine(path_stream(seed, i));
    std::uint64_t x = init.draw(engine);
    out.at(i, 0) = x;
    for (std::size_t k = 1; k < length; ++k) {
      x = x <= spec.state_cap() ? rows[x].draw(engine)
                                : CdfTable(spec.kernel(x), options.sampling_threshold).draw(engine);
      out.at(i, k) = x;
    }
  });
  return out;
}

/// zeta_0 ~ Bernoulli(p0), zeta_k = zeta_{k-1} * eta_k with eta_k ~ Bernoulli(a).
inline PathEnsemble indicator_chain(double p0, double a, std::size_t length, std::size_t n_paths,
                                    const SeedSpec& seed, const SimulationOptions& options = {}) {
  detail::require(p0 >= 0.0 && p0 <= 1.0, "indicator_chain: p0 must lie in [0,1]");
  detail::require(a > 0.0 && a < 1.0, "indicator_chain: a must lie in (0,1)");
  detail::check_shape(length, n_paths);
  PathEnsemble out(n_paths, length, seed, "indicator", {{"p0", p0}, {"a", a}});
  parallel_for(n_paths, options.threads, [&](std::size_t i) {
    Engine engine = make_engine(path_stream(seed, i));
    std::uint64_t z = uniform01(engine) < p0 ? 1 : 0;
    out.at(i, 0) = z;
    for (std::size_t k = 1; k < length; ++k) {
      const std::uint64_t eta = uniform01(engine) < a ? 1 : 0;
      z *= eta;
      out.at(i, k) = z;
    }
  });
  return out;
}

/// X_{-1} ~ Poisson(lambda/(1-a)); then for k >= 0, U_k ~ Binomial(X_{k-1}, a),
/// V_k ~ Poisson(lambda) independently, X_k = U_k + V_k.
inline DecomposedEnsemble simulate_inar_direct(const InarParams& params, std::size_t length, std::size_t n_paths,
                                               const SeedSpec& seed, const SimulationOptions& options = {}) {
  params.validate();
  detail::check_shape(length, n_paths);
  const CdfTable stationary(poisson_pmf(params.stationary_mean(), options.sampling_threshold),
                            options.sampling_threshold);
  const CdfTable innovation(poisson_pmf(params.lambda, options.sampling_threshold), options.sampling_threshold);
  DecomposedEnsemble out{PathEnsemble(n_paths, length, seed, "direct", params.to_map()),
                         std::vector<std::uint64_t>(n_paths * length), std::vector<std::uint64_t>(n_paths * length)};
  parallel_for(n_paths, options.threads, [&](std::size_t i) {
    Engine engine = make_engine(path_stream(seed, i));
    std::uint64_t prev = stationary.draw(engine);
    for (std::size_t k = 0; k < length; ++k) {
      const std::uint64_t u = draw_binomial(engine, prev, params.a);
      const std::uint64_t v = innovation.draw(engine);
      out.u[i * length + k] = u;
      out.v[i * length + k] = v;
      out.x.at(i, k) = u + v;
      prev = u + v;
    }
  });
  return out;
}

/// Truncation of the superposition sum X_k = sum_{j >= 0} Y^{(k-j)}_j to
/// j < depth. Chains Y^{(l)} for l in [-warmup, length) are simulated.
struct SuperpositionConfig {
  std::uint64_t depth = 1;
  std::uint64_t warmup = 1;
  double tail_budget = kDefaultTailBudget;

  /// Mean mass of the neglected terms of one X_k: lambda a^depth / (1 - a).
  [[nodiscard]] static double neglected_mean(const InarParams& p, std::uint64_t depth) {
    return p.lambda * std::pow(p.a, static_cast<double>(depth)) / (1.0 - p.a);
  }

  /// Smallest depth meeting the budget, with warmup = depth - 1 (at least 1).
  [[nodiscard]] static SuperpositionConfig for_budget(const InarParams& p, double budget = kDefaultTailBudget) {
    p.validate();
    detail::require(budget > 0.0 && budget < 1.0, "SuperpositionConfig: budget must lie in (0,1)");
    std::uint64_t depth = 1;
    while (neglected_mean(p, depth) > budget) ++depth;
    return {depth, std::max<std::uint64_t>(1, depth - 1), budget};
  }

  void validate(const InarParams& p) const {
    if (depth < 1) throw invalid_config("SuperpositionConfig: depth must be positive");
    if (warmup < 1 || warmup + 1 < depth) {
      throw invalid_config("SuperpositionConfig: warmup must cover depth - 1 chains before the window");
    }
    if (!(tail_budget > 0.0)) throw invalid_config("SuperpositionConfig: tail_budget must be positive");
    if (neglected_mean(p, depth) > tail_budget) {
      throw invalid_config("SuperpositionConfig: lambda a^J / (1 - a) exceeds the tail budget");
    }
  }
};

/// X_k = sum_{j < J} Y^{(k-j)}_j, U_k = sum_{1 <= j < J} Y^{(k-j)}_j,
/// V_k = Y^{(k)}_0 over independent Poisson(lambda)-start death chains.
inline DecomposedEnsemble simulate_inar_superposition(const InarParams& params, const SuperpositionConfig& config,
                                                      std::size_t length, std::size_t n_paths, const SeedSpec& seed,
                                                      const SimulationOptions& options = {}) {
  params.validate();
  config.validate(params);
  detail::check_shape(length, n_paths);
  const CdfTable start(poisson_pmf(params.lambda, options.sampling_threshold), options.sampling_threshold);
  ParamMap p = params.to_map();
  p["depth"] = static_cast<double>(config.depth);
  p["warmup"] = static_cast<double>(config.warmup);
  p["tail_budget"] = config.tail_budget;
  DecomposedEnsemble out{PathEnsemble(n_paths, length, seed, "superposition", std::move(p)),
                         std::vector<std::uint64_t>(n_paths * length), std::vector<std::uint64_t>(n_paths * length)};
  const auto first = -static_cast<std::int64_t>(config.warmup);
  const auto len = static_cast<std::int64_t>(length);
  const auto depth = static_cast<std::int64_t>(config.depth);
  parallel_for(n_paths, options.threads, [&](std::size_t i) {
    Engine engine = make_engine(path_stream(seed, i));
    const std::size_t base = i * length;
    for (std::int64_t ell = first; ell < len; ++ell) {
      std::uint64_t y = start.draw(engine);
      if (ell >= 0) {
        out.v[base + static_cast<std::size_t>(ell)] = y;
        out.x.values[base + static_cast<std::size_t>(ell)] += y;
      }
      for (std::int64_t j = 1; j < depth && ell + j < len && y > 0; ++j) {
        y = draw_binomial(engine, y, params.a);
        const std::int64_t k = ell + j;
        if (k < 0) continue;
        out.u[base + static_cast<std::size_t>(k)] += y;
        out.x.values[base + static_cast<std::size_t>(k)] += y;
      }
    }
  });
  return out;
}

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_metadata(std::ostream& os, const PathEnsemble& e, const std::vector<std::string>& extra) {
  os << "# construction: " << e.construction << '\n';
  os << "# params:";
  for (const auto& [k, v] : e.params) os << ' ' << k << '=' << format_double(v);
  os << '\n';
  os << "# seed: root=" << e.seed.root_seed << " stream=" << e.seed.stream_index << '\n';
  os << "# n_paths: " << e.n_paths << '\n';
  os << "# length: " << e.length << '\n';
  for (const auto& line : extra) os << "# " << line << '\n';
}

}  // namespace detail

/// `#` metadata lines (plus one per `extra` entry), a header row
/// t0..t{L-1}, then one row per path.
inline void write_paths_csv(std::ostream& os, const PathEnsemble& e, const std::vector<std::string>& extra = {}) {
  detail::write_metadata(os, e, extra);
  for (std::size_t k = 0; k < e.length; ++k) os << (k ? "," : "") << 't' << k;
  os << '\n';
  for (std::size_t i = 0; i < e.n_paths; ++i) {
    for (std::size_t k = 0; k < e.length; ++k) os << (k ? "," : "") << e.at(i, k);
    os << '\n';
  }
}

/// Same metadata, header path,series,t0..; two rows (u, v) per path.
inline void write_decomposition_csv(std::ostream& os, const DecomposedEnsemble& d,
                                    const std::vector<std::string>& extra = {}) {
  const auto& e = d.x;
  detail::write_metadata(os, e, extra);
  os << "path,series";
  for (std::size_t k = 0; k < e.length; ++k) os << ",t" << k;
  os << '\n';
  for (std::size_t i = 0; i < e.n_paths; ++i) {
    os << i << ",u";
    for (std::size_t k = 0; k < e.length; ++k) os << ',' << d.u_at(i, k);
    os << '\n' << i << ",v";
    for (std::size_t k = 0; k < e.length; ++k) os << ',' << d.v_at(i, k);
    os << '\n';
  }
}

}  // namespace inarlab

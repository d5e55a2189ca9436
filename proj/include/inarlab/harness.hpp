#pragma once

/// @file
/// Verification campaign: Monte Carlo checks of the structural conditions
/// of the INAR(1) model on both constructions, exact checks of stationarity,
/// the Markov-triplet properties and the mixing lemmas, and negative
/// controls that must fail.
///
/// Every report carries its statistic, threshold and comparison, so the
/// pass flag can be recomputed from the report alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "inarlab/chains.hpp"
#include "inarlab/dependence.hpp"
#include "inarlab/error.hpp"
#include "inarlab/mixing.hpp"
#include "inarlab/parallel.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/rng.hpp"
#include "inarlab/sampling.hpp"
#include "inarlab/simulate.hpp"
#include "inarlab/stats.hpp"
#include "inarlab/window.hpp"

namespace inarlab {

enum class Provenance { exact, monte_carlo };

/// How the statistic is compared with the threshold for a pass.
enum class Comparison { at_most, at_least, below, above };

inline const char* to_string(Provenance p) { return p == Provenance::exact ? "exact" : "monte-carlo"; }

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::at_most:
      return "<=";
    case Comparison::at_least:
      return ">=";
    case Comparison::below:
      return "<";
    case Comparison::above:
      return ">";
  }
  return "?";
}

inline bool compare(double statistic, Comparison c, double threshold) {
  switch (c) {
    case Comparison::at_most:
      return statistic <= threshold;
    case Comparison::at_least:
      return statistic >= threshold;
    case Comparison::below:
      return statistic < threshold;
    case Comparison::above:
      return statistic > threshold;
  }
  return false;
}

struct CheckReport {
  std::string check;
  std::string construction;
  ParamMap params;
  double statistic = 0.0;
  double threshold = 0.0;
  Comparison comparison = Comparison::at_most;
  bool pass = false;
  Provenance provenance = Provenance::exact;
  std::optional<SeedSpec> seed;  // set iff provenance is monte-carlo
  double budget = 0.0;           // truncation mass consumed by the computation
  std::string note;

  [[nodiscard]] bool recomputed_pass() const { return compare(statistic, comparison, threshold); }
};

inline CheckReport make_report(std::string check, std::string construction, ParamMap params, double statistic,
                               Comparison comparison, double threshold, Provenance provenance,
                               std::optional<SeedSpec> seed = std::nullopt, double budget = 0.0,
                               std::string note = {}) {
  CheckReport r;
  r.check = std::move(check);
  r.construction = std::move(construction);
  r.params = std::move(params);
  r.statistic = statistic;
  r.comparison = comparison;
  r.threshold = threshold;
  r.pass = compare(statistic, comparison, threshold);
  r.provenance = provenance;
  r.seed = seed;
  r.budget = budget;
  r.note = std::move(note);
  return r;
}

/// A negative control passes when the wrapped check fails.
inline CheckReport as_control(CheckReport r, const std::string& name) {
  r.check = "control/" + name;
  switch (r.comparison) {
    case Comparison::at_most:
      r.comparison = Comparison::above;
      break;
    case Comparison::at_least:
      r.comparison = Comparison::below;
      break;
    case Comparison::below:
      r.comparison = Comparison::at_least;
      break;
    case Comparison::above:
      r.comparison = Comparison::at_most;
      break;
  }
  r.pass = r.recomputed_pass();
  return r;
}

inline constexpr std::size_t kMinPathsForDistributionalChecks = 10'000;
inline constexpr std::size_t kMinStratumCount = 200;
inline constexpr double kDefaultSignificance = 0.01;
inline constexpr double kExactTolerance = 1e-10;
inline constexpr double kTripletTolerance = 1e-10;
inline constexpr double kNonMarkovFloor = 1e-3;
inline constexpr double kDecayRateTolerance = 0.01;

struct McConfig {
  std::size_t n_paths = 100'000;
  std::size_t path_length = 4;
  SeedSpec seed{20240917, 0};
  double significance = kDefaultSignificance;
  double truncation_budget = kDefaultTailBudget;
  std::vector<double> grid_a{0.3, 0.5, 0.7};
  std::vector<double> grid_lambda{0.5, 1.0, 2.0};
  std::vector<std::uint64_t> equivalence_window{0, 1};
  unsigned threads = 1;
  /// "none", or a corruption injected into the superposition ensembles of
  /// the main checks: "innovation" (V'_k = V_k + 1{X_{k-1} > mean}) or
  /// "parameter" (simulated with a + 0.1).
  std::string corruption = "none";
  bool mixing_checks = true;

  void validate() const {
    if (n_paths < kMinPathsForDistributionalChecks) {
      throw invalid_config("McConfig: n_paths must be at least 10000 for distributional checks");
    }
    if (path_length < 2) throw invalid_config("McConfig: path_length must be at least 2");
    if (!(significance > 0.0 && significance < 1.0)) throw invalid_config("McConfig: significance must lie in (0,1)");
    if (!(truncation_budget > 0.0 && truncation_budget < 1e-6)) {
      throw invalid_config("McConfig: truncation_budget must lie in (0, 1e-6)");
    }
    if (grid_a.empty() || grid_lambda.empty()) throw invalid_config("McConfig: empty parameter grid");
    for (double a : grid_a) {
      if (!(a > 0.0 && a < 1.0)) throw invalid_config("McConfig: grid a values must lie in (0,1)");
    }
    for (double l : grid_lambda) {
      if (!(l > 0.0 && std::isfinite(l))) throw invalid_config("McConfig: grid lambda values must be positive");
    }
    if (equivalence_window.empty() || !std::is_sorted(equivalence_window.begin(), equivalence_window.end()) ||
        std::adjacent_find(equivalence_window.begin(), equivalence_window.end()) != equivalence_window.end()) {
      throw invalid_config("McConfig: equivalence_window must be strictly increasing");
    }
    if (equivalence_window.back() - equivalence_window.front() >= 4 || equivalence_window.back() >= path_length) {
      throw invalid_config("McConfig: equivalence_window must span at most 4 steps inside the path");
    }
    if (threads < 1) throw invalid_config("McConfig: threads must be positive");
    if (corruption != "none" && corruption != "innovation" && corruption != "parameter") {
      throw invalid_config("McConfig: corruption must be none, innovation or parameter");
    }
  }
};

namespace detail {

inline ParamMap with(ParamMap p, const std::string& key, double value) {
  p[key] = value;
  return p;
}

inline std::vector<std::uint64_t> column(const PathEnsemble& e, std::size_t k) {
  std::vector<std::uint64_t> out(e.n_paths);
  for (std::size_t i = 0; i < e.n_paths; ++i) out[i] = e.at(i, k);
  return out;
}

inline std::vector<std::uint64_t> column(const std::vector<std::uint64_t>& m, std::size_t length, std::size_t k) {
  std::vector<std::uint64_t> out(m.size() / length);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m[i * length + k];
  return out;
}

inline std::vector<std::uint64_t> histogram(const std::vector<std::uint64_t>& xs) {
  std::vector<std::uint64_t> h;
  for (auto x : xs) {
    if (x >= h.size()) h.resize(x + 1, 0);
    ++h[x];
  }
  return h;
}

inline double bonferroni(double min_p, std::size_t tests) {
  return std::min(1.0, min_p * static_cast<double>(std::max<std::size_t>(tests, 1)));
}

/// Larger of a + 0.1 and the midpoint to 1 when a + 0.1 would leave (0,1).
inline double perturbed_a(double a) { return a + 0.1 < 1.0 ? a + 0.1 : (1.0 + a) / 2.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Monte Carlo checks. The statistic is a Bonferroni-adjusted p-value; the
// check passes when it is at least alpha.

/// Chi-square goodness of fit of every time index of `e` against `law`.
inline CheckReport check_marginal_law(const PathEnsemble& e, const Pmf& law, ParamMap params, double alpha) {
  double min_p = 1.0;
  for (std::size_t k = 0; k < e.length; ++k) {
    const auto h = detail::histogram(detail::column(e, k));
    min_p = std::min(min_p, stats::chi_square_gof(h, law).p_value);
  }
  return make_report("stationary_marginal", e.construction, std::move(params), detail::bonferroni(min_p, e.length),
                     Comparison::at_least, alpha, Provenance::monte_carlo, e.seed, law.tail_mass(),
                     "min p over " + std::to_string(e.length) + " time indices, Bonferroni-adjusted");
}

/// check_marginal_law against Poisson(lambda / (1 - a)).
inline CheckReport check_stationary_marginal(const PathEnsemble& e, const InarParams& params, double alpha,
                                             double budget = kDefaultTailBudget) {
  return check_marginal_law(e, poisson_pmf(params.stationary_mean(), budget), params.to_map(), alpha);
}

/// Chi-square independence of V_k against X_{k-1}, U_k and V_{k-1} at the
/// last time index k of the ensemble.
inline CheckReport check_innovation_independence(const DecomposedEnsemble& d, const InarParams& params,
                                                 double alpha) {
  const std::size_t len = d.x.length;
  detail::require(len >= 2, "check_innovation_independence: paths need at least two steps");
  const std::size_t k = len - 1;
  const auto vk = detail::column(d.v, len, k);
  const auto x_prev = detail::column(d.x, k - 1);
  const auto uk = detail::column(d.u, len, k);
  const auto v_prev = detail::column(d.v, len, k - 1);
  const double p = std::min({stats::chi_square_independence(vk, x_prev).p_value,
                             stats::chi_square_independence(vk, uk).p_value,
                             stats::chi_square_independence(vk, v_prev).p_value});
  return make_report("innovation_independence", d.x.construction, params.to_map(), detail::bonferroni(p, 3),
                     Comparison::at_least, alpha, Provenance::monte_carlo, d.x.seed, 0.0,
                     "V_k vs X_{k-1}, U_k, V_{k-1} at k = " + std::to_string(k) + ", Bonferroni over 3");
}

/// Law of U_k given X_{k-1} = x against Binomial(x, a) for every stratum x
/// with at least kMinStratumCount observations, at the last time index.
inline CheckReport check_thinning_conditional(const DecomposedEnsemble& d, const InarParams& params, double alpha,
                                              std::size_t min_count = kMinStratumCount) {
  const std::size_t len = d.x.length;
  detail::require(len >= 2, "check_thinning_conditional: paths need at least two steps");
  const std::size_t k = len - 1;
  std::map<std::uint64_t, std::vector<std::uint64_t>> strata;
  for (std::size_t i = 0; i < d.x.n_paths; ++i) strata[d.x.at(i, k - 1)].push_back(d.u_at(i, k));
  double min_p = 1.0;
  std::size_t tested = 0;
  std::size_t skipped = 0;
  for (const auto& [x, us] : strata) {
    if (us.size() < min_count) {
      ++skipped;
      continue;
    }
    ++tested;
    min_p = std::min(min_p, stats::chi_square_gof(detail::histogram(us), binomial_pmf(x, params.a)).p_value);
  }
  const double stat = tested == 0 ? 0.0 : detail::bonferroni(min_p, tested);
  return make_report("thinning_conditional", d.x.construction, params.to_map(), stat, Comparison::at_least, alpha,
                     Provenance::monte_carlo, d.x.seed, 0.0,
                     std::to_string(tested) + " strata tested, " + std::to_string(skipped) + " with fewer than " +
                         std::to_string(min_count) + " observations skipped");
}

struct WindowComparison {
  double tv = 0.0;         // upper bound on TV(empirical, exact)
  double threshold = 0.0;  // fluctuation bound + truncation terms
};

/// TV between the empirical law of (X_k, k in window) in `e` and the exact
/// stationary window law of INAR(params). Empirical atoms outside the exact
/// table are charged in full, so `tv` is an upper bound. The threshold is
///   E TV <= 1/2 sum_i sqrt(p_i (1 - p_i) / n) + tail   (Jensen per atom)
/// plus the McDiarmid deviation sqrt(log(1/alpha) / (2n)), plus the exact
/// table's tail and `construction_error` (TV between the simulated and true
/// laws).
inline WindowComparison compare_window_law(const PathEnsemble& e, const InarParams& params,
                                           std::span<const std::uint64_t> window, double alpha, double budget,
                                           double construction_error) {
  const MarkovChainSpec spec = inar_kernel(params, budget);
  const WindowLaw law = window_joint_pmf(spec, window, spec.state_cap());
  const double n = static_cast<double>(e.n_paths);
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t outside = 0;
  for (std::size_t i = 0; i < e.n_paths; ++i) {
    std::uint64_t code = 0;
    bool inside = true;
    for (std::size_t w = 0; w < window.size(); ++w) {
      const std::uint64_t x = e.at(i, window[w]);
      if (x >= law.radix[w]) {
        inside = false;
        break;
      }
      code = code * law.radix[w] + x;
    }
    if (inside) {
      ++counts[code];
    } else {
      ++outside;
    }
  }
  double l1 = static_cast<double>(outside) / n;
  double sd_sum = 0.0;
  for (std::size_t k = 0; k < law.codes.size(); ++k) {
    const double p = law.mass[k];
    const auto it = counts.find(law.codes[k]);
    const double q = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    l1 += std::abs(q - p);
    sd_sum += std::sqrt(p * (1.0 - p) / n);
    if (it != counts.end()) counts.erase(it);
  }
  for (const auto& [code, c] : counts) l1 += static_cast<double>(c) / n;
  WindowComparison out;
  out.tv = 0.5 * (l1 + law.tail);
  out.threshold = 0.5 * sd_sum + std::sqrt(std::log(1.0 / alpha) / (2.0 * n)) + 2.0 * law.tail + construction_error;
  return out;
}

/// Exact INAR window law against the superposition construction simulated
/// with `simulated` parameters (equal to `params` except in controls).
inline CheckReport check_construction_equivalence(const InarParams& params, const InarParams& simulated,
                                                  std::span<const std::uint64_t> window, std::size_t n_paths,
                                                  const SeedSpec& seed, double alpha, double budget,
                                                  unsigned threads = 1) {
  detail::require(!window.empty() && window.back() - window.front() < 4,
                  "check_construction_equivalence: window width must be at most 4");
  const auto config = SuperpositionConfig::for_budget(simulated, budget);
  const std::size_t length = static_cast<std::size_t>(window.back()) + 1;
  const auto d = simulate_inar_superposition(simulated, config, length, n_paths, seed, {threads});
  const double construction_error =
      static_cast<double>(window.size()) * SuperpositionConfig::neglected_mean(simulated, config.depth);
  const auto cmp = compare_window_law(d.x, params, window, alpha, budget, construction_error);
  ParamMap p = params.to_map();
  p["simulated_a"] = simulated.a;
  p["simulated_lambda"] = simulated.lambda;
  p["depth"] = static_cast<double>(config.depth);
  p["n_paths"] = static_cast<double>(n_paths);
  return make_report("construction_equivalence", "superposition", std::move(p), cmp.tv, Comparison::at_most,
                     cmp.threshold, Provenance::monte_carlo, seed, construction_error,
                     "TV(empirical window law, exact window law) over " + std::to_string(window.size()) +
                         " coordinates");
}

/// V'_k = V_k + 1{X_{k-1} > mean}, X'_k = U_k + V'_k for k >= 1.
inline DecomposedEnsemble corrupt_innovations(DecomposedEnsemble d, double mean) {
  const std::size_t len = d.x.length;
  const auto original = d.x.values;
  for (std::size_t i = 0; i < d.x.n_paths; ++i) {
    for (std::size_t k = 1; k < len; ++k) {
      const std::size_t at = i * len + k;
      if (static_cast<double>(original[at - 1]) > mean) ++d.v[at];
      d.x.values[at] = d.u[at] + d.v[at];
    }
  }
  d.x.construction += "+corrupted-innovation";
  return d;
}

// ---------------------------------------------------------------------------
// Exact Markov-triplet constructions.

namespace detail {

inline double missing_mass(const std::vector<TripletPmf::Atom>& atoms) {
  CompensatedSum s;
  for (const auto& x : atoms) s.add(x.mass);
  return std::max(0.0, 1.0 - s.value());
}

}  // namespace detail

/// ((X_0, X_1), X_1, X_2) from the kernel products of `spec`, truncated at
/// `cap`.
inline TripletPmf chain_triplet(const MarkovChainSpec& spec, std::uint64_t cap) {
  const std::vector<std::uint64_t> idx{0, 1, 2};
  const WindowLaw law = window_joint_pmf(spec, std::span<const std::uint64_t>(idx), cap);
  const auto r0 = law.radix[0];
  const auto r1 = law.radix[1];
  const auto r2 = law.radix[2];
  std::vector<TripletPmf::Atom> atoms;
  atoms.reserve(law.codes.size());
  for (std::size_t k = 0; k < law.codes.size(); ++k) {
    const auto t = law.decode(law.codes[k]);
    atoms.push_back({t[0] * r1 + t[1], t[1], t[2], law.mass[k]});
  }
  const double tail = detail::missing_mass(atoms);
  return TripletPmf(r0 * r1, r1, r2, std::move(atoms), tail);
}

/// ((X_0, U_1, V_1), X_1, U_2) for the direct construction: X_0 stationary,
/// U_1 ~ Bin(X_0, a), V_1 ~ Poisson(lambda), X_1 = U_1 + V_1,
/// U_2 ~ Bin(X_1, a).
inline TripletPmf decomposition_triplet(const InarParams& params, double budget = kDefaultTailBudget) {
  params.validate();
  const Pmf pi = poisson_pmf(params.stationary_mean(), budget);
  const Pmf pv = poisson_pmf(params.lambda, budget);
  const std::size_t nx = pi.size();
  const std::size_t nv = pv.size();
  const std::size_t nb = nx + nv - 1;
  std::vector<Pmf> thin_rows;
  thin_rows.reserve(nb);
  for (std::size_t x = 0; x < nb; ++x) thin_rows.push_back(binomial_pmf(x, params.a));
  std::vector<TripletPmf::Atom> atoms;
  for (std::size_t x0 = 0; x0 < nx; ++x0) {
    for (std::size_t u1 = 0; u1 <= x0; ++u1) {
      const double m_xu = pi[x0] * thin_rows[x0][u1];
      if (m_xu == 0.0) continue;
      for (std::size_t v1 = 0; v1 < nv; ++v1) {
        const double m_xuv = m_xu * pv[v1];
        if (m_xuv == 0.0) continue;
        const std::size_t a_code = (x0 * nx + u1) * nv + v1;
        const std::size_t x1 = u1 + v1;
        const Pmf& row = thin_rows[x1];
        for (std::size_t u2 = 0; u2 < row.size(); ++u2) {
          const double m = m_xuv * row[u2];
          if (m > 0.0) atoms.push_back({a_code, x1, u2, m});
        }
      }
    }
  }
  const double tail = detail::missing_mass(atoms);
  return TripletPmf(nx * nx * nv, nb, nb, std::move(atoms), tail);
}

/// ((Y_1, ..., Y_r), Y, Z) with independent Y_i ~ Poisson(lambdas[i]),
/// Y = sum Y_i, and Z = sum Z_i where Z_i ~ Bin(Y_i, a) given Y_i. Z is
/// built component by component, not from the law of Y.
inline TripletPmf poisson_split_triplet(const std::vector<double>& lambdas, double a,
                                        double budget = kDefaultTailBudget) {
  detail::require(!lambdas.empty() && lambdas.size() <= 4, "poisson_split_triplet: between 1 and 4 components");
  detail::require(a > 0.0 && a < 1.0, "poisson_split_triplet: a must lie in (0,1)");
  std::vector<Pmf> laws;
  std::size_t na = 1;
  std::size_t nb = 1;
  for (double l : lambdas) {
    laws.push_back(poisson_pmf(l, budget));
    na *= laws.back().size();
    nb += laws.back().size() - 1;
  }
  std::vector<Pmf> thin_rows;
  for (std::size_t y = 0; y < nb; ++y) thin_rows.push_back(binomial_pmf(y, a));
  std::vector<TripletPmf::Atom> atoms;
  std::vector<std::size_t> y(laws.size(), 0);
  for (std::size_t code = 0; code < na; ++code) {
    std::size_t rest = code;
    for (std::size_t i = laws.size(); i-- > 0;) {
      y[i] = rest % laws[i].size();
      rest /= laws[i].size();
    }
    double m = 1.0;
    std::size_t total = 0;
    Pmf z = Pmf::point_mass(0);
    for (std::size_t i = 0; i < laws.size(); ++i) {
      m *= laws[i][y[i]];
      total += y[i];
      z = convolve(z, thin_rows[y[i]]);
    }
    if (m == 0.0) continue;
    for (std::size_t c = 0; c < z.size(); ++c) {
      if (z[c] > 0.0) atoms.push_back({code, total, c, m * z[c]});
    }
  }
  const double tail = detail::missing_mass(atoms);
  return TripletPmf(na, nb, nb, std::move(atoms), tail);
}

/// Non-Markov control: (X_0, X_1) a stationary INAR pair and
/// X_2 = a o X_1 + b o X_0 + V with an independent Poisson(lambda) V, so X_2
/// depends on X_0 given X_1. Triplet (X_0, X_1, X_2).
inline TripletPmf second_order_triplet(const InarParams& params, double b, double budget = kDefaultTailBudget) {
  params.validate();
  detail::require(b > 0.0 && b < 1.0, "second_order_triplet: b must lie in (0,1)");
  const MarkovChainSpec spec = inar_kernel(params, budget);
  const std::vector<std::uint64_t> idx{0, 1};
  const WindowLaw pair = window_joint_pmf(spec, std::span<const std::uint64_t>(idx), spec.state_cap());
  const Pmf pv = poisson_pmf(params.lambda, budget);
  const std::size_t r0 = pair.radix[0];
  const std::size_t r1 = pair.radix[1];
  const std::size_t nc = r0 + r1 + pv.size();
  std::vector<TripletPmf::Atom> atoms;
  for (std::size_t k = 0; k < pair.codes.size(); ++k) {
    const auto t = pair.decode(pair.codes[k]);
    const Pmf x2 = convolve(convolve(binomial_pmf(t[1], params.a), binomial_pmf(t[0], b)), pv);
    for (std::size_t c = 0; c < x2.size(); ++c) {
      const double m = pair.mass[k] * x2[c];
      if (m > 0.0) atoms.push_back({t[0], t[1], c, m});
    }
  }
  const double tail = detail::missing_mass(atoms);
  return TripletPmf(r0, r1, nc, std::move(atoms), tail);
}

/// Reports markov_triplet_residual(t) <= kTripletTolerance (or, for a
/// control, >= kNonMarkovFloor).
inline CheckReport triplet_report(const std::string& check, const std::string& construction, ParamMap params,
                                  const TripletPmf& t, bool control = false) {
  const double r = markov_triplet_residual(t);
  if (control) {
    return make_report("control/" + check, construction, std::move(params), r, Comparison::at_least, kNonMarkovFloor,
                       Provenance::exact, std::nullopt, t.tail(), "residual must be bounded away from 0");
  }
  return make_report(check, construction, std::move(params), r, Comparison::at_most, kTripletTolerance,
                     Provenance::exact, std::nullopt, t.tail());
}

/// The exact Markov-triplet checks for INAR(params): the chain triplet of
/// the kernel, the decomposition triplet of the direct construction, the
/// Poisson split (V_{k-1}, U_{k-1}) -> X_{k-1} -> U_k in two and three
/// components, and the second-order control.
inline std::vector<CheckReport> check_markov_property(const InarParams& params, std::uint64_t cap,
                                                      double budget = kDefaultTailBudget) {
  params.validate();
  const ParamMap p = params.to_map();
  const double a = params.a;
  const double l = params.lambda;
  std::vector<CheckReport> out;
  out.push_back(triplet_report("markov_triplet/chain", "inar", detail::with(p, "cap", static_cast<double>(cap)),
                               chain_triplet(inar_kernel(params, budget), cap)));
  out.push_back(triplet_report("markov_triplet/decomposition", "direct", p, decomposition_triplet(params, budget)));
  out.push_back(triplet_report("markov_triplet/poisson_split", "superposition", detail::with(p, "components", 2),
                               poisson_split_triplet({l, l * a / (1.0 - a)}, a, budget)));
  out.push_back(triplet_report("markov_triplet/poisson_split", "superposition", detail::with(p, "components", 3),
                               poisson_split_triplet({l, l * a, l * a * a / (1.0 - a)}, a, budget)));
  out.push_back(triplet_report("markov_triplet/second_order", "inar2", detail::with(p, "b", 0.3),
                               second_order_triplet(params, 0.3, budget), true));
  return out;
}

// ---------------------------------------------------------------------------
// Exact distributional checks.

/// max over j <= j_max of TV(marginal_at(inar, j), Poisson(lambda/(1-a))).
inline CheckReport check_stationary_exact(const InarParams& params, std::uint64_t j_max = 20,
                                          double budget = kDefaultTailBudget) {
  const MarkovChainSpec spec = inar_kernel(params, budget);
  const Pmf target = poisson_pmf(params.stationary_mean(), budget);
  double worst = 0.0;
  double tail = 0.0;
  for (std::uint64_t j = 0; j <= j_max; ++j) {
    const Pmf m = marginal_at(spec, j);
    worst = std::max(worst, total_variation(m, target));
    tail = std::max(tail, m.tail_mass());
  }
  return make_report("stationary_exact", "inar", detail::with(params.to_map(), "j_max", static_cast<double>(j_max)),
                     worst, Comparison::at_most, kExactTolerance, Provenance::exact, std::nullopt, tail);
}

/// sup_j<=j_max ||marginal_at(poisson death chain, j) - Poisson(lambda a^j)||.
inline CheckReport check_death_marginal(double lambda, double a, std::uint64_t j_max = 10,
                                        double budget = kDefaultTailBudget) {
  const MarkovChainSpec spec = poisson_death_chain(lambda, a, budget);
  double worst = 0.0;
  double tail = 0.0;
  for (std::uint64_t j = 0; j <= j_max; ++j) {
    const Pmf m = marginal_at(spec, j);
    worst = std::max(worst, sup_distance(m, poisson_pmf(lambda * std::pow(a, static_cast<double>(j)), budget)));
    tail = std::max(tail, m.tail_mass());
  }
  return make_report("death_marginal", "death-poisson", {{"lambda", lambda}, {"a", a}}, worst, Comparison::at_most,
                     1e-12, Provenance::exact, std::nullopt, tail);
}

/// Log-linear decay rate of rho_markov(inar, n), n = 1..n_max, against a.
inline CheckReport check_decay_rate(const InarParams& params, std::uint64_t n_max = 6,
                                    double budget = kDefaultTailBudget, double* rate_out = nullptr) {
  const MarkovChainSpec spec = inar_kernel(params, budget);
  std::vector<std::pair<double, double>> pts;
  double tail = 0.0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const auto r = rho_markov(spec, n, spec.state_cap());
    pts.emplace_back(static_cast<double>(n), r.value);
    tail = std::max(tail, r.truncation_error);
  }
  const DecayFit fit = fit_decay_rate(pts);
  if (rate_out) *rate_out = fit.rate;
  return make_report("decay_rate", "inar", detail::with(params.to_map(), "fitted_rate", fit.rate),
                     std::abs(fit.rate - params.a), Comparison::at_most, kDecayRateTolerance, Provenance::exact,
                     std::nullopt, tail, "|fitted rate - a| over n = 1.." + std::to_string(n_max));
}

// ---------------------------------------------------------------------------
// Mixing-lemma checks.

struct AbsorbingCase {
  double p0 = 0.0;
  double a = 0.0;
  std::uint64_t length = 0;
};

/// Indicator chains satisfying the absorbing hypothesis at level epsilon:
/// retention a in {eps, eps/2, eps/10}, p0 in {0.1, 0.5, 0.9}, L = 2..6.
inline std::vector<AbsorbingCase> absorbing_family(double epsilon) {
  std::vector<AbsorbingCase> out;
  for (double a : {epsilon, epsilon / 2.0, epsilon / 10.0}) {
    for (double p0 : {0.1, 0.5, 0.9}) {
      for (std::uint64_t len = 2; len <= kAbsorbingMaxLength; ++len) out.push_back({p0, a, len});
    }
  }
  return out;
}

/// Largest lambda(odd, even) over absorbing_family(epsilon) against
/// 3 sqrt(epsilon). Any case violating the hypothesis fails the check.
inline CheckReport check_absorbing_lambda(double epsilon) {
  double worst = 0.0;
  std::string note;
  bool hypotheses = true;
  for (const auto& c : absorbing_family(epsilon)) {
    const WindowLaw law = window_law_contiguous(indicator_chain_spec(c.p0, c.a), c.length, 1);
    const auto r = verify_absorbing_lambda_bound(law, epsilon);
    if (!r.hypothesis_holds) {
      hypotheses = false;
      note = r.hypothesis_note;
      break;
    }
    worst = std::max(worst, r.lambda);
  }
  const double bound = 3.0 * std::sqrt(epsilon);
  auto rep = make_report("absorbing_lambda", "indicator", {{"epsilon", epsilon}}, hypotheses ? worst : bound + 1.0,
                         Comparison::at_most, bound, Provenance::exact, std::nullopt, 0.0,
                         hypotheses ? "max lambda(odd, even) over the absorbing family" : note);
  return rep;
}

/// Certified gap m and the exact window rho* of `spec` at that gap.
inline CheckReport check_rho_star_at_gap(const MarkovChainSpec& spec, double a, double epsilon,
                                         const DeltaBound& bound, std::uint64_t width, std::uint64_t cap,
                                         unsigned threads = 1) {
  const GapCertificate cert = gap_for_epsilon(a, epsilon, bound);
  RhoStarOptions opts;
  opts.threads = threads;
  const RhoStarResult r = rho_star_window(spec, width, cert.m, cap, opts);
  ParamMap p = spec.params();
  p["epsilon"] = epsilon;
  p["m"] = static_cast<double>(cert.m);
  p["width"] = static_cast<double>(width);
  p["cap"] = static_cast<double>(cap);
  p["pairs"] = static_cast<double>(r.pair_count);
  return make_report("rho_star_gap", spec.name(), std::move(p), r.value, Comparison::at_most, epsilon,
                     Provenance::exact, std::nullopt, r.truncation_error,
                     r.vacuous ? "vacuous: no window pair at gap m (" + bound.name + " bound)" : bound.name + " bound");
}

/// Gap certificate sanity: a^m <= gamma < a^(m-1) and 3 sqrt(gamma) <= delta.
inline CheckReport check_gap_certificate(double a, double epsilon, const DeltaBound& bound) {
  const GapCertificate c = gap_for_epsilon(a, epsilon, bound);
  const double am = std::pow(a, static_cast<double>(c.m));
  const bool minimal = c.m == 1 || std::pow(a, static_cast<double>(c.m - 1)) > c.gamma * (1.0 + kGapTieTolerance);
  const bool ok = am <= c.gamma * (1.0 + kGapTieTolerance) && minimal && 3.0 * std::sqrt(c.gamma) <= c.delta &&
                  c.gamma <= 1.0 / 9.0;
  return make_report("gap_certificate", bound.name,
                     {{"a", a}, {"epsilon", epsilon}, {"m", static_cast<double>(c.m)}, {"gamma", c.gamma}},
                     ok ? 1.0 : 0.0, Comparison::at_least, 1.0, Provenance::exact);
}

// ---------------------------------------------------------------------------
// Randomized exact corpora (fixed internal seeds, independent of McConfig).

inline constexpr std::uint64_t kCorpusSeed = 0x1a2b3c4d5e6fULL;

namespace detail {

inline Pmf random_pmf(Engine& e, std::size_t max_size) {
  const std::size_t n = 1 + static_cast<std::size_t>(uniform01(e) * static_cast<double>(max_size));
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) {
    x = uniform01(e) + 1e-3;
    s += x;
  }
  for (auto& x : w) x /= s;
  return make_pmf_unchecked(std::move(w), 0.0);
}

inline JointPmf random_joint(Engine& e, std::size_t max_alphabet) {
  const std::size_t r = 1 + static_cast<std::size_t>(uniform01(e) * static_cast<double>(max_alphabet));
  const std::size_t c = 1 + static_cast<std::size_t>(uniform01(e) * static_cast<double>(max_alphabet));
  std::vector<double> m(r * c);
  double s = 0.0;
  for (auto& x : m) {
    // Some exact zeros so null-atom handling is exercised.
    x = uniform01(e) < 0.15 ? 0.0 : uniform01(e);
    s += x;
  }
  if (s == 0.0) {
    m[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : m) x /= s;
  std::vector<std::string> rl;
  std::vector<std::string> cl;
  for (std::size_t i = 0; i < r; ++i) rl.push_back(std::to_string(i));
  for (std::size_t i = 0; i < c; ++i) cl.push_back(std::to_string(i));
  // Renormalization leaves |sum - 1| at rounding level.
  return JointPmf(std::move(rl), std::move(cl), std::move(m));
}

}  // namespace detail

/// Poisson convolution closure and distributivity of thinning over
/// convolution on `count` random cases; statistic is the largest sup-norm
/// discrepancy.
inline CheckReport check_superposition_algebra(std::size_t count = 100) {
  Engine e = make_engine({kCorpusSeed, 1});
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double l1 = 0.05 + 4.0 * uniform01(e);
    const double l2 = 0.05 + 4.0 * uniform01(e);
    worst = std::max(worst, sup_distance(convolve(poisson_pmf(l1), poisson_pmf(l2)), poisson_pmf(l1 + l2)));
    const double a = 0.05 + 0.9 * uniform01(e);
    const Pmf p = detail::random_pmf(e, 12);
    const Pmf q = detail::random_pmf(e, 12);
    worst = std::max(worst, sup_distance(thin(convolve(p, q), a), convolve(thin(p, a), thin(q, a))));
  }
  return make_report("superposition_algebra", "pmf", {{"cases", static_cast<double>(count)}}, worst,
                     Comparison::at_most, 1e-12, Provenance::exact);
}

/// rho of a tensor combination against the largest block rho on `count`
/// random pairs of joints with alphabets of at most 4 atoms.
inline CheckReport check_csaki_fisher(std::size_t count = 50) {
  Engine e = make_engine({kCorpusSeed, 2});
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const JointPmf j1 = detail::random_joint(e, 4);
    const JointPmf j2 = detail::random_joint(e, 4);
    const double combined = maximal_correlation(tensor_combine({j1, j2}));
    worst = std::max(worst, std::abs(combined - std::max(maximal_correlation(j1), maximal_correlation(j2))));
  }
  return make_report("csaki_fisher", "joint", {{"cases", static_cast<double>(count)}}, worst, Comparison::at_most,
                     1e-9, Provenance::exact);
}

// ---------------------------------------------------------------------------
// Campaign.

struct CampaignResult {
  McConfig config;
  double check_alpha = 0.0;  // per-check level after the campaign-wide Bonferroni split
  std::size_t monte_carlo_checks = 0;
  std::vector<CheckReport> reports;

  [[nodiscard]] bool all_pass() const {
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
  }
  [[nodiscard]] std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& r : reports) {
      if (!r.pass) out.push_back(r.check + " [" + r.construction + "]");
    }
    return out;
  }
};

/// Monte Carlo checks per (a, lambda) grid point; see mc_grid_job.
inline constexpr std::size_t kMcChecksPerGridPoint = 11;

namespace detail {

using Job = std::function<std::vector<CheckReport>()>;

// Seed tags: 64 per grid point.
enum SeedRole : std::uint64_t { kDirect = 0, kSuper, kIid, kEquivalence, kPerturbed };

inline std::vector<CheckReport> mc_grid_job(const McConfig& cfg, std::size_t point, const InarParams& params,
                                            double alpha) {
  auto seed_for = [&](std::uint64_t role) { return derive_seed(cfg.seed, point * 64 + role); };
  std::vector<CheckReport> out;
  const double budget = cfg.truncation_budget;
  const SimulationOptions opts{1, std::max(kDefaultSamplingThreshold, budget)};

  const auto direct = simulate_inar_direct(params, cfg.path_length, cfg.n_paths, seed_for(kDirect), opts);
  out.push_back(check_stationary_marginal(direct.x, params, alpha, budget));
  out.push_back(check_innovation_independence(direct, params, alpha));
  out.push_back(check_thinning_conditional(direct, params, alpha));

  InarParams simulated = params;
  if (cfg.corruption == "parameter") simulated.a = perturbed_a(params.a);
  const auto super_cfg = SuperpositionConfig::for_budget(simulated, budget);
  auto super = simulate_inar_superposition(simulated, super_cfg, cfg.path_length, cfg.n_paths, seed_for(kSuper), opts);
  if (cfg.corruption == "innovation") super = corrupt_innovations(std::move(super), params.stationary_mean());
  out.push_back(check_stationary_marginal(super.x, params, alpha, budget));
  out.push_back(check_innovation_independence(super, params, alpha));
  out.push_back(check_thinning_conditional(super, params, alpha));

  {
    const auto cmp = compare_window_law(super.x, params, cfg.equivalence_window, alpha, budget,
                                        static_cast<double>(cfg.equivalence_window.size()) *
                                            SuperpositionConfig::neglected_mean(simulated, super_cfg.depth));
    ParamMap p = params.to_map();
    p["depth"] = static_cast<double>(super_cfg.depth);
    out.push_back(make_report("construction_equivalence", super.x.construction, std::move(p), cmp.tv,
                              Comparison::at_most, cmp.threshold, Provenance::monte_carlo, super.x.seed, budget,
                              "TV(empirical window law, exact window law)"));
  }

  // Positive control: i.i.d. stationary draws share the marginal.
  {
    PathEnsemble iid(cfg.n_paths, cfg.path_length, seed_for(kIid), "iid-poisson", params.to_map());
    const CdfTable table(poisson_pmf(params.stationary_mean(), budget), opts.sampling_threshold);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
      Engine engine = make_engine(path_stream(iid.seed, i));
      for (std::size_t k = 0; k < cfg.path_length; ++k) iid.at(i, k) = table.draw(engine);
    }
    out.push_back(check_stationary_marginal(iid, params, alpha, budget));
  }

  // Negative controls.
  {
    auto r = check_marginal_law(direct.x, poisson_pmf(params.lambda, budget), params.to_map(), alpha);
    r.note = "direct ensemble tested against Poisson(lambda)";
    out.push_back(as_control(std::move(r), "wrong_mean"));
  }
  {
    auto corrupted = corrupt_innovations(direct, params.stationary_mean());
    out.push_back(as_control(check_innovation_independence(corrupted, params, alpha), "corrupted_innovation"));
  }
  {
    InarParams perturbed = params;
    perturbed.a = perturbed_a(params.a);
    out.push_back(as_control(check_construction_equivalence(params, perturbed, cfg.equivalence_window, cfg.n_paths,
                                                            seed_for(kPerturbed), alpha, budget, 1),
                             "perturbed_a"));
  }
  return out;
}

inline std::vector<CheckReport> exact_grid_job(const McConfig& cfg, const InarParams& params) {
  std::vector<CheckReport> out;
  out.push_back(check_stationary_exact(params, 20, cfg.truncation_budget));
  const auto spec = inar_kernel(params, cfg.truncation_budget);
  auto markov = check_markov_property(params, spec.state_cap(), cfg.truncation_budget);
  out.insert(out.end(), markov.begin(), markov.end());
  out.push_back(check_decay_rate(params, 6, cfg.truncation_budget));
  return out;
}

inline std::vector<Job> mixing_jobs(const McConfig& cfg) {
  std::vector<Job> jobs;
  const DeltaBound bound = identity_delta_bound();
  jobs.emplace_back([] {
    return std::vector<CheckReport>{check_superposition_algebra(), check_csaki_fisher()};
  });
  jobs.emplace_back([] {
    std::vector<CheckReport> out;
    for (double eps : {0.01, 0.05, 1.0 / 9.0}) out.push_back(check_absorbing_lambda(eps));
    return out;
  });
  for (double a : cfg.grid_a) {
    jobs.emplace_back([a, budget = cfg.truncation_budget] {
      std::vector<CheckReport> out;
      for (double l : {0.5, 1.0, 2.0}) out.push_back(check_death_marginal(l, a, 10, budget));
      return out;
    });
  }
  // Retention values for which the certified gap fits inside the windows.
  for (double a : {0.1, 0.2, 0.3, 0.5}) {
    for (double eps : {0.3, 0.5}) {
      jobs.emplace_back([a, eps, bound] {
        std::vector<CheckReport> out;
        out.push_back(check_gap_certificate(a, eps, bound));
        out.push_back(check_rho_star_at_gap(indicator_chain_spec(0.5, a), a, eps, bound, 6, 1));
        for (std::uint64_t n = 1; n <= 4; ++n) {
          out.push_back(check_rho_star_at_gap(binomial_death_chain(n, 0.5, a), a, eps, bound, 4, n));
        }
        out.push_back(check_rho_star_at_gap(poisson_death_chain(1.0, a), a, eps, bound, 4, 30));
        return out;
      });
    }
  }
  return jobs;
}

inline CheckReport error_report(const std::string& what) {
  return make_report("campaign_error", "-", {}, 1.0, Comparison::at_most, 0.0, Provenance::exact, std::nullopt, 0.0,
                     what);
}

}  // namespace detail

/// Full campaign over cfg.grid_a x cfg.grid_lambda plus the mixing checks.
/// The overall significance is split evenly (Bonferroni) over all Monte
/// Carlo checks, controls included. Jobs may run concurrently; reports are
/// assembled in job order, so the result does not depend on cfg.threads.
inline CampaignResult run_all(const McConfig& cfg) {
  cfg.validate();
  CampaignResult result;
  result.config = cfg;
  const std::size_t points = cfg.grid_a.size() * cfg.grid_lambda.size();
  result.monte_carlo_checks = points * kMcChecksPerGridPoint;
  result.check_alpha = cfg.significance / static_cast<double>(result.monte_carlo_checks);

  std::vector<detail::Job> jobs;
  std::size_t point = 0;
  for (double a : cfg.grid_a) {
    for (double l : cfg.grid_lambda) {
      const InarParams params{a, l};
      jobs.emplace_back([&cfg, point, params, alpha = result.check_alpha] {
        return detail::mc_grid_job(cfg, point, params, alpha);
      });
      jobs.emplace_back([&cfg, params] { return detail::exact_grid_job(cfg, params); });
      ++point;
    }
  }
  for (double a : cfg.grid_a) {
    jobs.emplace_back([&cfg, a] {
      std::vector<double> rates;
      for (double l : cfg.grid_lambda) {
        double rate = 0.0;
        check_decay_rate({a, l}, 6, cfg.truncation_budget, &rate);
        rates.push_back(rate);
      }
      const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
      return std::vector<CheckReport>{make_report("decay_rate_lambda_spread", "inar", {{"a", a}}, *hi - *lo,
                                                  Comparison::at_most, kDecayRateTolerance, Provenance::exact,
                                                  std::nullopt, 0.0, "max - min fitted rate across the lambda grid")};
    });
  }
  if (cfg.mixing_checks) {
    auto mj = detail::mixing_jobs(cfg);
    jobs.insert(jobs.end(), mj.begin(), mj.end());
  }

  std::vector<std::vector<CheckReport>> slots(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    try {
      slots[i] = jobs[i]();
    } catch (const std::exception& e) {
      slots[i] = {detail::error_report(e.what())};
    }
  });
  for (auto& s : slots) {
    for (auto& r : s) result.reports.push_back(std::move(r));
  }
  return result;
}

}  // namespace inarlab

#pragma once

/// @file
/// Markov chain descriptions on the nonnegative integers: the stationary
/// Poisson INAR(1) chain, the binomial pure-death chains and the {0,1}
/// indicator chain, together with exact propagation of marginal laws.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/error.hpp"
#include "inarlab/pmf.hpp"

namespace inarlab {

using ParamMap = std::map<std::string, double>;

struct InarParams {
  double a = 0.5;       // survival probability of each unit under thinning
  double lambda = 1.0;  // Poisson innovation mean

  void validate() const {
    detail::require(a > 0.0 && a < 1.0, "INAR: a must lie in (0,1)");
    detail::require(lambda > 0.0 && std::isfinite(lambda), "INAR: lambda must be positive");
  }
  [[nodiscard]] double stationary_mean() const { return lambda / (1.0 - a); }
  [[nodiscard]] ParamMap to_map() const { return {{"a", a}, {"lambda", lambda}}; }
};

/// One-step transition law, state -> Pmf.
using KernelFn = std::function<Pmf(std::uint64_t)>;

/// Initial law plus a one-step kernel. Rows 0..state_cap are tabulated once
/// at construction; states above the cap are treated as untracked mass by
/// the exact propagators (and computed on demand by simulators).
class MarkovChainSpec {
 public:
  MarkovChainSpec(std::string name, Pmf initial, KernelFn kernel, std::uint64_t state_cap,
                  ParamMap params = {}, bool death = false)
      : name_(std::move(name)),
        initial_(std::move(initial)),
        kernel_(std::move(kernel)),
        cap_(state_cap),
        params_(std::move(params)),
        death_(death) {
    if (cap_ == 0) throw invalid_parameter("MarkovChainSpec: state_cap must be positive");
    auto rows = std::make_shared<std::vector<Pmf>>();
    rows->reserve(cap_ + 1);
    for (std::uint64_t x = 0; x <= cap_; ++x) {
      rows->push_back(kernel_(x));
      if (death_ && rows->back().max_state() > x) {
        throw invalid_parameter("MarkovChainSpec: death kernel row exceeds its state");
      }
    }
    rows_ = std::move(rows);
  }

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const Pmf& initial() const { return initial_; }
  [[nodiscard]] std::uint64_t state_cap() const { return cap_; }
  [[nodiscard]] const ParamMap& params() const { return params_; }
  [[nodiscard]] bool is_death_chain() const { return death_; }

  /// Tabulated row; x must be <= state_cap().
  [[nodiscard]] const Pmf& row(std::uint64_t x) const { return (*rows_)[x]; }

  /// Kernel row for any state.
  [[nodiscard]] Pmf kernel(std::uint64_t x) const { return x <= cap_ ? (*rows_)[x] : kernel_(x); }

 private:
  std::string name_;
  Pmf initial_;
  KernelFn kernel_;
  std::uint64_t cap_;
  ParamMap params_;
  bool death_;
  std::shared_ptr<const std::vector<Pmf>> rows_;
};

/// One step of the chain applied to `law`. Mass on states above the cap and
/// the rows' own tails are moved into the result's tail.
inline Pmf push(const MarkovChainSpec& spec, const Pmf& law) {
  const auto src = law.probs();
  std::vector<double> out;
  detail::CompensatedSum lost;
  lost.add(law.tail_mass());
  for (std::size_t x = 0; x < src.size(); ++x) {
    if (src[x] == 0.0) continue;
    if (x > spec.state_cap()) {
      lost.add(src[x]);
      continue;
    }
    const Pmf& r = spec.row(x);
    const auto rp = r.probs();
    if (out.size() < rp.size()) out.resize(rp.size(), 0.0);
    for (std::size_t y = 0; y < rp.size(); ++y) out[y] += src[x] * rp[y];
    lost.add(src[x] * r.tail_mass());
  }
  return make_pmf_unchecked(std::move(out), lost.value());
}

/// Law of X_j: the initial law pushed j times.
inline Pmf marginal_at(const MarkovChainSpec& spec, std::uint64_t j) {
  Pmf law = spec.initial();
  for (std::uint64_t i = 0; i < j; ++i) law = push(spec, law);
  return law;
}

/// y -> Binomial(y, a): each unit survives one step independently.
inline KernelFn death_kernel(double a) {
  detail::require(a > 0.0 && a < 1.0, "death_kernel: a must lie in (0,1)");
  return [a](std::uint64_t y) { return binomial_pmf(y, a); };
}

/// Stationary Poisson INAR(1): X_k = a o X_{k-1} + V_k, V_k ~ Poisson(lambda).
/// Starts from Poisson(lambda / (1 - a)); the cap is that law's truncation
/// point at `tail_budget`.
inline MarkovChainSpec inar_kernel(const InarParams& params, double tail_budget = kDefaultTailBudget) {
  params.validate();
  Pmf initial = poisson_pmf(params.stationary_mean(), tail_budget);
  const std::uint64_t cap = std::max<std::uint64_t>(1, initial.max_state());
  auto innovation = std::make_shared<const Pmf>(poisson_pmf(params.lambda, tail_budget));
  KernelFn kernel = [a = params.a, innovation](std::uint64_t x) {
    return convolve(binomial_pmf(x, a), *innovation);
  };
  ParamMap p = params.to_map();
  p["tail_budget"] = tail_budget;
  return MarkovChainSpec("inar", std::move(initial), std::move(kernel), cap, std::move(p));
}

/// Pure-death chain started from Binomial(N, p).
inline MarkovChainSpec binomial_death_chain(std::uint64_t n, double p, double a) {
  detail::require(n >= 1, "binomial_death_chain: N must be positive");
  detail::require(p > 0.0 && p < 1.0, "binomial_death_chain: p must lie in (0,1)");
  return MarkovChainSpec("death-binomial", binomial_pmf(n, p), death_kernel(a), n,
                         {{"N", static_cast<double>(n)}, {"p", p}, {"a", a}}, true);
}

/// Pure-death chain started from Poisson(lambda).
inline MarkovChainSpec poisson_death_chain(double lambda, double a, double tail_budget = kDefaultTailBudget) {
  detail::require(lambda > 0.0, "poisson_death_chain: lambda must be positive");
  Pmf initial = poisson_pmf(lambda, tail_budget);
  const std::uint64_t cap = std::max<std::uint64_t>(1, initial.max_state());
  return MarkovChainSpec("death-poisson", std::move(initial), death_kernel(a), cap,
                         {{"lambda", lambda}, {"a", a}, {"tail_budget", tail_budget}}, true);
}

/// zeta_k = zeta_0 * eta_1 * ... * eta_k with zeta_0 ~ Bernoulli(p0) and
/// eta_i ~ Bernoulli(a): the death chain on {0, 1}.
inline MarkovChainSpec indicator_chain_spec(double p0, double a) {
  detail::require(p0 >= 0.0 && p0 <= 1.0, "indicator_chain: p0 must lie in [0,1]");
  return MarkovChainSpec("indicator", Pmf({1.0 - p0, p0}), death_kernel(a), 1, {{"p0", p0}, {"a", a}}, true);
}

/// Chain whose kernel ignores the current state: an i.i.d. sequence.
inline MarkovChainSpec iid_chain(const Pmf& law, ParamMap params = {}) {
  const std::uint64_t cap = std::max<std::uint64_t>(1, law.max_state());
  return MarkovChainSpec("iid", law, [law](std::uint64_t) { return law; }, cap, std::move(params));
}

}  // namespace inarlab

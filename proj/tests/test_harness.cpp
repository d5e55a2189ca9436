#include <gtest/gtest.h>

#include "inarlab/harness.hpp"
#include "inarlab/io.hpp"

using namespace inarlab;

namespace {

constexpr double kAlpha = 1e-3;

McConfig small_config() {
  McConfig c;
  c.n_paths = 10'000;
  c.grid_a = {0.5};
  c.grid_lambda = {1.0};
  c.mixing_checks = false;
  return c;
}

}  // namespace

TEST(CheckReport, PassFlagIsRecomputable) {
  const auto r = make_report("x", "y", {}, 0.2, Comparison::at_most, 0.1, Provenance::exact);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.pass, r.recomputed_pass());
  const auto c = as_control(r, "x");
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.check, "control/x");
  EXPECT_EQ(c.pass, c.recomputed_pass());
}

TEST(MonteCarlo, BothConstructionsPassStructuralChecks) {
  const InarParams p{0.5, 1.0};
  const auto direct = simulate_inar_direct(p, 4, 20'000, {11, 0});
  const auto super = simulate_inar_superposition(p, SuperpositionConfig::for_budget(p), 4, 20'000, {12, 0});
  for (const auto* d : {&direct, &super}) {
    EXPECT_TRUE(check_stationary_marginal(d->x, p, kAlpha).pass) << d->x.construction;
    EXPECT_TRUE(check_innovation_independence(*d, p, kAlpha).pass) << d->x.construction;
    EXPECT_TRUE(check_thinning_conditional(*d, p, kAlpha).pass) << d->x.construction;
  }
}

TEST(MonteCarlo, NegativeControlsFail) {
  const InarParams p{0.5, 1.0};
  const auto direct = simulate_inar_direct(p, 4, 100'000, {13, 0});
  EXPECT_FALSE(check_marginal_law(direct.x, poisson_pmf(1.0), p.to_map(), kAlpha).pass);
  const auto corrupted = corrupt_innovations(direct, p.stationary_mean());
  EXPECT_FALSE(check_innovation_independence(corrupted, p, kAlpha).pass);
  const std::vector<std::uint64_t> w{0, 1};
  EXPECT_FALSE(check_construction_equivalence(p, {0.6, 1.0}, w, 100'000, {14, 0}, kAlpha, 1e-12).pass);
  EXPECT_TRUE(check_construction_equivalence(p, p, w, 100'000, {14, 0}, kAlpha, 1e-12).pass);
}

TEST(MonteCarlo, ZeroStratumMustThinToZero) {
  const InarParams p{0.5, 1.0};
  auto d = simulate_inar_direct(p, 3, 20'000, {15, 0});
  // Plant a survivor after a zero state.
  for (std::size_t i = 0; i < d.x.n_paths; ++i) {
    if (d.x.at(i, 1) == 0) {
      d.u[i * 3 + 2] = 1;
      d.x.at(i, 2) = d.u[i * 3 + 2] + d.v[i * 3 + 2];
      break;
    }
  }
  const auto r = check_thinning_conditional(d, p, kAlpha);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.statistic, 0.0);
}

TEST(MonteCarlo, SmallStrataAreSkippedAndNoted) {
  const InarParams p{0.5, 1.0};
  const auto d = simulate_inar_direct(p, 3, 10'000, {16, 0});
  const auto r = check_thinning_conditional(d, p, kAlpha);
  EXPECT_NE(r.note.find("skipped"), std::string::npos);
}

TEST(ExactChecks, MarkovTriplets) {
  for (double a : {0.3, 0.7}) {
    for (double l : {0.5, 2.0}) {
      const auto reports = check_markov_property({a, l}, inar_kernel({a, l}).state_cap());
      ASSERT_EQ(reports.size(), 5u);
      for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.check << ' ' << r.statistic;
    }
  }
  EXPECT_LE(markov_triplet_residual(chain_triplet(poisson_death_chain(2.0, 0.5), 20)), 1e-10);
  EXPECT_LE(markov_triplet_residual(chain_triplet(binomial_death_chain(4, 0.5, 0.5), 4)), 1e-10);
}

TEST(ExactChecks, SeedIndependent) {
  auto c1 = small_config();
  auto c2 = small_config();
  c2.seed = {999, 0};
  const auto r1 = run_all(c1);
  const auto r2 = run_all(c2);
  ASSERT_EQ(r1.reports.size(), r2.reports.size());
  for (std::size_t i = 0; i < r1.reports.size(); ++i) {
    if (r1.reports[i].provenance != Provenance::exact) continue;
    EXPECT_EQ(io::to_json(r1.reports[i]), io::to_json(r2.reports[i])) << r1.reports[i].check;
  }
}

TEST(Campaign, DeterministicAcrossRunsAndThreads) {
  auto c = small_config();
  const auto a = io::dump(io::to_json(run_all(c)));
  c.threads = 3;
  const auto b = io::dump(io::to_json(run_all(c)));
  EXPECT_EQ(a, b);
}

TEST(Campaign, SmallGridPassesAndControlsAreIncluded) {
  const auto r = run_all(small_config());
  for (const auto& c : r.reports) {
    EXPECT_TRUE(c.pass) << c.check << ' ' << c.construction << ' ' << c.statistic << ' ' << c.note;
    EXPECT_EQ(c.pass, c.recomputed_pass());
  }
  std::size_t mc = 0;
  for (const auto& c : r.reports) mc += c.provenance == Provenance::monte_carlo;
  EXPECT_EQ(mc, r.monte_carlo_checks);
  EXPECT_NEAR(r.check_alpha, 0.01 / static_cast<double>(kMcChecksPerGridPoint), 1e-15);
}

TEST(Campaign, CorruptionIsDetected) {
  auto c = small_config();
  c.corruption = "innovation";
  const auto r = run_all(c);
  EXPECT_FALSE(r.all_pass());
  bool named = false;
  for (const auto& f : r.failed()) named = named || f.find("innovation_independence") != std::string::npos;
  EXPECT_TRUE(named);
}

TEST(McConfig, Validation) {
  auto c = small_config();
  c.n_paths = 5'000;
  EXPECT_THROW(c.validate(), invalid_config);
  c = small_config();
  c.significance = 1.0;
  EXPECT_THROW(c.validate(), invalid_config);
  c = small_config();
  c.equivalence_window = {0, 5};
  EXPECT_THROW(c.validate(), invalid_config);
  c = small_config();
  c.corruption = "bogus";
  EXPECT_THROW(c.validate(), invalid_config);
}

TEST(Campaign, ErrorsAreCapturedPerReport) {
  EXPECT_EQ(detail::error_report("boom").pass, false);
}

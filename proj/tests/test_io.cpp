#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "inarlab/io.hpp"

using namespace inarlab;
using io::json;

TEST(Json, DoublesRoundTripExactly) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 5e-324, 0.7, std::nextafter(1.0, 0.0), 123456.789e-7}) {
    const json j = x;
    EXPECT_EQ(json::parse(j.dump()).get<double>(), x);
  }
}

TEST(Json, PmfRoundTrip) {
  const Pmf p = poisson_pmf(1.7);
  const Pmf q = io::pmf_from_json(json::parse(io::dump(io::to_json(p))));
  ASSERT_EQ(q.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(q[i], p[i]);
  EXPECT_EQ(q.tail_mass(), p.tail_mass());
}

TEST(Json, JointRoundTrip) {
  const auto j = JointPmf::from_matrix({{0.1, 0.2, 0.05}, {0.3, 0.0, 0.35}});
  const auto k = io::joint_from_json(json::parse(io::dump(io::to_json(j))));
  EXPECT_EQ(k.rows(), j.rows());
  EXPECT_EQ(k.cols(), j.cols());
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(k.at(r, c), j.at(r, c));
  }
  EXPECT_EQ(maximal_correlation(k), maximal_correlation(j));
}

TEST(Json, ConfigRoundTripAndOverlay) {
  McConfig c;
  c.n_paths = 12'345;
  c.seed = {7, 3};
  c.grid_a = {0.25};
  c.corruption = "parameter";
  const McConfig d = io::config_from_json(io::to_json(c));
  EXPECT_EQ(io::to_json(d), io::to_json(c));

  const McConfig e = io::config_from_json(json::parse(R"({"seed": 42, "mixing_checks": false})"));
  EXPECT_EQ(e.seed.root_seed, 42u);
  EXPECT_EQ(e.seed.stream_index, 0u);
  EXPECT_FALSE(e.mixing_checks);
  EXPECT_EQ(e.n_paths, McConfig{}.n_paths);
}

TEST(Json, ConfigErrors) {
  EXPECT_THROW(io::config_from_json(json::parse(R"({"n_path": 10})")), invalid_config);
  EXPECT_THROW(io::config_from_json(json::parse(R"({"n_paths": "many"})")), invalid_config);
  EXPECT_THROW(io::config_from_json(json::parse(R"({"seed": {"root": 1, "extra": 2}})")), invalid_config);
  EXPECT_THROW(io::config_from_json(json::parse("[1, 2]")), invalid_config);
}

TEST(Json, ReportFields) {
  const auto r = make_report("c", "direct", {{"a", 0.5}}, 0.02, Comparison::at_least, 0.001, Provenance::monte_carlo,
                             SeedSpec{5, 1}, 1e-12, "n");
  const json j = io::to_json(r);
  EXPECT_EQ(j["comparison"], ">=");
  EXPECT_EQ(j["provenance"], "monte-carlo");
  EXPECT_EQ(j["seed"]["root"], 5);
  EXPECT_EQ(io::comparison_from_string(j["comparison"].get<std::string>()), Comparison::at_least);
  const bool recomputed =
      compare(j["statistic"].get<double>(), io::comparison_from_string(j["comparison"].get<std::string>()),
              j["threshold"].get<double>());
  EXPECT_EQ(recomputed, j["pass"].get<bool>());
  EXPECT_TRUE(io::to_json(make_report("x", "y", {}, 0.0, Comparison::at_most, 1.0, Provenance::exact))["seed"].is_null());
}

TEST(Json, CampaignDocumentOmitsThreads) {
  CampaignResult r;
  r.config.threads = 8;
  r.reports.push_back(make_report("x", "y", {}, 2.0, Comparison::at_most, 1.0, Provenance::exact));
  const json j = io::to_json(r);
  EXPECT_FALSE(j["config"].contains("threads"));
  EXPECT_EQ(j["summary"]["total"], 1);
  EXPECT_EQ(j["summary"]["passed"], 0);
  EXPECT_FALSE(j["summary"]["all_pass"].get<bool>());
  EXPECT_FALSE(j["non_default_significance"].get<bool>());
}

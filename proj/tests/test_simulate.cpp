#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "inarlab/simulate.hpp"

using namespace inarlab;

TEST(SimulateDirect, DecompositionIdentities) {
  const auto d = simulate_inar_direct({0.5, 1.0}, 20, 500, {3, 0});
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t k = 0; k < 20; ++k) {
      ASSERT_EQ(d.x.at(i, k), d.u_at(i, k) + d.v_at(i, k));
      if (k > 0) {
        ASSERT_LE(d.u_at(i, k), d.x.at(i, k - 1));
      }
    }
  }
}

TEST(SimulateSuperposition, DecompositionIdentities) {
  const InarParams p{0.6, 1.5};
  const auto d = simulate_inar_superposition(p, SuperpositionConfig::for_budget(p), 12, 500, {4, 0});
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t k = 0; k < 12; ++k) {
      ASSERT_EQ(d.x.at(i, k), d.u_at(i, k) + d.v_at(i, k));
      if (k > 0) {
        ASSERT_LE(d.u_at(i, k), d.x.at(i, k - 1));
      }
    }
  }
}

TEST(SimulateSuperposition, ConfigValidation) {
  const InarParams p{0.5, 1.0};
  const auto c = SuperpositionConfig::for_budget(p, 1e-12);
  EXPECT_LE(SuperpositionConfig::neglected_mean(p, c.depth), 1e-12);
  EXPECT_GT(SuperpositionConfig::neglected_mean(p, c.depth - 1), 1e-12);
  SuperpositionConfig shallow = c;
  shallow.depth = 3;
  EXPECT_THROW(shallow.validate(p), invalid_config);
  SuperpositionConfig short_warmup = c;
  short_warmup.warmup = 2;
  EXPECT_THROW(short_warmup.validate(p), invalid_config);
}

TEST(Simulate, ThreadCountDoesNotChangeOutput) {
  const InarParams p{0.7, 2.0};
  EXPECT_EQ(simulate_inar_direct(p, 8, 300, {5, 0}, {1}).x, simulate_inar_direct(p, 8, 300, {5, 0}, {4}).x);
  const auto cfg = SuperpositionConfig::for_budget(p);
  const auto s1 = simulate_inar_superposition(p, cfg, 8, 300, {5, 0}, {1});
  const auto s3 = simulate_inar_superposition(p, cfg, 8, 300, {5, 0}, {3});
  EXPECT_EQ(s1.x, s3.x);
  EXPECT_EQ(s1.u, s3.u);
  EXPECT_NE(simulate_inar_direct(p, 8, 300, {6, 0}).x, simulate_inar_direct(p, 8, 300, {5, 0}).x);
}

TEST(Simulate, DeathAndIndicatorPathsNeverIncrease) {
  const auto e = simulate_chain(poisson_death_chain(3.0, 0.6), 15, 400, {7, 0});
  const auto z = indicator_chain(0.5, 0.7, 15, 400, {7, 0});
  for (std::size_t i = 0; i < 400; ++i) {
    for (std::size_t k = 1; k < 15; ++k) {
      ASSERT_LE(e.at(i, k), e.at(i, k - 1));
      ASSERT_LE(z.at(i, k), z.at(i, k - 1));
      ASSERT_LE(z.at(i, k), 1u);
    }
  }
}

TEST(Simulate, SampleMeansAreStationary) {
  const InarParams p{0.5, 1.0};
  const auto d = simulate_inar_superposition(p, SuperpositionConfig::for_budget(p), 5, 40'000, {8, 0});
  for (std::size_t k = 0; k < 5; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.x.n_paths; ++i) s += static_cast<double>(d.x.at(i, k));
    // sd of the mean is sqrt(2 / 40000) ~ 0.007.
    EXPECT_NEAR(s / 40'000.0, 2.0, 0.04);
  }
}

TEST(Simulate, RejectsBadShapes) {
  EXPECT_THROW(simulate_inar_direct({0.5, 1.0}, 0, 10, {1, 0}), invalid_parameter);
  EXPECT_THROW(simulate_inar_direct({1.5, 1.0}, 5, 10, {1, 0}), invalid_parameter);
}

TEST(Csv, ShapeAndMetadata) {
  const auto d = simulate_inar_direct({0.5, 1.0}, 7, 11, {9, 2});
  std::ostringstream os;
  write_paths_csv(os, d.x, {"config: {}"});
  std::istringstream in(os.str());
  std::string line;
  int meta = 0;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      ++meta;
      continue;
    }
    if (!header) {
      EXPECT_EQ(line, "t0,t1,t2,t3,t4,t5,t6");
      header = true;
      continue;
    }
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  }
  EXPECT_EQ(meta, 6);
  EXPECT_EQ(rows, 11);
  EXPECT_NE(os.str().find("# seed: root=9 stream=2"), std::string::npos);

  std::ostringstream dec;
  write_decomposition_csv(dec, d);
  EXPECT_NE(dec.str().find("path,series,t0"), std::string::npos);
  EXPECT_NE(dec.str().find("\n10,v,"), std::string::npos);
}

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "inarlab/dependence.hpp"
#include "inarlab/rng.hpp"

using namespace inarlab;

namespace {

JointPmf random_joint(Engine& e, std::size_t r, std::size_t c, double zero_share = 0.0) {
  std::vector<double> m(r * c);
  double s = 0.0;
  for (auto& x : m) {
    x = uniform01(e) < zero_share ? 0.0 : uniform01(e) + 1e-3;
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
  return JointPmf(rl, cl, m);
}

// Brute-force lambda: every pair of nonempty row/column subsets, no
// incremental reuse.
double lambda_brute(const JointPmf& j) {
  const auto rm = j.row_marginal();
  const auto cm = j.col_marginal();
  double best = 0.0;
  for (std::uint32_t a = 1; a < (1u << j.row_count()); ++a) {
    for (std::uint32_t b = 1; b < (1u << j.col_count()); ++b) {
      double pa = 0.0;
      double pb = 0.0;
      double pab = 0.0;
      for (std::size_t r = 0; r < j.row_count(); ++r) {
        if (a >> r & 1) pa += rm[r];
      }
      for (std::size_t c = 0; c < j.col_count(); ++c) {
        if (b >> c & 1) pb += cm[c];
      }
      for (std::size_t r = 0; r < j.row_count(); ++r) {
        for (std::size_t c = 0; c < j.col_count(); ++c) {
          if ((a >> r & 1) && (b >> c & 1)) pab += j.at(r, c);
        }
      }
      if (pa > 0 && pb > 0) best = std::max(best, std::abs(pab - pa * pb) / std::sqrt(pa * pb));
    }
  }
  return best;
}

double rho_eigen(const JointPmf& j) {
  const auto rm = j.row_marginal();
  const auto cm = j.col_marginal();
  std::vector<std::size_t> rs;
  std::vector<std::size_t> cs;
  for (std::size_t r = 0; r < rm.size(); ++r) {
    if (rm[r] > 0) rs.push_back(r);
  }
  for (std::size_t c = 0; c < cm.size(); ++c) {
    if (cm[c] > 0) cs.push_back(c);
  }
  Eigen::MatrixXd q(rs.size(), cs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t k = 0; k < cs.size(); ++k) q(i, k) = j.at(rs[i], cs[k]) / std::sqrt(rm[rs[i]] * cm[cs[k]]);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  const auto sv = svd.singularValues();
  return sv.size() < 2 ? 0.0 : sv(1);
}

}  // namespace

TEST(MaximalCorrelation, TwoByTwoExample) {
  const auto j = JointPmf::from_matrix({{0.4, 0.1}, {0.1, 0.4}});
  EXPECT_NEAR(maximal_correlation(j), 0.6, 1e-12);
  // Brute force over f, g on a grid: for binary alphabets rho = |Corr(1_A, 1_B)|.
  double best = 0.0;
  for (double f1 = -1.0; f1 <= 1.0; f1 += 0.25) {
    for (double g1 = -1.0; g1 <= 1.0; g1 += 0.25) {
      const double ef = 0.5 * f1;
      const double eg = 0.5 * g1;
      const double efg = 0.4 * f1 * g1;
      const double vf = 0.5 * f1 * f1 - ef * ef;
      const double vg = 0.5 * g1 * g1 - eg * eg;
      if (vf > 0 && vg > 0) best = std::max(best, std::abs(efg - ef * eg) / std::sqrt(vf * vg));
    }
  }
  EXPECT_NEAR(best, 0.6, 1e-12);
}

TEST(MaximalCorrelation, IndependentAndDegenerate) {
  const auto ind = JointPmf::from_matrix({{0.06, 0.14}, {0.24, 0.56}});
  EXPECT_NEAR(maximal_correlation(ind), 0.0, 1e-12);
  EXPECT_NEAR(lambda_coefficient(ind), 0.0, 1e-12);
  const auto point = JointPmf::from_matrix({{1.0, 0.0}, {0.0, 0.0}});
  EXPECT_EQ(maximal_correlation(point), 0.0);
  const auto diag = JointPmf::from_matrix({{0.3, 0.0}, {0.0, 0.7}});
  EXPECT_NEAR(maximal_correlation(diag), 1.0, 1e-12);
}

TEST(MaximalCorrelation, MatchesEigenSvd) {
  Engine e = make_engine({77, 0});
  for (int i = 0; i < 200; ++i) {
    const std::size_t r = 1 + static_cast<std::size_t>(uniform01(e) * 7);
    const std::size_t c = 1 + static_cast<std::size_t>(uniform01(e) * 7);
    const auto j = random_joint(e, r, c, 0.2);
    EXPECT_NEAR(maximal_correlation(j), rho_eigen(j), 1e-10);
    const auto sv = normalized_singular_values(j);
    EXPECT_NEAR(sv.front(), 1.0, 1e-10);
  }
}

TEST(LambdaCoefficient, HandExampleAndBruteForce) {
  const auto j = JointPmf::from_matrix({{0.4, 0.1}, {0.1, 0.4}});
  EXPECT_NEAR(lambda_coefficient(j), 0.3, 1e-12);
  Engine e = make_engine({78, 0});
  for (int i = 0; i < 100; ++i) {
    const std::size_t r = 1 + static_cast<std::size_t>(uniform01(e) * 6);
    const std::size_t c = 1 + static_cast<std::size_t>(uniform01(e) * 6);
    const auto jj = random_joint(e, r, c, 0.2);
    const double l = lambda_coefficient(jj);
    EXPECT_NEAR(l, lambda_brute(jj), 1e-12);
    EXPECT_LE(l, maximal_correlation(jj) + 1e-12);
  }
}

TEST(LambdaCoefficient, AlphabetCap) {
  std::vector<double> m(13 * 2, 1.0 / 26.0);
  std::vector<std::string> rl;
  for (int i = 0; i < 13; ++i) rl.push_back(std::to_string(i));
  const JointPmf j(rl, {"a", "b"}, m);
  EXPECT_THROW(lambda_coefficient(j), resource_limit);
  EXPECT_NO_THROW(lambda_coefficient(j, 13));
}

TEST(JointPmf, Validation) {
  EXPECT_THROW(JointPmf::from_matrix({{0.5, 0.6}}), invalid_parameter);
  EXPECT_THROW(JointPmf::from_matrix({{-0.1, 1.1}}), invalid_parameter);
  EXPECT_THROW(JointPmf({"a"}, {"b", "c"}, std::vector<double>{1.0}), invalid_parameter);
  const auto j = JointPmf::from_matrix({{0.2, 0.3}, {0.0, 0.5}});
  EXPECT_NEAR(j.transpose().at(1, 0), 0.3, 0.0);
}

TEST(TensorCombine, CsakiFisherOnRandomBlocks) {
  Engine e = make_engine({79, 0});
  for (int i = 0; i < 50; ++i) {
    const auto j1 = random_joint(e, 1 + static_cast<std::size_t>(uniform01(e) * 4),
                                 1 + static_cast<std::size_t>(uniform01(e) * 4), 0.15);
    const auto j2 = random_joint(e, 1 + static_cast<std::size_t>(uniform01(e) * 4),
                                 1 + static_cast<std::size_t>(uniform01(e) * 4), 0.15);
    const auto t = tensor_combine({j1, j2});
    EXPECT_EQ(t.row_count(), j1.row_count() * j2.row_count());
    EXPECT_NEAR(maximal_correlation(t), std::max(maximal_correlation(j1), maximal_correlation(j2)), 1e-9);
  }
}

TEST(MarkovTriplet, ProductFormHasZeroResidual) {
  // P(a, b, c) = P(b) P(a|b) P(c|b).
  const double pb[2] = {0.4, 0.6};
  const double pa_b[2][2] = {{0.3, 0.7}, {0.9, 0.1}};
  const double pc_b[2][3] = {{0.2, 0.2, 0.6}, {0.5, 0.25, 0.25}};
  std::vector<double> m(2 * 2 * 3);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 3; ++c) m[(a * 2 + b) * 3 + c] = pb[b] * pa_b[b][a] * pc_b[b][c];
    }
  }
  EXPECT_LE(markov_triplet_residual(TripletPmf::dense(2, 2, 3, m)), 1e-16);
}

TEST(MarkovTriplet, DependenceGivenMiddleIsDetected) {
  // A = C given any B: residual is P(a|b)(1 - P(a|b)) at its largest.
  std::vector<double> m(2 * 1 * 2, 0.0);
  m[0] = 0.5;  // a=0, b=0, c=0
  m[3] = 0.5;  // a=1, b=0, c=1
  EXPECT_NEAR(markov_triplet_residual(TripletPmf::dense(2, 1, 2, m)), 0.25, 1e-15);
  EXPECT_THROW(TripletPmf(2, 1, 2, {{2, 0, 0, 1.0}}), invalid_parameter);
  EXPECT_THROW(TripletPmf(2, 1, 2, {{0, 0, 0, 0.5}}), invalid_parameter);
}

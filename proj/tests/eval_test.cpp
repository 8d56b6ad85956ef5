#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ubi/eval.hpp"

namespace ubi {
namespace {

TEST(RocAuc, HandCases) {
  const std::vector<int> y{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, y), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y), 0.5);
  // pairs: (0.3 vs 0.2) win, (0.3 vs 0.4) loss, (0.4 vs 0.2) win, (0.4 vs 0.4) tie
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.2, 0.4, 0.3, 0.4}, y), 2.5 / 4.0);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DegenerateLabelsError);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), InputError);
}

TEST(TrainTestSplit, SizesDeterminismAndStratification) {
  const auto a = train_test_split(1000, {0.1, 42, false});
  const auto b = train_test_split(1000, {0.1, 42, false});
  const auto c = train_test_split(1000, {0.1, 43, false});
  EXPECT_EQ(a.test.size(), 100u);
  EXPECT_EQ(a.train.size(), 900u);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.test, c.test);

  std::vector<int> y(1000, 0);
  for (int i = 0; i < 150; ++i) y[static_cast<std::size_t>(i)] = 1;
  const auto s = train_test_split(1000, {0.1, 1, true}, y);
  std::size_t pos = 0;
  for (auto i : s.test) pos += static_cast<std::size_t>(y[i]);
  EXPECT_EQ(pos, 15u);
  EXPECT_EQ(s.test.size(), 100u);
  EXPECT_THROW(train_test_split(1000, {1.0, 1, false}), InputError);
}

DesignMatrix simulated(std::uint64_t seed, int n = 3000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    const double a = n01(rng), b = n01(rng), c = n01(rng);
    rows.push_back({a, b, c});
    y.push_back(u01(rng) < sigmoid(-1.5 + 0.8 * a + 0.5 * b));
  }
  return DesignMatrix({"a", "b", "c"}, rows, y, "any");
}

TEST(EvaluateModel, InAndOutOfSampleAreClose) {
  const auto r = evaluate_model(simulated(3), {0.1, 1, false});
  EXPECT_EQ(r.n_train, 2700u);
  EXPECT_EQ(r.n_test, 300u);
  EXPECT_GT(r.auc_in_sample, 0.6);
  EXPECT_LT(std::fabs(r.auc_in_sample - r.auc_out_of_sample), 0.1);
  EXPECT_GT(r.mcfadden_r2, 0.0);
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(EvaluateRepeated, SummarizesSplits) {
  const auto d = simulated(4);
  const auto r = evaluate_repeated(d, {0.1, 10, false}, 4);
  EXPECT_EQ(r.repeats, 4u);
  EXPECT_EQ(r.auc_out_of_sample.n + r.undefined_out_of_sample, 4u);
  double sum = 0.0;
  for (std::uint64_t s = 10; s < 14; ++s) sum += evaluate_model(d, {0.1, s, false}).auc_in_sample;
  EXPECT_NEAR(r.auc_in_sample.mean, sum / 4.0, 1e-12);
  std::ostringstream out;
  write_repeated_eval_csv(out, {r});
  EXPECT_NE(out.str().find("auc_out_of_sample_mean"), std::string::npos);
}

TEST(Ablation, RemovingSignalLowersR2) {
  const auto r = ablation_compare(simulated(5), {"a"});
  EXPECT_GT(r.r2_with, r.r2_without);
  EXPECT_DOUBLE_EQ(r.difference, r.r2_with - r.r2_without);
  EXPECT_THROW(ablation_compare(simulated(5), {"zzz"}), InputError);
}

TEST(DescriptiveStats, SplitsByTarget) {
  std::vector<std::string> diags;
  const auto rows = descriptive_stats({"x"}, {{1.0, 2.0, 3.0, 10.0}}, std::vector<int>{0, 0, 0, 1}, &diags);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].without_accident.mean, 2.0);
  EXPECT_DOUBLE_EQ(rows[0].without_accident.std, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].with_accident.mean, 10.0);
  EXPECT_TRUE(std::isnan(rows[0].with_accident.std));
  EXPECT_TRUE(diags.empty());
}

TEST(CorrelationMatrix, ZeroVarianceColumnsAreEmpty) {
  std::vector<std::size_t> zero;
  const auto r = correlation_matrix({{1, 2, 3, 4}, {2, 4, 6, 8.5}, {5, 5, 5, 5}, {4, 3, 2, 1}}, &zero);
  EXPECT_DOUBLE_EQ(r[0][0], 1.0);
  EXPECT_GT(r[0][1], 0.99);
  EXPECT_DOUBLE_EQ(r[0][3], -1.0);
  EXPECT_TRUE(std::isnan(r[0][2]));
  EXPECT_TRUE(std::isnan(r[2][2]));
  EXPECT_EQ(zero, std::vector<std::size_t>{2});
  EXPECT_EQ(r[1][3], r[3][1]);
}

}  // namespace
}  // namespace ubi

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ubi/glm.hpp"
#include "ubi/model_io.hpp"

namespace ubi {
namespace {

// Small fixed problem; reference estimates from an independent logistic
// regression package (Newton solver, tolerance 1e-14).
DesignMatrix small_problem() {
  const std::vector<double> x1{0.5, 1.2, -0.3, 2.1, 0.0, -1.4, 0.8, 1.9, -0.7, 0.3, 1.1, -2.0,
                               0.6, 1.5, -0.9, 0.2, 2.4, -1.1, 0.9, -0.4, 1.3, 0.1, -0.6, 1.7};
  const std::vector<double> x2{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4, 6, 2, 6, 4};
  const std::vector<int> y{1, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 1};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < y.size(); ++i) rows.push_back({x1[i], x2[i]});
  return DesignMatrix({"x1", "x2"}, rows, y, "any");
}

TEST(FitLogistic, MatchesReferencePackage) {
  const auto m = fit_logistic(small_problem());
  ASSERT_TRUE(m.converged);
  const std::vector<double> beta{-1.3148113925624065, 2.3233951851594323, -0.07821605032912322};
  const std::vector<double> se{1.3725161508632335, 0.9407060491459089, 0.2501139220378754};
  const std::vector<double> p{0.33808446466198416, 0.01351727903939713, 0.7544921093797867};
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(m.coefficients[j], beta[j], 1e-8);
    EXPECT_NEAR(m.std_errors[j], se[j], 1e-7);
    EXPECT_NEAR(m.p_values[j], p[j], 1e-7);
  }
  EXPECT_NEAR(m.log_likelihood, -8.762097342913876, 1e-10);
  EXPECT_EQ(m.aic, 2.0 * 3 - 2.0 * m.log_likelihood);
  EXPECT_EQ(m.terms, (std::vector<std::string>{kInterceptName, "x1", "x2"}));
  EXPECT_EQ(m.n_obs, 24u);
}

TEST(FitLogistic, InterceptOnlyIsLogitOfBaseRate) {
  std::vector<int> y(40, 0);
  for (int i = 0; i < 7; ++i) y[static_cast<std::size_t>(i * 5)] = 1;
  const DesignMatrix d({}, std::vector<std::vector<double>>(40), y, "any");
  const auto m = fit_logistic(d);
  EXPECT_NEAR(m.coefficients[0], std::log(7.0 / 33.0), 1e-12);
  EXPECT_NEAR(m.log_likelihood, null_log_likelihood(d.y()), 1e-12);
}

TEST(FitLogistic, SingleClassTargetIsRejected) {
  const DesignMatrix d({"x"}, {{1.0}, {2.0}, {3.0}}, {0, 0, 0}, "weak");
  try {
    fit_logistic(d);
    FAIL() << "expected DegenerateLabelsError";
  } catch (const DegenerateLabelsError& e) {
    EXPECT_NE(std::string(e.what()).find("single-class target"), std::string::npos);
  }
}

TEST(FitLogistic, CollinearColumnsAreNamed) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    const double a = i % 7, b = (i * 3) % 5;
    rows.push_back({a, b, 2.0 * a - b});
    y.push_back(i % 3 == 0);
  }
  try {
    fit_logistic(DesignMatrix({"a", "b", "c"}, rows, y));
    FAIL() << "expected CollinearityError";
  } catch (const CollinearityError& e) {
    EXPECT_FALSE(e.columns().empty());
    EXPECT_NE(std::string(e.what()).find("c"), std::string::npos);
  }
}

TEST(FitLogistic, CompleteSeparationIsReported) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({static_cast<double>(i), static_cast<double>((i * 7) % 11)});
    y.push_back(i >= 15);
  }
  try {
    fit_logistic(DesignMatrix({"sep", "noise"}, rows, y));
    FAIL() << "expected SeparationError";
  } catch (const SeparationError& e) {
    const auto& cols = e.columns();
    EXPECT_NE(std::find(cols.begin(), cols.end(), "sep"), cols.end());
  }
}

TEST(FitLogistic, RejectsNonFiniteDesignValues) {
  EXPECT_THROW(DesignMatrix({"x"}, {{1.0}, {std::nan("")}}, {0, 1}), InputError);
  EXPECT_THROW(DesignMatrix({"x"}, {{1.0}, {2.0}}, {0, 2}), InputError);
}

TEST(BackwardEliminate, DropsNoiseAndKeepsSignal) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 2000; ++i) {
    const double s = n01(rng), noise = n01(rng);
    rows.push_back({noise, s});
    const double p = sigmoid(-1.0 + 1.2 * s);
    y.push_back(std::uniform_real_distribution<double>(0, 1)(rng) < p);
  }
  const auto m = backward_eliminate(DesignMatrix({"noise", "signal"}, rows, y), 0.05);
  EXPECT_EQ(m.feature_names(), std::vector<std::string>{"signal"});
  EXPECT_LE(m.p_values[1], 0.05);
}

TEST(Scoring, LogOddsSkipsNonScorableTerms) {
  const auto& ref = reference_model(Target::any).model;
  std::map<std::string, double> x{{"a1", 1.0}, {"a2", 0.0}, {"max_mj_sp", 0.0}, {"avg_sp", 0.0}, {"max_n_sp", 0.0}};
  EXPECT_DOUBLE_EQ(log_odds(ref, x), -2.880 + 0.010);
  x.erase("a2");
  EXPECT_THROW(log_odds(ref, x), InputError);
}

TEST(Premium, IsExpectedLossPlusLoadings) {
  EXPECT_DOUBLE_EQ(compute_premium(0.1, 1000.0, 50.0, 20.0), 170.0);
  EXPECT_THROW(compute_premium(1.5, 1000.0, 0.0, 0.0), InputError);
  EXPECT_THROW(compute_premium(0.5, -1.0, 0.0, 0.0), InputError);
}

TEST(ModelJson, RoundTripsIncludingNanAndNonScorable) {
  auto m = fit_logistic(small_problem());
  m.p_values[2] = std::nan("");
  m.non_scorable.insert("x2");
  std::stringstream s;
  write_model_json(s, m);
  const auto back = read_model_json(s);
  EXPECT_EQ(back.terms, m.terms);
  EXPECT_EQ(back.coefficients, m.coefficients);
  EXPECT_TRUE(std::isnan(back.p_values[2]));
  EXPECT_EQ(back.non_scorable, m.non_scorable);
  EXPECT_EQ(back.aic, m.aic);
  std::istringstream bad("{\"target\": \"any\"}");
  EXPECT_THROW(read_model_json(bad), InputError);
}

TEST(ReferenceModels, PrintedAicIsConsistentWithTruncatedLogLikelihood) {
  for (auto t : kAllTargets) {
    const auto& r = reference_model(t);
    const double k = static_cast<double>(r.model.k());
    const double from_printed = 2.0 * k - 2.0 * r.printed_log_likelihood;
    EXPECT_GE(r.printed_aic - from_printed, 0.0) << to_string(t);
    EXPECT_LT(r.printed_aic - from_printed, 2.0) << to_string(t);
    EXPECT_NEAR(r.model.aic, r.printed_aic, 1e-9);
    EXPECT_EQ(r.model.aic, aic_from(r.model.k(), r.model.log_likelihood));
    EXPECT_TRUE(r.model.non_scorable.count("mileage") || t == Target::strong);
  }
}

}  // namespace
}  // namespace ubi

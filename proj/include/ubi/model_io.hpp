#pragma once

// Model files (JSON, stable key order) and the bundled published models.

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ubi/error.hpp"
#include "ubi/glm.hpp"
#include "ubi/labeling.hpp"
#include "ubi/version.hpp"

namespace ubi {

inline std::string significance_stars(double p) {
  if (std::isnan(p)) return {};
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return {};
}

namespace detail {
inline nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}
inline double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}
}  // namespace detail

inline nlohmann::ordered_json model_to_json(const FittedModel& m,
                                            const nlohmann::ordered_json& provenance = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json j;
  j["tool_version"] = std::string(kToolVersion);
  j["target"] = m.target;
  j["features"] = m.feature_names();
  j["terms"] = m.terms;
  auto arr = [](const std::vector<double>& v) {
    auto a = nlohmann::ordered_json::array();
    for (double x : v) a.push_back(detail::number_or_null(x));
    return a;
  };
  j["coefficients"] = arr(m.coefficients);
  j["std_errors"] = arr(m.std_errors);
  j["p_values"] = arr(m.p_values);
  j["log_likelihood"] = detail::number_or_null(m.log_likelihood);
  j["aic"] = detail::number_or_null(m.aic);
  j["n_obs"] = m.n_obs;
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["non_scorable"] = std::vector<std::string>(m.non_scorable.begin(), m.non_scorable.end());
  j["provenance"] = provenance;
  return j;
}

inline FittedModel model_from_json(const nlohmann::json& j) {
  try {
    FittedModel m;
    m.target = j.at("target").get<std::string>();
    m.terms = j.at("terms").get<std::vector<std::string>>();
    for (const auto& v : j.at("coefficients")) m.coefficients.push_back(detail::number_from(v));
    for (const auto& v : j.at("std_errors")) m.std_errors.push_back(detail::number_from(v));
    for (const auto& v : j.at("p_values")) m.p_values.push_back(detail::number_from(v));
    m.log_likelihood = detail::number_from(j.at("log_likelihood"));
    m.aic = detail::number_from(j.at("aic"));
    m.n_obs = j.at("n_obs").get<std::size_t>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.value("iterations", 0);
    if (j.contains("non_scorable")) {
      for (const auto& s : j.at("non_scorable")) m.non_scorable.insert(s.get<std::string>());
    }
    if (m.terms.empty() || m.terms.size() != m.coefficients.size() || m.terms.size() != m.std_errors.size())
      throw InputError("model file: inconsistent term and coefficient counts");
    if (std::isnan(m.coefficients[0])) throw InputError("model file: missing intercept");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
}

inline void write_model_json(std::ostream& out, const FittedModel& m,
                             const nlohmann::ordered_json& provenance = nlohmann::ordered_json::object()) {
  out << model_to_json(m, provenance).dump(2) << '\n';
}

inline FittedModel read_model_json(std::istream& in) {
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError("model file is not valid JSON");
  return model_from_json(j);
}

// Published accident-probability models (5,050 drivers): coefficients and
// standard errors as printed, rounded to three decimals. The mileage
// coefficient prints as 0.000 and cannot be used for scoring. The printed
// log-likelihoods are truncated integers; the stored value is recovered from
// the printed AIC so that AIC = 2k - 2 logL holds.
struct ReferenceModel {
  FittedModel model;
  double printed_log_likelihood = 0.0;
  double printed_aic = 0.0;
  std::vector<std::string> printed_stars;  // aligned with model.terms
};

namespace detail {

struct RefTerm {
  std::string_view name;
  double coef;
  double se;
  std::string_view stars;
};

inline ReferenceModel make_reference(Target target, std::vector<RefTerm> terms, double printed_ll,
                                     double printed_aic) {
  ReferenceModel r;
  r.printed_log_likelihood = printed_ll;
  r.printed_aic = printed_aic;
  auto& m = r.model;
  m.target = std::string(to_string(target));
  m.n_obs = 5050;
  m.converged = true;
  for (const auto& t : terms) {
    m.terms.emplace_back(t.name);
    m.coefficients.push_back(t.coef);
    m.std_errors.push_back(t.se);
    r.printed_stars.emplace_back(t.stars);
    if (t.name != kInterceptName && t.coef == 0.0) m.non_scorable.insert(std::string(t.name));
  }
  m.p_values = wald_pvalues(m);
  m.aic = printed_aic;
  m.log_likelihood = (2.0 * static_cast<double>(m.k()) - printed_aic) / 2.0;
  return r;
}

}  // namespace detail

inline const std::vector<ReferenceModel>& reference_models() {
  using detail::make_reference;
  static const std::vector<ReferenceModel> models = {
      make_reference(Target::any,
                     {{kInterceptName, -2.880, 0.196, "***"},
                      {"mileage", 0.000, 0.000, "***"},
                      {"a1", 0.010, 0.003, "***"},
                      {"a2", -0.029, 0.013, "**"},
                      {"max_mj_sp", 0.004, 0.001, "***"},
                      {"avg_sp", -0.020, 0.006, "***"},
                      {"max_n_sp", 0.005, 0.001, "***"}},
                     -2080.0, 4174.6),
      make_reference(Target::weak,
                     {{kInterceptName, -3.352, 0.249, "***"},
                      {"mileage", 0.000, 0.000, "***"},
                      {"a1", 0.007, 0.003, "**"},
                      {"max_mj_sp", 0.009, 0.002, "***"},
                      {"s1", -0.047, 0.013, "***"},
                      {"avg_sp", -0.021, 0.007, "***"}},
                     -1303.0, 2618.3),
      make_reference(Target::medium,
                     {{kInterceptName, -3.863, 0.229, "***"},
                      {"mileage", 0.000, 0.000, "***"},
                      {"a1", 0.006, 0.003, "**"},
                      {"max_n_sp", 0.004, 0.002, "**"},
                      {"d_night_m", 0.004, 0.002, "*"}},
                     -1038.0, 2087.4),
      make_reference(Target::strong,
                     {{kInterceptName, -5.641, 0.388, "***"},
                      {"max_ej_sp", 0.007, 0.003, "**"},
                      {"a1", 0.022, 0.006, "***"},
                      {"a2", -0.119, 0.042, "***"},
                      {"s1", 0.017, 0.005, "***"},
                      {"max_n_sp", 0.005, 0.003, "*"}},
                     -480.0, 972.7),
  };
  return models;
}

inline const ReferenceModel& reference_model(Target target) {
  return reference_models().at(static_cast<std::size_t>(target));
}

}  // namespace ubi

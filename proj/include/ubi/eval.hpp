#pragma once

// Model evaluation (ROC AUC, hold-out split, acceleration ablation) and
// dataset reports (descriptive statistics, correlation matrix).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ubi/csv.hpp"
#include "ubi/error.hpp"
#include "ubi/glm.hpp"

namespace ubi {

// Probability that a random positive outscores a random negative, ties
// counting one half. Computed from the rank sum of the positives.
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += l != 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabelsError("roc_auc: labels contain a single class");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // ranks i+1 .. j+1 share their mean
    const double mid = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] != 0) rank_sum_pos += mid;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

struct SplitSpec {
  double test_fraction = 0.10;
  std::uint64_t seed = 1;
  bool stratify = false;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Random hold-out split of row indices 0..n-1; reproducible from the seed.
// The test part has round(test_fraction * n) rows (per class when stratified).
inline Split train_test_split(std::size_t n, const SplitSpec& spec, std::span<const int> labels = {}) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw InputError("test fraction must lie strictly between 0 and 1");
  if (n < 10) throw InputError("train/test split needs at least 10 rows");
  std::mt19937_64 rng(spec.seed);
  Split s;
  auto take = [&](std::vector<std::size_t> idx) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(idx.size())));
    s.test.insert(s.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train.insert(s.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  };
  if (spec.stratify) {
    if (labels.size() != n) throw InputError("stratified split needs one label per row");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos : neg).push_back(i);
    take(std::move(neg));
    take(std::move(pos));
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    take(std::move(idx));
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// Mean and sample standard deviation (NaN below two values).
struct GroupSummary {
  double mean = std::nan("");
  double std = std::nan("");
  std::size_t n = 0;
};

inline GroupSummary summarize(const std::vector<double>& v) {
  GroupSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  long double sum = 0.0L;
  for (double x : v) sum += x;
  s.mean = static_cast<double>(sum / static_cast<long double>(v.size()));
  if (v.size() > 1) {
    long double ss = 0.0L;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(static_cast<double>(ss / static_cast<long double>(v.size() - 1)));
  }
  return s;
}

struct EvalReport {
  std::string target;
  std::vector<std::string> features;
  double auc_in_sample = 0.0;
  double auc_out_of_sample = 0.0;  // NaN when the test part has one class
  double mcfadden_r2 = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> diagnostics;
};

inline std::vector<double> predict_all(const FittedModel& m, const DesignMatrix& d) {
  Eigen::VectorXd beta(static_cast<Eigen::Index>(m.coefficients.size()));
  for (std::size_t j = 0; j < m.coefficients.size(); ++j) beta(static_cast<Eigen::Index>(j)) = m.coefficients[j];
  const Eigen::VectorXd eta = d.x() * beta;
  std::vector<double> p(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) p[static_cast<std::size_t>(i)] = sigmoid(eta(i));
  return p;
}

inline std::vector<int> labels_of(const DesignMatrix& d) {
  std::vector<int> y(d.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = d.y()(static_cast<Eigen::Index>(i)) > 0.5 ? 1 : 0;
  return y;
}

// Fits on the training part and scores both parts.
inline EvalReport evaluate_model(const DesignMatrix& design, const SplitSpec& spec, const FitOptions& opts = {}) {
  const auto y = labels_of(design);
  const auto split = train_test_split(design.rows(), spec, y);
  const auto train = design.subset(split.train);
  const auto test = design.subset(split.test);
  const auto model = fit_logistic(train, opts);

  EvalReport r;
  r.target = design.target();
  r.features = design.feature_names();
  r.n_train = train.rows();
  r.n_test = test.rows();
  r.seed = spec.seed;
  r.auc_in_sample = roc_auc(predict_all(model, train), labels_of(train));
  r.mcfadden_r2 = mcfadden_r2(model, null_log_likelihood(train.y()));
  const auto test_y = labels_of(test);
  const auto test_pos = std::count(test_y.begin(), test_y.end(), 1);
  if (test_pos == 0 || test_pos == static_cast<std::ptrdiff_t>(test_y.size())) {
    r.auc_out_of_sample = std::nan("");
    r.diagnostics.push_back("out-of-sample AUC undefined: test part has a single class");
  } else {
    r.auc_out_of_sample = roc_auc(predict_all(model, test), test_y);
  }
  return r;
}

// Summary of evaluate_model over several splits with seeds seed, seed+1, ...
struct RepeatedEval {
  std::string target;
  std::vector<std::string> features;
  std::size_t repeats = 0;
  GroupSummary auc_in_sample;
  GroupSummary auc_out_of_sample;  // over the splits whose test part has both classes
  GroupSummary mcfadden_r2;
  std::size_t undefined_out_of_sample = 0;
  std::uint64_t first_seed = 0;
};

inline RepeatedEval evaluate_repeated(const DesignMatrix& design, const SplitSpec& spec, std::size_t repeats,
                                      const FitOptions& opts = {}) {
  if (repeats == 0) throw InputError("repeated evaluation needs at least one split");
  std::vector<double> in, out, r2;
  RepeatedEval r;
  r.target = design.target();
  r.features = design.feature_names();
  r.repeats = repeats;
  r.first_seed = spec.seed;
  for (std::size_t i = 0; i < repeats; ++i) {
    SplitSpec s = spec;
    s.seed = spec.seed + i;
    const auto e = evaluate_model(design, s, opts);
    in.push_back(e.auc_in_sample);
    r2.push_back(e.mcfadden_r2);
    if (std::isnan(e.auc_out_of_sample)) ++r.undefined_out_of_sample;
    else out.push_back(e.auc_out_of_sample);
  }
  r.auc_in_sample = summarize(in);
  r.auc_out_of_sample = summarize(out);
  r.mcfadden_r2 = summarize(r2);
  return r;
}

struct AblationResult {
  std::string target;
  std::vector<std::string> group;
  double r2_with = 0.0;
  double r2_without = 0.0;
  double difference = 0.0;  // with - without
};

// McFadden R2 with and without a group of features, same rows.
inline AblationResult ablation_compare(const DesignMatrix& design, const std::vector<std::string>& group,
                                       const FitOptions& opts = {}) {
  const auto& names = design.feature_names();
  for (const auto& g : group) {
    if (std::find(names.begin(), names.end(), g) == names.end())
      throw InputError("ablation group member '" + g + "' is not a design column");
  }
  const double null_ll = null_log_likelihood(design.y());
  AblationResult r;
  r.target = design.target();
  r.group = group;
  r.r2_with = mcfadden_r2(fit_logistic(design, opts), null_ll);
  r.r2_without = mcfadden_r2(fit_logistic(design.without(group), opts), null_ll);
  r.difference = r.r2_with - r.r2_without;
  return r;
}

struct DescriptiveRow {
  std::string feature;
  GroupSummary with_accident;
  GroupSummary without_accident;
};

// Mean and sample standard deviation of each column split by target value.
// columns[j][i] is feature j of observation i.
inline std::vector<DescriptiveRow> descriptive_stats(const std::vector<std::string>& names,
                                                     const std::vector<std::vector<double>>& columns,
                                                     std::span<const int> target,
                                                     std::vector<std::string>* diagnostics = nullptr) {
  std::vector<DescriptiveRow> out;
  const auto n_acc = static_cast<std::size_t>(std::count(target.begin(), target.end(), 1));
  if (diagnostics) {
    if (n_acc == 0) diagnostics->push_back("no observations with accidents");
    if (n_acc == target.size()) diagnostics->push_back("no observations without accidents");
  }
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (columns[j].size() != target.size()) throw InputError("descriptive_stats: column length mismatch");
    std::vector<double> acc, none;
    for (std::size_t i = 0; i < target.size(); ++i) (target[i] ? acc : none).push_back(columns[j][i]);
    out.push_back({names[j], summarize(acc), summarize(none)});
  }
  return out;
}

// Pearson correlations; entries involving a zero-variance column are NaN.
inline std::vector<std::vector<double>> correlation_matrix(const std::vector<std::vector<double>>& columns,
                                                           std::vector<std::size_t>* zero_variance = nullptr) {
  const std::size_t k = columns.size();
  if (k == 0) return {};
  const std::size_t n = columns[0].size();
  if (n < 2) throw InputError("correlation matrix needs at least 2 rows");
  std::vector<std::vector<double>> centered(k, std::vector<double>(n));
  std::vector<double> norm(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (columns[j].size() != n) throw InputError("correlation_matrix: column length mismatch");
    long double sum = 0.0L;
    for (double x : columns[j]) sum += x;
    const double mean = static_cast<double>(sum / static_cast<long double>(n));
    long double ss = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      centered[j][i] = columns[j][i] - mean;
      ss += centered[j][i] * centered[j][i];
    }
    norm[j] = std::sqrt(static_cast<double>(ss));
    if (norm[j] == 0.0 && zero_variance) zero_variance->push_back(j);
  }
  std::vector<std::vector<double>> r(k, std::vector<double>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double v;
      if (norm[a] == 0.0 || norm[b] == 0.0) {
        v = std::nan("");
      } else if (a == b) {
        v = 1.0;
      } else {
        long double dot = 0.0L;
        for (std::size_t i = 0; i < n; ++i) dot += static_cast<long double>(centered[a][i]) * centered[b][i];
        v = std::clamp(static_cast<double>(dot) / (norm[a] * norm[b]), -1.0, 1.0);
      }
      r[a][b] = r[b][a] = v;
    }
  }
  return r;
}

// ---- report CSVs ----------------------------------------------------------

inline void write_eval_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  std::vector<std::string> header{"metric"};
  for (const auto& r : reports) header.push_back(r.target);
  out << csv::join(header) << '\n';
  auto row = [&](const std::string& name, auto get) {
    std::vector<std::string> f{name};
    for (const auto& r : reports) f.push_back(get(r));
    out << csv::join(f) << '\n';
  };
  row("auc_in_sample", [](const EvalReport& r) { return csv::format_double(r.auc_in_sample); });
  row("auc_out_of_sample", [](const EvalReport& r) { return csv::format_double(r.auc_out_of_sample); });
  row("mcfadden_r2", [](const EvalReport& r) { return csv::format_double(r.mcfadden_r2); });
  row("n_train", [](const EvalReport& r) { return std::to_string(r.n_train); });
  row("n_test", [](const EvalReport& r) { return std::to_string(r.n_test); });
  row("seed", [](const EvalReport& r) { return std::to_string(r.seed); });
  row("features", [](const EvalReport& r) { return csv::join(r.features, ' '); });
}

inline void write_repeated_eval_csv(std::ostream& out, const std::vector<RepeatedEval>& reports) {
  std::vector<std::string> header{"metric"};
  for (const auto& r : reports) header.push_back(r.target);
  out << csv::join(header) << '\n';
  auto row = [&](const std::string& name, auto get) {
    std::vector<std::string> f{name};
    for (const auto& r : reports) f.push_back(get(r));
    out << csv::join(f) << '\n';
  };
  auto num = [](double v) { return csv::format_double(v); };
  row("auc_in_sample_mean", [&](const RepeatedEval& r) { return num(r.auc_in_sample.mean); });
  row("auc_in_sample_std", [&](const RepeatedEval& r) { return num(r.auc_in_sample.std); });
  row("auc_out_of_sample_mean", [&](const RepeatedEval& r) { return num(r.auc_out_of_sample.mean); });
  row("auc_out_of_sample_std", [&](const RepeatedEval& r) { return num(r.auc_out_of_sample.std); });
  row("mcfadden_r2_mean", [&](const RepeatedEval& r) { return num(r.mcfadden_r2.mean); });
  row("mcfadden_r2_std", [&](const RepeatedEval& r) { return num(r.mcfadden_r2.std); });
  row("repeats", [](const RepeatedEval& r) { return std::to_string(r.repeats); });
  row("undefined_out_of_sample", [](const RepeatedEval& r) { return std::to_string(r.undefined_out_of_sample); });
  row("first_seed", [](const RepeatedEval& r) { return std::to_string(r.first_seed); });
  row("features", [](const RepeatedEval& r) { return csv::join(r.features, ' '); });
}

inline void write_ablation_csv(std::ostream& out, const std::vector<AblationResult>& results) {
  std::vector<std::string> header{"metric"};
  for (const auto& r : results) header.push_back(r.target);
  out << csv::join(header) << '\n';
  auto row = [&](const std::string& name, auto get) {
    std::vector<std::string> f{name};
    for (const auto& r : results) f.push_back(csv::format_double(get(r)));
    out << csv::join(f) << '\n';
  };
  row("r2_with_group", [](const AblationResult& r) { return r.r2_with; });
  row("r2_without_group", [](const AblationResult& r) { return r.r2_without; });
  row("difference", [](const AblationResult& r) { return r.difference; });
}

inline void write_descriptive_csv(std::ostream& out, const std::vector<DescriptiveRow>& rows) {
  out << "feature,mean_with_accidents,std_with_accidents,mean_without_accidents,std_without_accidents\n";
  for (const auto& r : rows) {
    out << csv::join({r.feature, csv::format_double(r.with_accident.mean), csv::format_double(r.with_accident.std),
                      csv::format_double(r.without_accident.mean), csv::format_double(r.without_accident.std)})
        << '\n';
  }
}

inline void write_correlation_csv(std::ostream& out, const std::vector<std::string>& names,
                                  const std::vector<std::vector<double>>& r) {
  std::vector<std::string> header{""};
  header.insert(header.end(), names.begin(), names.end());
  out << csv::join(header) << '\n';
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::vector<std::string> f{names[a]};
    for (double v : r[a]) f.push_back(csv::format_double(v));
    out << csv::join(f) << '\n';
  }
}

}  // namespace ubi

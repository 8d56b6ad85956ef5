#pragma once

// Logistic regression by iteratively reweighted least squares, Wald
// inference, backward elimination, scoring and premium arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ubi/error.hpp"

namespace ubi {

inline constexpr const char* kInterceptName = "(Intercept)";

// Observations x (intercept + named features) with a binary target.
class DesignMatrix {
 public:
  DesignMatrix() = default;

  // rows[i] holds the feature values of observation i in `names` order.
  DesignMatrix(std::vector<std::string> names, const std::vector<std::vector<double>>& rows, std::vector<int> y,
               std::string target = {})
      : names_(std::move(names)), target_(std::move(target)) {
    if (rows.size() != y.size()) throw InputError("design: row count does not match target length");
    x_.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names_.size() + 1));
    y_.resize(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != names_.size()) throw InputError("design: row width does not match feature names");
      const auto r = static_cast<Eigen::Index>(i);
      x_(r, 0) = 1.0;
      for (std::size_t j = 0; j < names_.size(); ++j) {
        if (!std::isfinite(rows[i][j]))
          throw InputError("design: missing or non-finite value for '" + names_[j] + "' in row " + std::to_string(i));
        x_(r, static_cast<Eigen::Index>(j + 1)) = rows[i][j];
      }
      if (y[i] != 0 && y[i] != 1) throw InputError("design: target must be 0 or 1");
      y_(r) = y[i];
    }
  }

  const std::vector<std::string>& feature_names() const { return names_; }
  std::vector<std::string> column_names() const {
    std::vector<std::string> c{kInterceptName};
    c.insert(c.end(), names_.begin(), names_.end());
    return c;
  }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  const std::string& target() const { return target_; }
  std::size_t rows() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t positives() const { return static_cast<std::size_t>(y_.sum()); }

  // Keeps the intercept and the named features, in the given order.
  DesignMatrix select(const std::vector<std::string>& keep) const {
    std::vector<Eigen::Index> idx{0};
    for (const auto& k : keep) idx.push_back(index_of(k) + 1);
    DesignMatrix d;
    d.names_ = keep;
    d.target_ = target_;
    d.y_ = y_;
    d.x_ = x_(Eigen::all, idx);
    return d;
  }

  DesignMatrix without(const std::vector<std::string>& drop) const {
    std::vector<std::string> keep;
    for (const auto& n : names_) {
      if (std::find(drop.begin(), drop.end(), n) == drop.end()) keep.push_back(n);
    }
    return select(keep);
  }

  DesignMatrix subset(const std::vector<std::size_t>& row_indices) const {
    std::vector<Eigen::Index> idx(row_indices.begin(), row_indices.end());
    DesignMatrix d;
    d.names_ = names_;
    d.target_ = target_;
    d.x_ = x_(idx, Eigen::all);
    d.y_ = y_(idx);
    return d;
  }

 private:
  Eigen::Index index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InputError("design has no feature '" + name + "'");
    return static_cast<Eigen::Index>(it - names_.begin());
  }

  std::vector<std::string> names_;
  std::string target_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

struct FitOptions {
  double tol = 1e-8;  // max-norm of the score vector at convergence
  int max_iter = 50;
  // Separation is declared once a standardized coefficient (|beta_j| times
  // the column's standard deviation; the intercept evaluated at the column
  // means) exceeds this.
  double separation_bound = 30.0;
};

struct FittedModel {
  std::string target;
  std::vector<std::string> terms;  // "(Intercept)" first
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> p_values;  // NaN where the standard error is unusable
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;
  bool converged = false;
  int iterations = 0;
  // Terms that must not enter scores (e.g. coefficients rounded to zero).
  std::set<std::string> non_scorable;

  std::size_t k() const { return coefficients.size(); }
  std::vector<std::string> feature_names() const { return {terms.begin() + 1, terms.end()}; }
  std::optional<std::size_t> term_index(const std::string& name) const {
    auto it = std::find(terms.begin(), terms.end(), name);
    if (it == terms.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms.begin());
  }
};

inline double aic_from(std::size_t k, double log_likelihood) {
  return 2.0 * static_cast<double>(k) - 2.0 * log_likelihood;
}

inline double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(sigmoid(eta)) without overflow.
inline double log_sigmoid(double eta) {
  return eta >= 0.0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
}

// Two-sided p-value of a standard-normal statistic.
inline double two_sided_normal_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

// Log-likelihood of the constant model with the sample base rate.
inline double null_log_likelihood(const Eigen::VectorXd& y) {
  const double n = static_cast<double>(y.size());
  const double n1 = y.sum();
  const double n0 = n - n1;
  double ll = 0.0;
  if (n1 > 0.0) ll += n1 * std::log(n1 / n);
  if (n0 > 0.0) ll += n0 * std::log(n0 / n);
  return ll;
}

namespace detail {

struct IrlsResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;
  double log_likelihood = 0.0;
  double score_max = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  long double ll = 0.0L;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += y(i) * log_sigmoid(eta(i)) + (1.0 - y(i)) * log_sigmoid(-eta(i));
  }
  return static_cast<double>(ll);
}

// X^T (y - p), accumulated in extended precision.
inline Eigen::VectorXd score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  Eigen::VectorXd g(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < x.rows(); ++i) s += static_cast<long double>(x(i, j)) * (y(i) - p(i));
    g(j) = static_cast<double>(s);
  }
  return g;
}

inline Eigen::MatrixXd information(const Eigen::MatrixXd& x, const Eigen::VectorXd& p) {
  const Eigen::VectorXd w = p.array() * (1.0 - p.array());
  return x.transpose() * w.asDiagonal() * x;
}

// Columns (by index) that are linear combinations of earlier pivots.
inline std::vector<Eigen::Index> dependent_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd scaled = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm > 0.0) scaled.col(j) /= norm;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = rank; k < x.cols(); ++k) out.push_back(qr.colsPermutation().indices()(k));
  std::sort(out.begin(), out.end());
  return out;
}

// Inverse of a symmetric positive-definite matrix after diagonal scaling.
inline std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& h) {
  const Eigen::VectorXd s = h.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd hs = s.asDiagonal() * h * s.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(hs);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
  return Eigen::MatrixXd(s.asDiagonal() * inv * s.asDiagonal());
}

// Newton-Raphson on the Bernoulli log-likelihood. y may hold fractional
// responses in [0, 1]; the score equations are the same.
inline IrlsResult irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                       const FitOptions& opts) {
  const Eigen::Index n = x.rows(), k = x.cols();
  if (auto dep = dependent_columns(x); !dep.empty()) {
    std::vector<std::string> cols;
    for (auto j : dep) cols.push_back(names[static_cast<std::size_t>(j)]);
    std::string list;
    for (const auto& c : cols) list += (list.empty() ? "" : ", ") + c;
    throw CollinearityError("collinear design columns: " + list, cols);
  }

  Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd col_mean = Eigen::VectorXd::Zero(k);
  for (Eigen::Index j = 1; j < k; ++j) {
    col_mean(j) = x.col(j).mean();
    const double var =
        (x.col(j).array() - col_mean(j)).square().sum() / std::max<double>(1.0, static_cast<double>(n - 1));
    col_scale(j) = std::sqrt(var);
  }

  IrlsResult r;
  r.beta = Eigen::VectorXd::Zero(k);
  const double ybar = std::clamp(y.mean(), 1e-12, 1.0 - 1e-12);
  r.beta(0) = std::log(ybar / (1.0 - ybar));
  double ll = log_likelihood(x, y, r.beta);

  auto check_separation = [&](const Eigen::VectorXd& b) {
    // The intercept is judged at the column means, so that a diverging
    // slope does not get blamed on it.
    std::vector<std::string> cols;
    const double centred_intercept = b(0) + b.dot(col_mean);
    if (std::fabs(centred_intercept) > opts.separation_bound) cols.push_back(names[0]);
    for (Eigen::Index j = 1; j < k; ++j) {
      if (std::fabs(b(j)) * col_scale(j) > opts.separation_bound) cols.push_back(names[static_cast<std::size_t>(j)]);
    }
    if (!cols.empty()) {
      std::string list;
      for (const auto& c : cols) list += (list.empty() ? "" : ", ") + c;
      throw SeparationError("separation detected; diverging coefficients: " + list, cols);
    }
  };

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd p = (x * r.beta).unaryExpr([](double e) { return sigmoid(e); });
    const Eigen::VectorXd g = score(x, y, p);
    r.score_max = g.cwiseAbs().maxCoeff();
    r.iterations = iter;
    if (r.score_max <= opts.tol) {
      r.converged = true;
      break;
    }
    if (iter >= opts.max_iter) break;
    const Eigen::MatrixXd h = information(x, p);
    auto inv = spd_inverse(h);
    if (!inv) throw CollinearityError("information matrix is singular");
    Eigen::VectorXd step = *inv * g;
    // Step halving keeps the likelihood from decreasing.
    double t = 1.0;
    Eigen::VectorXd next = r.beta + step;
    double next_ll = log_likelihood(x, y, next);
    while (next_ll < ll - 1e-12 * (1.0 + std::fabs(ll)) && t > 1e-6) {
      t *= 0.5;
      next = r.beta + t * step;
      next_ll = log_likelihood(x, y, next);
    }
    check_separation(next);
    r.beta = next;
    ll = next_ll;
  }

  const Eigen::VectorXd p = (x * r.beta).unaryExpr([](double e) { return sigmoid(e); });
  if (!r.converged) {
    const double pmin = p.minCoeff(), pmax = p.maxCoeff();
    if (pmin < 1e-10 || pmax > 1.0 - 1e-10) {
      throw SeparationError("quasi-complete separation: fitted probabilities reach 0 or 1", names);
    }
  }
  r.log_likelihood = log_likelihood(x, y, r.beta);
  auto inv = spd_inverse(information(x, p));
  if (!inv) throw CollinearityError("information matrix is singular at the solution");
  r.covariance = *inv;
  (void)n;
  return r;
}

inline FittedModel to_model(const DesignMatrix& d, const IrlsResult& r) {
  FittedModel m;
  m.target = d.target();
  m.terms = d.column_names();
  m.n_obs = d.rows();
  m.converged = r.converged;
  m.iterations = r.iterations;
  m.log_likelihood = r.log_likelihood;
  m.aic = aic_from(static_cast<std::size_t>(r.beta.size()), r.log_likelihood);
  for (Eigen::Index j = 0; j < r.beta.size(); ++j) {
    m.coefficients.push_back(r.beta(j));
    const double var = r.covariance(j, j);
    m.std_errors.push_back(var > 0.0 ? std::sqrt(var) : std::nan(""));
  }
  return m;
}

}  // namespace detail

// Two-sided Wald p-values z = beta / SE. Coefficients whose SE is zero or
// not finite get NaN.
inline std::vector<double> wald_pvalues(const FittedModel& model) {
  std::vector<double> p;
  for (std::size_t j = 0; j < model.coefficients.size(); ++j) {
    const double se = model.std_errors[j];
    if (!(se > 0.0) || !std::isfinite(se)) {
      p.push_back(std::nan(""));
      continue;
    }
    p.push_back(two_sided_normal_p(model.coefficients[j] / se));
  }
  return p;
}

// Terms whose Wald statistic cannot be formed.
inline std::vector<std::string> flagged_terms(const FittedModel& model) {
  std::vector<std::string> out;
  auto p = wald_pvalues(model);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (std::isnan(p[j])) out.push_back(model.terms[j]);
  }
  return out;
}

// Maximum-likelihood logistic fit, p_i = 1 / (1 + exp(-x_i . beta)).
inline FittedModel fit_logistic(const DesignMatrix& design, const FitOptions& opts = {}) {
  const std::size_t n1 = design.positives();
  if (n1 == 0 || n1 == design.rows())
    throw DegenerateLabelsError("single-class target" + (design.target().empty() ? "" : " '" + design.target() + "'"));

  detail::IrlsResult r;
  if (design.feature_names().empty()) {
    // Closed form: the intercept is the logit of the base rate.
    const double n = static_cast<double>(design.rows());
    const double ybar = static_cast<double>(n1) / n;
    r.beta = Eigen::VectorXd::Constant(1, std::log(ybar / (1.0 - ybar)));
    r.log_likelihood = null_log_likelihood(design.y());
    r.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0 / (n * ybar * (1.0 - ybar)));
    r.converged = true;
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(design.x().rows(), sigmoid(r.beta(0)));
    r.score_max = detail::score(design.x(), design.y(), p).cwiseAbs().maxCoeff();
  } else {
    r = detail::irls(design.x(), design.y(), design.column_names(), opts);
  }
  auto m = detail::to_model(design, r);
  m.p_values = wald_pvalues(m);
  return m;
}

// Refits while the largest non-intercept p-value exceeds alpha, dropping
// that term each round; ties go to the earliest column.
inline FittedModel backward_eliminate(const DesignMatrix& design, double alpha, const FitOptions& opts = {}) {
  std::vector<std::string> keep = design.feature_names();
  while (true) {
    auto model = fit_logistic(design.select(keep), opts);
    std::optional<std::size_t> worst;
    double worst_p = alpha;
    for (std::size_t j = 1; j < model.p_values.size(); ++j) {
      double p = model.p_values[j];
      if (std::isnan(p)) p = 1.0;
      if (p > worst_p) {
        worst_p = p;
        worst = j;
      }
    }
    if (!worst) return model;
    keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(*worst - 1));
  }
}

inline double mcfadden_r2(const FittedModel& model, double null_loglik) {
  if (null_loglik == 0.0) throw Error("McFadden R2 undefined: null log-likelihood is zero");
  return 1.0 - model.log_likelihood / null_loglik;
}

// Linear predictor x . beta. `lookup` returns the value of a named feature
// or nullopt when it is missing. Non-scorable terms contribute nothing.
inline double log_odds(const FittedModel& model,
                       const std::function<std::optional<double>(const std::string&)>& lookup) {
  double eta = model.coefficients.at(0);
  for (std::size_t j = 1; j < model.terms.size(); ++j) {
    if (model.non_scorable.count(model.terms[j])) continue;
    auto v = lookup(model.terms[j]);
    if (!v || !std::isfinite(*v)) throw InputError("missing feature '" + model.terms[j] + "' for scoring");
    eta += model.coefficients[j] * *v;
  }
  return eta;
}

inline double log_odds(const FittedModel& model, const std::map<std::string, double>& features) {
  return log_odds(model, [&](const std::string& name) -> std::optional<double> {
    auto it = features.find(name);
    if (it == features.end()) return std::nullopt;
    return it->second;
  });
}

inline double predict_proba(const FittedModel& model, const std::map<std::string, double>& features) {
  return sigmoid(log_odds(model, features));
}

// Premium = accident probability * predicted loss + admin costs + margin.
inline double compute_premium(double p_accident, double predicted_loss, double admin_costs, double margin) {
  if (!(p_accident >= 0.0 && p_accident <= 1.0)) throw InputError("accident probability must lie in [0, 1]");
  if (!(predicted_loss >= 0.0) || !(admin_costs >= 0.0) || !(margin >= 0.0))
    throw InputError("premium inputs must be non-negative");
  return p_accident * predicted_loss + admin_costs + margin;
}

}  // namespace ubi

#include "ncvcox/error_measures.hpp"

#include "ncvcox/concordance.hpp"
#include "ncvcox/error.hpp"

#include <cmath>
#include <limits>

namespace ncvcox {

std::string to_string(ErrorMeasureKind kind) {
  switch (kind) {
    case ErrorMeasureKind::c_index: return "c_index";
    case ErrorMeasureKind::log_pl_per_n: return "log_pl_per_n";
    case ErrorMeasureKind::log_pl_per_nlogn: return "log_pl_per_nlogn";
    case ErrorMeasureKind::null_deviance_diff: return "null_deviance_diff";
  }
  return "unknown";
}

ErrorMeasureKind parse_error_measure(const std::string& name) {
  for (auto k : {ErrorMeasureKind::c_index, ErrorMeasureKind::log_pl_per_n, ErrorMeasureKind::log_pl_per_nlogn,
                 ErrorMeasureKind::null_deviance_diff}) {
    if (to_string(k) == name) return k;
  }
  config_error("unknown error measure '" + name + "'");
}

double test_error(ErrorMeasureKind kind, const Vector& beta, const SurvivalDataset& test) {
  const Vector eta = linear_predictor(beta, test.x());
  const PartialLikelihood plik(test);
  const double n = static_cast<double>(test.n());
  switch (kind) {
    case ErrorMeasureKind::c_index: {
      std::vector<double> pred(eta.data(), eta.data() + eta.size());
      return c_index(test.times(), test.status(), pred).c_index;
    }
    case ErrorMeasureKind::log_pl_per_n:
      return plik.log_pl(eta) / n;
    case ErrorMeasureKind::log_pl_per_nlogn:
      return plik.log_pl(eta) / (n * std::log(n));
    case ErrorMeasureKind::null_deviance_diff:
      return plik.log_pl(Vector::Zero(test.n())) - plik.log_pl(eta);
  }
  config_error("unknown error measure");
}

CvPartialLikelihood cv_partial_likelihood(const SurvivalDataset& dataset, const PenaltySpec& penalty,
                                          const FoldAssignment& folds, const FitOptions& options) {
  if (static_cast<Index>(folds.fold_of.size()) != dataset.n()) config_error("fold assignment does not match dataset");
  PenaltySpec fixed = penalty;
  fixed.lambda_path = lambda_sequence(dataset, penalty);
  const auto n_lambda = static_cast<Index>(fixed.lambda_path.size());

  const PartialLikelihood full(dataset);
  CvPartialLikelihood out;
  out.lambda_path = fixed.lambda_path;
  out.per_fold = Matrix::Zero(folds.k, n_lambda);
  for (int f = 0; f < folds.k; ++f) {
    const auto train_rows = folds.complement(f);
    if (folds.members(f).empty()) data_error("fold " + std::to_string(f) + " is empty");
    const auto train = dataset.subset(train_rows);
    const auto fit = fit_path(train, fixed, options);
    const PartialLikelihood reduced(train);
    for (Index l = 0; l < n_lambda; ++l) {
      const Vector beta = fit.beta(l);
      out.per_fold(f, l) = full.log_pl(dataset.x() * beta) - reduced.log_pl(train.x() * beta);
    }
  }
  out.values.resize(static_cast<std::size_t>(n_lambda));
  for (Index l = 0; l < n_lambda; ++l) out.values[static_cast<std::size_t>(l)] = out.per_fold.col(l).sum();
  return out;
}

std::string to_string(LambdaRule rule) { return rule == LambdaRule::max ? "max" : "one_se"; }

LambdaRule parse_lambda_rule(const std::string& name) {
  if (name == "max") return LambdaRule::max;
  if (name == "one_se") return LambdaRule::one_se;
  config_error("unknown lambda rule '" + name + "' (expected max or one_se)");
}

Index select_lambda(const std::vector<double>& cvpl, LambdaRule rule, const Matrix& per_fold) {
  if (cvpl.empty()) config_error("empty CV-PL vector");
  Index best = -1;
  for (std::size_t l = 0; l < cvpl.size(); ++l) {
    if (!std::isfinite(cvpl[l])) continue;
    if (best < 0 || cvpl[l] > cvpl[static_cast<std::size_t>(best)]) best = static_cast<Index>(l);
  }
  if (best < 0) numerical_error("every CV-PL value is non-finite");
  if (rule == LambdaRule::max) return best;

  if (per_fold.cols() != static_cast<Index>(cvpl.size()) || per_fold.rows() < 2) {
    config_error("one_se rule needs a K x n_lambda per-fold matrix with K >= 2");
  }
  const double k = static_cast<double>(per_fold.rows());
  const auto col = per_fold.col(best);
  const double mean = col.mean();
  const double sd = std::sqrt((col.array() - mean).square().sum() / (k - 1.0));
  const double threshold = cvpl[static_cast<std::size_t>(best)] / k - sd / std::sqrt(k);
  for (Index l = 0; l <= best; ++l) {
    const double v = cvpl[static_cast<std::size_t>(l)];
    if (std::isfinite(v) && v / k >= threshold) return l;
  }
  return best;
}

}  // namespace ncvcox

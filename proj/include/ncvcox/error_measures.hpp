#pragma once

#include "ncvcox/cox_model.hpp"
#include "ncvcox/survival_data.hpp"

#include <string>
#include <vector>

namespace ncvcox {

enum class ErrorMeasureKind { c_index, log_pl_per_n, log_pl_per_nlogn, null_deviance_diff };

std::string to_string(ErrorMeasureKind kind);
ErrorMeasureKind parse_error_measure(const std::string& name);

/// Test error of coefficients `beta` on `test`:
///   c_index            concordance of the linear predictor
///   log_pl_per_n       l(beta) / n
///   log_pl_per_nlogn   l(beta) / (n log n), natural log
///   null_deviance_diff l(0) - l(beta)
double test_error(ErrorMeasureKind kind, const Vector& beta, const SurvivalDataset& test);

struct CvPartialLikelihood {
  std::vector<double> lambda_path;
  std::vector<double> values;  // summed over folds, per lambda
  Matrix per_fold;             // K x n_lambda fold contributions
};

/// Fold-wise cross-validated partial likelihood: for each fold f the path is
/// refit without f and l_full(b) - l_{-f}(b) is accumulated per lambda. When
/// the penalty carries no explicit path, the path of the full data is used so
/// every fold shares the same lambdas.
CvPartialLikelihood cv_partial_likelihood(const SurvivalDataset& dataset, const PenaltySpec& penalty,
                                          const FoldAssignment& folds, const FitOptions& options = {});

enum class LambdaRule { max, one_se };

std::string to_string(LambdaRule rule);
LambdaRule parse_lambda_rule(const std::string& name);

/// Index into the lambda path. `max` takes the first maximizer; `one_se` the
/// first (largest-lambda) index whose fold-mean CV-PL is within one standard
/// error (fold sd / sqrt(K)) of the best fold mean.
Index select_lambda(const std::vector<double>& cvpl, LambdaRule rule, const Matrix& per_fold);

}  // namespace ncvcox

#pragma once

#include "ncvcox/cox_model.hpp"
#include "ncvcox/error_measures.hpp"
#include "ncvcox/stats.hpp"
#include "ncvcox/survival_data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ncvcox {

/// The learning procedure being cross-validated: a penalized path whose lambda
/// is picked by an internal CV-PL run on the training data alone.
struct LearnerConfig {
  PenaltySpec penalty;
  FitOptions fit;
  int selection_folds = 10;
  LambdaRule rule = LambdaRule::max;

  void validate() const;
};

struct TrainedModel {
  Vector beta;
  double lambda = 0.0;
  Index lambda_index = 0;
};

TrainedModel train_model(const SurvivalDataset& train, const LearnerConfig& learner, std::uint64_t seed);

// Seed plumbing shared by CV and nested CV so that a nested-CV repetition
// reuses exactly the fits standard CV would make with the same seed.
FoldAssignment repetition_folds(const SurvivalDataset& dataset, int k, std::uint64_t seed, int repetition);
/// inner < 0 denotes the model trained on every fold except `held_out`.
/// Otherwise symmetric in (held_out, inner): both name the same training set.
std::uint64_t model_seed(std::uint64_t seed, int repetition, int held_out, int inner);

enum class Pooling { pooled, per_fold };

std::string to_string(Pooling pooling);
Pooling parse_pooling(const std::string& name);

struct CvEstimate {
  double point = 0.0;
  std::vector<double> fold_values;  // per-fold C; NaN for folds without comparable pairs
  double naive_se = 0.0;
  Interval interval;
  double alpha = 0.1;
  LambdaRule lambda_rule = LambdaRule::max;
  Pooling pooling = Pooling::per_fold;
  int degenerate_folds = 0;
};

Interval naive_interval(double point, double se, double alpha);

/// Assembles a CV estimate from out-of-fold linear predictors.
CvEstimate cv_estimate_from_predictions(const SurvivalDataset& dataset, const FoldAssignment& folds,
                                        const std::vector<double>& out_of_fold, double alpha, Pooling pooling,
                                        LambdaRule rule);

/// K-fold CV estimate of the C-index and its naive interval.
CvEstimate cv_c_index(const SurvivalDataset& dataset, const LearnerConfig& learner, int k, double alpha,
                      std::uint64_t seed, Pooling pooling = Pooling::per_fold, int threads = 1);

}  // namespace ncvcox

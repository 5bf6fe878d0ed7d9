#pragma once

#include "ncvcox/cross_validation.hpp"
#include "ncvcox/stats.hpp"
#include "ncvcox/survival_data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ncvcox {

enum class MseFloorPolicy { zero_floor, a_fallback };

std::string to_string(MseFloorPolicy policy);
MseFloorPolicy parse_mse_floor_policy(const std::string& name);

struct NcvConfig {
  int k = 10;
  int repetitions = 50;
  double alpha = 0.1;
  std::uint64_t seed = 1;
  MseFloorPolicy mse_floor_policy = MseFloorPolicy::zero_floor;

  void validate() const;
};

/// One (repetition, held-out fold) unit of nested CV.
struct SplitRecord {
  int repetition = 0;
  int fold = 0;
  bool ok = false;
  double err_in = 0.0;   // pooled inner (K-1)-fold CV C-index
  double e_out = 0.0;    // held-out C of the model trained on the K-1 inner folds
  double var_out = 0.0;  // IJ variance of e_out
  std::string failure;
};

struct SplitResult {
  SplitRecord record;
  std::vector<double> held_out_predictions;  // aligned with folds.members(fold)
};

/// Held-out fold f: inner CV over the remaining folds plus the model trained
/// on all of them, evaluated on f.
SplitResult ncv_single_split(const SurvivalDataset& dataset, int held_out, const FoldAssignment& folds,
                             const LearnerConfig& learner, std::uint64_t seed, int repetition);

struct NcvEstimate {
  double point = 0.0;  // mean of err_in over successful splits
  std::vector<double> a_values;
  std::vector<double> b_values;
  double mse = 0.0;
  double mse_raw = 0.0;  // mean(a) - mean(b) before flooring
  bool mse_floored = false;
  double mse_alt = 0.0;  // (mean err_in - mean e_out)^2 - mean(b), for sensitivity checks
  double bias = 0.0;
  Interval interval;
  double err_cv = 0.0;  // pooled standard CV C, averaged over repetitions
  std::vector<double> err_cv_by_repetition;
  int k = 0;
  int repetitions = 0;
  double alpha = 0.1;
  int failed_splits = 0;
  std::vector<SplitRecord> trace;
  std::vector<std::string> warnings;

  /// sqrt((K-1)/K * mse), the standard error implied by the interval.
  double se() const;
};

inline constexpr double kMaxSplitFailureRate = 0.05;

/// (1 + (K-2)/K) * (err_ncv - err_cv)
double ncv_bias(double err_ncv, double err_cv, int k);
/// point - bias +/- z_{1-alpha/2} * sqrt((K-1)/K * mse)
Interval ncv_interval(const NcvEstimate& estimate, double alpha);

/// Nested-CV estimate of the MSE of the CV C-index with bias correction and
/// the resulting interval. Splits run on `threads` workers; output is
/// identical for every thread count.
NcvEstimate ncv_estimate(const SurvivalDataset& dataset, const NcvConfig& config, const LearnerConfig& learner,
                         int threads = 1);

/// Nested CV that also returns the standard CV estimate of repetition 0,
/// reusing its fits. `cv` equals cv_c_index called with the same seed.
struct NcvWithCv {
  NcvEstimate ncv;
  CvEstimate cv;
};
NcvWithCv ncv_and_cv(const SurvivalDataset& dataset, const NcvConfig& config, const LearnerConfig& learner,
                     Pooling cv_pooling = Pooling::per_fold, int threads = 1);

}  // namespace ncvcox

#pragma once

#include "ncvcox/cross_validation.hpp"
#include "ncvcox/nested_cv.hpp"
#include "ncvcox/survival_data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ncvcox {

/// Synthetic design: X iid N(0, 1), latent time t = X beta + c * eps with
/// eps iid N(0, 1), independent uniform censoring.
struct SimSpec {
  Index n_train = 100;
  Index n_test = 1000;
  Index p = 10;
  std::vector<double> beta_true;  // empty: first ceil(p/10) entries = signal, rest 0
  double signal = 0.45;
  double noise_c = 1.0;
  double censoring_rate = 0.3;
  int trials = 1;
  std::uint64_t seed = 1;

  void validate() const;
  Vector beta() const;
};

struct SimDraw {
  SurvivalDataset train;
  SurvivalDataset test;
};

/// Deterministic in (spec.seed, trial).
SimDraw generate(const SimSpec& spec, int trial);

/// Upper end u of the censoring window U(min t, u) making the expected
/// censored fraction equal `rate`. Throws Error(config) if unreachable.
double calibrate_censoring(const std::vector<double>& latent, double rate);

struct CoverageOptions {
  int k = 10;
  int repetitions = 50;
  double alpha = 0.1;
  LearnerConfig learner;
  Pooling cv_pooling = Pooling::per_fold;
  MseFloorPolicy mse_floor_policy = MseFloorPolicy::zero_floor;
  int threads = 1;

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  bool ok = false;
  std::string failure;
  double truth = 0.0;  // test-set C of the model fit on the whole training set
  double cv_point = 0.0;
  double cv_se = 0.0;
  Interval cv_interval;
  double ncv_point = 0.0;
  double ncv_se = 0.0;
  double ncv_bias = 0.0;
  double ncv_mse_raw = 0.0;
  Interval ncv_interval;
  int ncv_failed_splits = 0;
};

/// Miscoverage convention: "upper" means the truth fell below the interval
/// (interval too high), "lower" means it fell above.
struct CoverageReport {
  std::vector<TrialRecord> trials;
  int completed = 0;
  int failed = 0;
  double cv_miscoverage_upper = 0.0;
  double cv_miscoverage_lower = 0.0;
  double ncv_miscoverage_upper = 0.0;
  double ncv_miscoverage_lower = 0.0;
  double mean_se_cv = 0.0;
  double mean_se_ncv = 0.0;
  double mean_point_cv = 0.0;
  double mean_point_ncv = 0.0;
  double mean_truth = 0.0;
  double alpha = 0.1;
  int k = 10;
  int repetitions = 50;
  std::string setting;
};

inline constexpr double kMaxTrialFailureRate = 0.05;
inline constexpr const char* kMiscoverageConvention =
    "upper: truth below interval (interval too high); lower: truth above interval";

CoverageReport run_coverage(const SimSpec& spec, const CoverageOptions& options);

/// Each trial draws n_train rows without replacement for training; the rest form the test set.
CoverageReport run_real_data(const SurvivalDataset& dataset, Index n_train, int trials, std::uint64_t seed,
                             const CoverageOptions& options);

/// Train/test row split of one real-data trial (exposed for disjointness checks).
std::pair<std::vector<Index>, std::vector<Index>> real_data_split(Index n, Index n_train, std::uint64_t seed,
                                                                  int trial);

struct Fig2Row {
  Index n = 0;
  int replicate = 0;
  std::string measure;
  double value = 0.0;
};

/// For each n and replicate: fit on a training draw of size n and evaluate
/// l/n, l/(n log n) and (l_null - l)/n on an independent test draw of size n.
std::vector<Fig2Row> figure2_data(const SimSpec& base, const std::vector<Index>& n_grid, int replicates,
                                  const LearnerConfig& learner, int threads = 1);

}  // namespace ncvcox

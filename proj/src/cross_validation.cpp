#include "ncvcox/cross_validation.hpp"

#include "ncvcox/concordance.hpp"
#include "ncvcox/error.hpp"
#include "ncvcox/parallel.hpp"
#include "ncvcox/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncvcox {

namespace {
constexpr std::uint64_t kFoldStream = 0x7265703a;
constexpr std::uint64_t kModelStream = 0x6d6f646c;
}  // namespace

void LearnerConfig::validate() const {
  penalty.validate();
  if (selection_folds < 2) config_error("selection_folds must be >= 2");
  if (!(fit.tol > 0.0) || fit.max_iter < 1) config_error("tol must be > 0 and max_iter >= 1");
}

TrainedModel train_model(const SurvivalDataset& train, const LearnerConfig& learner, std::uint64_t seed) {
  learner.validate();
  PenaltySpec fixed = learner.penalty;
  fixed.lambda_path = lambda_sequence(train, learner.penalty);
  const auto path = fit_path(train, fixed, learner.fit);
  Index chosen = 0;
  if (path.size() > 1) {
    const int k = static_cast<int>(std::min<Index>(learner.selection_folds, train.event_count()));
    if (k < 2) data_error("training data has fewer than 2 events; cannot select lambda");
    const auto folds = assign_folds(train.n(), k, train.status(), seed);
    const auto cvpl = cv_partial_likelihood(train, fixed, folds, learner.fit);
    chosen = select_lambda(cvpl.values, learner.rule, cvpl.per_fold);
  }
  return TrainedModel{path.beta(chosen), path.lambda_path[static_cast<std::size_t>(chosen)], chosen};
}

FoldAssignment repetition_folds(const SurvivalDataset& dataset, int k, std::uint64_t seed, int repetition) {
  return assign_folds(dataset.n(), k, dataset.status(),
                      derive_seed(seed, {kFoldStream, static_cast<std::uint64_t>(repetition)}));
}

std::uint64_t model_seed(std::uint64_t seed, int repetition, int held_out, int inner) {
  if (inner >= 0 && inner < held_out) std::swap(held_out, inner);
  return derive_seed(seed, {kModelStream, static_cast<std::uint64_t>(repetition),
                            static_cast<std::uint64_t>(held_out), static_cast<std::uint64_t>(inner + 1)});
}

std::string to_string(Pooling pooling) { return pooling == Pooling::pooled ? "pooled" : "per_fold"; }

Pooling parse_pooling(const std::string& name) {
  if (name == "pooled") return Pooling::pooled;
  if (name == "per_fold") return Pooling::per_fold;
  config_error("unknown pooling '" + name + "' (expected pooled or per_fold)");
}

Interval naive_interval(double point, double se, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha must be in (0, 1)");
  if (!(se >= 0.0)) config_error("standard error must be >= 0");
  const double half = normal_quantile(1.0 - alpha / 2.0) * se;
  return {point - half, point + half};
}

CvEstimate cv_estimate_from_predictions(const SurvivalDataset& dataset, const FoldAssignment& folds,
                                        const std::vector<double>& out_of_fold, double alpha, Pooling pooling,
                                        LambdaRule rule) {
  CvEstimate est;
  est.alpha = alpha;
  est.pooling = pooling;
  est.lambda_rule = rule;
  std::vector<double> valid;
  for (int f = 0; f < folds.k; ++f) {
    std::vector<double> t, eta;
    std::vector<int> s;
    for (Index i : folds.members(f)) {
      t.push_back(dataset.times()[static_cast<std::size_t>(i)]);
      s.push_back(dataset.status()[static_cast<std::size_t>(i)]);
      eta.push_back(out_of_fold[static_cast<std::size_t>(i)]);
    }
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      value = c_index(t, s, eta).c_index;
      valid.push_back(value);
    } catch (const Error&) {
      ++est.degenerate_folds;
    }
    est.fold_values.push_back(value);
  }
  if (pooling == Pooling::per_fold) {
    if (valid.size() < 2) numerical_error("fewer than two folds with comparable pairs");
    est.point = mean(valid);
    est.naive_se = sample_sd(valid) / std::sqrt(static_cast<double>(valid.size()));
  } else {
    const auto pooled = c_index(dataset.times(), dataset.status(), out_of_fold);
    est.point = pooled.c_index;
    est.naive_se = std::sqrt(pooled.ij_variance);
  }
  est.interval = naive_interval(est.point, est.naive_se, alpha);
  return est;
}

CvEstimate cv_c_index(const SurvivalDataset& dataset, const LearnerConfig& learner, int k, double alpha,
                      std::uint64_t seed, Pooling pooling, int threads) {
  learner.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha must be in (0, 1)");
  const auto folds = repetition_folds(dataset, k, seed, 0);
  std::vector<double> out_of_fold(static_cast<std::size_t>(dataset.n()));
  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const auto model = train_model(dataset.subset(folds.complement(fold)), learner, model_seed(seed, 0, fold, -1));
    for (Index i : folds.members(fold)) out_of_fold[static_cast<std::size_t>(i)] = dataset.x().row(i).dot(model.beta);
  });
  return cv_estimate_from_predictions(dataset, folds, out_of_fold, alpha, pooling, learner.rule);
}

}  // namespace ncvcox

#include "ncvcox/nested_cv.hpp"

#include "ncvcox/concordance.hpp"
#include "ncvcox/error.hpp"
#include "ncvcox/parallel.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ncvcox {

namespace {

struct Column {
  std::vector<double> times;
  std::vector<int> status;
};

Column outcomes(const SurvivalDataset& dataset, const std::vector<Index>& rows) {
  Column c;
  for (Index i : rows) {
    c.times.push_back(dataset.times()[static_cast<std::size_t>(i)]);
    c.status.push_back(dataset.status()[static_cast<std::size_t>(i)]);
  }
  return c;
}

std::vector<double> predict(const SurvivalDataset& dataset, const std::vector<Index>& rows, const Vector& beta) {
  std::vector<double> eta;
  eta.reserve(rows.size());
  for (Index i : rows) eta.push_back(dataset.x().row(i).dot(beta));
  return eta;
}

// A trained model and its predictions on the listed held-out folds.
struct UnitFit {
  std::vector<int> folds;
  std::vector<std::vector<double>> predictions;
  std::string failure;
};

UnitFit fit_unit(const SurvivalDataset& dataset, const FoldAssignment& folds, const std::vector<Index>& train_rows,
                 std::vector<int> predict_folds, const LearnerConfig& learner, std::uint64_t seed) {
  UnitFit unit;
  unit.folds = std::move(predict_folds);
  try {
    const auto model = train_model(dataset.subset(train_rows), learner, seed);
    for (int f : unit.folds) unit.predictions.push_back(predict(dataset, folds.members(f), model.beta));
  } catch (const Error& e) {
    unit.failure = e.what();
    unit.predictions.clear();
  }
  return unit;
}

const std::vector<double>& predictions_for(const UnitFit& unit, int fold) {
  if (!unit.failure.empty()) numerical_error(unit.failure);
  for (std::size_t i = 0; i < unit.folds.size(); ++i) {
    if (unit.folds[i] == fold) return unit.predictions[i];
  }
  config_error("fold " + std::to_string(fold) + " was not predicted");
}

// err_in from the inner models, e_out and var_out from the outer model.
// `inner[g]` is the model trained without folds `held_out` and g.
SplitResult assemble_split(const SurvivalDataset& dataset, const FoldAssignment& folds, int held_out, int repetition,
                           const UnitFit& outer, const std::vector<const UnitFit*>& inner) {
  SplitResult result;
  result.record.repetition = repetition;
  result.record.fold = held_out;
  try {
    result.held_out_predictions = predictions_for(outer, held_out);
    std::vector<double> inner_times, inner_eta;
    std::vector<int> inner_status;
    for (int g = 0; g < folds.k; ++g) {
      if (g == held_out) continue;
      const auto& eta = predictions_for(*inner[static_cast<std::size_t>(g)], g);
      const auto oc = outcomes(dataset, folds.members(g));
      inner_times.insert(inner_times.end(), oc.times.begin(), oc.times.end());
      inner_status.insert(inner_status.end(), oc.status.begin(), oc.status.end());
      inner_eta.insert(inner_eta.end(), eta.begin(), eta.end());
    }
    result.record.err_in = c_index(inner_times, inner_status, inner_eta).c_index;

    const auto held = outcomes(dataset, folds.members(held_out));
    const auto c = c_index(held.times, held.status, result.held_out_predictions);
    result.record.e_out = c.c_index;
    result.record.var_out = c.ij_variance;
    result.record.ok = true;
  } catch (const Error& e) {
    result.record.ok = false;
    result.record.failure = e.what();
  }
  return result;
}

struct RunOutput {
  NcvEstimate estimate;
  FoldAssignment first_folds;
  std::vector<double> first_out_of_fold;
  bool first_complete = false;
};

RunOutput run(const SurvivalDataset& dataset, const NcvConfig& config, const LearnerConfig& learner, int threads) {
  config.validate();
  learner.validate();
  const int k = config.k;
  const int reps = config.repetitions;

  std::vector<FoldAssignment> folds;
  folds.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) folds.push_back(repetition_folds(dataset, k, config.seed, r));

  // Per repetition: K outer models, then one model per unordered fold pair,
  // which serves as the inner model of both splits that share its training set.
  const int pairs = k * (k - 1) / 2;
  const int per_rep = k + pairs;
  std::vector<std::pair<int, int>> pair_of;
  std::vector<int> pair_index(static_cast<std::size_t>(k * k), -1);
  for (int f = 0; f < k; ++f) {
    for (int g = f + 1; g < k; ++g) {
      pair_index[static_cast<std::size_t>(f * k + g)] = pair_index[static_cast<std::size_t>(g * k + f)] =
          static_cast<int>(pair_of.size());
      pair_of.emplace_back(f, g);
    }
  }
  std::vector<UnitFit> units(static_cast<std::size_t>(reps * per_rep));
  parallel_for(units.size(), threads, [&](std::size_t unit) {
    const int r = static_cast<int>(unit) / per_rep;
    const int u = static_cast<int>(unit) % per_rep;
    const auto& fa = folds[static_cast<std::size_t>(r)];
    if (u < k) {
      units[unit] = fit_unit(dataset, fa, fa.complement(u), {u}, learner, model_seed(config.seed, r, u, -1));
    } else {
      const auto [f, g] = pair_of[static_cast<std::size_t>(u - k)];
      units[unit] = fit_unit(dataset, fa, fa.complement(f, g), {f, g}, learner, model_seed(config.seed, r, f, g));
    }
  });

  std::vector<SplitResult> splits(static_cast<std::size_t>(reps * k));
  for (int r = 0; r < reps; ++r) {
    const auto* base = &units[static_cast<std::size_t>(r * per_rep)];
    for (int f = 0; f < k; ++f) {
      std::vector<const UnitFit*> inner(static_cast<std::size_t>(k), nullptr);
      for (int g = 0; g < k; ++g) {
        if (g != f) inner[static_cast<std::size_t>(g)] = &base[k + pair_index[static_cast<std::size_t>(f * k + g)]];
      }
      splits[static_cast<std::size_t>(r * k + f)] =
          assemble_split(dataset, folds[static_cast<std::size_t>(r)], f, r, base[f], inner);
    }
  }

  RunOutput out;
  auto& est = out.estimate;
  est.k = k;
  est.repetitions = reps;
  est.alpha = config.alpha;
  std::vector<double> err_in, e_out;
  for (int r = 0; r < reps; ++r) {
    const auto& fa = folds[static_cast<std::size_t>(r)];
    std::vector<double> oof(static_cast<std::size_t>(dataset.n()));
    bool complete = true;
    for (int f = 0; f < k; ++f) {
      const auto& split = splits[static_cast<std::size_t>(r * k + f)];
      est.trace.push_back(split.record);
      const auto members = fa.members(f);
      if (split.held_out_predictions.size() != members.size()) {
        complete = false;
      } else {
        for (std::size_t m = 0; m < members.size(); ++m) {
          oof[static_cast<std::size_t>(members[m])] = split.held_out_predictions[m];
        }
      }
      if (!split.record.ok) {
        ++est.failed_splits;
        continue;
      }
      err_in.push_back(split.record.err_in);
      e_out.push_back(split.record.e_out);
      const double d = split.record.err_in - split.record.e_out;
      est.a_values.push_back(d * d);
      est.b_values.push_back(split.record.var_out);
    }
    if (complete) {
      try {
        est.err_cv_by_repetition.push_back(c_index(dataset.times(), dataset.status(), oof).c_index);
      } catch (const Error&) {
        est.warnings.push_back("repetition " + std::to_string(r) + ": pooled CV C-index undefined");
      }
    } else {
      est.warnings.push_back("repetition " + std::to_string(r) + ": incomplete out-of-fold predictions");
    }
    if (r == 0) {
      out.first_folds = fa;
      out.first_out_of_fold = oof;
      out.first_complete = complete;
    }
  }

  const double total = static_cast<double>(reps * k);
  if (static_cast<double>(est.failed_splits) >= kMaxSplitFailureRate * total) {
    numerical_error("nested CV aborted: " + std::to_string(est.failed_splits) + " of " +
                    std::to_string(reps * k) + " splits failed");
  }
  if (est.err_cv_by_repetition.empty()) numerical_error("nested CV: no repetition produced a CV estimate");

  est.point = mean(err_in);
  est.mse_raw = mean(est.a_values) - mean(est.b_values);
  const double gap = mean(err_in) - mean(e_out);
  est.mse_alt = gap * gap - mean(est.b_values);
  if (est.mse_raw >= 0.0) {
    est.mse = est.mse_raw;
  } else {
    est.mse_floored = true;
    est.mse = config.mse_floor_policy == MseFloorPolicy::zero_floor ? 0.0 : mean(est.a_values);
    est.warnings.push_back("mean(a) - mean(b) = " + std::to_string(est.mse_raw) + " < 0; applied " +
                           to_string(config.mse_floor_policy));
  }
  est.err_cv = mean(est.err_cv_by_repetition);
  est.bias = ncv_bias(est.point, est.err_cv, k);
  est.interval = ncv_interval(est, config.alpha);
  return out;
}

}  // namespace

std::string to_string(MseFloorPolicy policy) {
  return policy == MseFloorPolicy::zero_floor ? "zero_floor" : "a_fallback";
}

MseFloorPolicy parse_mse_floor_policy(const std::string& name) {
  if (name == "zero_floor") return MseFloorPolicy::zero_floor;
  if (name == "a_fallback") return MseFloorPolicy::a_fallback;
  config_error("unknown mse floor policy '" + name + "' (expected zero_floor or a_fallback)");
}

void NcvConfig::validate() const {
  if (k < 3) config_error("nested CV needs K >= 3, got K=" + std::to_string(k));
  if (repetitions < 1) config_error("repetitions must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha must be in (0, 1)");
}

double NcvEstimate::se() const {
  return std::sqrt(static_cast<double>(k - 1) / static_cast<double>(k) * mse);
}

double ncv_bias(double err_ncv, double err_cv, int k) {
  const double kd = static_cast<double>(k);
  return (1.0 + (kd - 2.0) / kd) * (err_ncv - err_cv);
}

Interval ncv_interval(const NcvEstimate& estimate, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha must be in (0, 1)");
  if (!(estimate.mse >= 0.0)) numerical_error("mse must be >= 0");
  if (estimate.k < 2) config_error("estimate has K < 2");
  const double centre = estimate.point - estimate.bias;
  const double half = normal_quantile(1.0 - alpha / 2.0) * estimate.se();
  return {centre - half, centre + half};
}

SplitResult ncv_single_split(const SurvivalDataset& dataset, int held_out, const FoldAssignment& folds,
                             const LearnerConfig& learner, std::uint64_t seed, int repetition) {
  if (folds.k < 3) config_error("nested CV needs K >= 3");
  if (held_out < 0 || held_out >= folds.k) config_error("held-out fold out of range");
  const auto outer = fit_unit(dataset, folds, folds.complement(held_out), {held_out}, learner,
                              model_seed(seed, repetition, held_out, -1));
  std::vector<UnitFit> fits(static_cast<std::size_t>(folds.k));
  std::vector<const UnitFit*> inner(static_cast<std::size_t>(folds.k), nullptr);
  for (int g = 0; g < folds.k; ++g) {
    if (g == held_out) continue;
    fits[static_cast<std::size_t>(g)] = fit_unit(dataset, folds, folds.complement(held_out, g), {g}, learner,
                                                 model_seed(seed, repetition, held_out, g));
    inner[static_cast<std::size_t>(g)] = &fits[static_cast<std::size_t>(g)];
  }
  return assemble_split(dataset, folds, held_out, repetition, outer, inner);
}

NcvEstimate ncv_estimate(const SurvivalDataset& dataset, const NcvConfig& config, const LearnerConfig& learner,
                         int threads) {
  return run(dataset, config, learner, threads).estimate;
}

NcvWithCv ncv_and_cv(const SurvivalDataset& dataset, const NcvConfig& config, const LearnerConfig& learner,
                     Pooling cv_pooling, int threads) {
  auto out = run(dataset, config, learner, threads);
  if (!out.first_complete) numerical_error("standard CV fits of repetition 0 failed");
  auto cv = cv_estimate_from_predictions(dataset, out.first_folds, out.first_out_of_fold, config.alpha, cv_pooling,
                                         learner.rule);
  return NcvWithCv{std::move(out.estimate), std::move(cv)};
}

}  // namespace ncvcox

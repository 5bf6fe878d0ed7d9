#include "ncvcox/ncvcox.h"

#include "ncvcox/concordance.hpp"
#include "ncvcox/error.hpp"
#include "ncvcox/parallel.hpp"
#include "ncvcox/serialize.hpp"
#include "ncvcox/simulation.hpp"

#include <map>
#include <new>
#include <string>

struct ncvcox_dataset {
  ncvcox::SurvivalDataset data;
};

struct ncvcox_result {
  std::string json;
  std::string csv;
  std::string trace;
  std::map<std::string, double> scalars;
};

namespace {

thread_local std::string last_error;

template <class Fn>
ncvcox_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return NCVCOX_OK;
  } catch (const ncvcox::Error& e) {
    last_error = e.what();
    return static_cast<ncvcox_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return NCVCOX_ERR_INTERNAL;
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) ncvcox::config_error(std::string(what) + " is null");
}

ncvcox::LearnerConfig to_learner(const ncvcox_learner_config* c) {
  ncvcox::LearnerConfig l;
  if (c == nullptr) return l;
  l.penalty.alpha = c->enet_alpha;
  l.penalty.n_lambda = c->n_lambda;
  l.penalty.lambda_min_ratio = c->lambda_min_ratio;
  l.fit.tol = c->tol;
  l.fit.max_iter = c->max_iter;
  l.selection_folds = c->selection_folds;
  if (c->lambda_rule != NCVCOX_LAMBDA_MAX && c->lambda_rule != NCVCOX_LAMBDA_ONE_SE) {
    ncvcox::config_error("unknown lambda rule " + std::to_string(c->lambda_rule));
  }
  l.rule = c->lambda_rule == NCVCOX_LAMBDA_ONE_SE ? ncvcox::LambdaRule::one_se : ncvcox::LambdaRule::max;
  l.validate();
  return l;
}

ncvcox::Pooling to_pooling(int p) {
  if (p != NCVCOX_PER_FOLD && p != NCVCOX_POOLED) ncvcox::config_error("unknown pooling " + std::to_string(p));
  return p == NCVCOX_POOLED ? ncvcox::Pooling::pooled : ncvcox::Pooling::per_fold;
}

ncvcox::MseFloorPolicy to_floor(int m) {
  if (m != NCVCOX_ZERO_FLOOR && m != NCVCOX_A_FALLBACK) ncvcox::config_error("unknown mse floor " + std::to_string(m));
  return m == NCVCOX_A_FALLBACK ? ncvcox::MseFloorPolicy::a_fallback : ncvcox::MseFloorPolicy::zero_floor;
}

int to_threads(int t) { return t <= 0 ? ncvcox::default_threads() : t; }

ncvcox::SimSpec to_spec(const ncvcox_sim_config* c) {
  require(c, "simulation config");
  ncvcox::SimSpec s;
  s.n_train = static_cast<ncvcox::Index>(c->n_train);
  s.n_test = static_cast<ncvcox::Index>(c->n_test);
  s.p = static_cast<ncvcox::Index>(c->p);
  if (c->beta_true != nullptr) s.beta_true.assign(c->beta_true, c->beta_true + c->p);
  s.signal = c->signal;
  s.noise_c = c->noise_c;
  s.censoring_rate = c->censoring_rate;
  s.trials = c->trials;
  s.seed = c->seed;
  s.validate();
  return s;
}

ncvcox::CoverageOptions to_coverage(const ncvcox_coverage_config* c, const ncvcox_learner_config* learner) {
  require(c, "coverage config");
  ncvcox::CoverageOptions o;
  o.k = c->k;
  o.repetitions = c->repetitions;
  o.alpha = c->alpha;
  o.learner = to_learner(learner);
  o.cv_pooling = to_pooling(c->pooling);
  o.mse_floor_policy = to_floor(c->mse_floor);
  o.threads = to_threads(c->threads);
  o.validate();
  return o;
}

ncvcox_result* coverage_result(const ncvcox::CoverageReport& report) {
  auto* r = new ncvcox_result;
  r->json = ncvcox::to_json(report, true).dump(2);
  r->csv = ncvcox::coverage_summary_csv(report);
  for (const auto& row : ncvcox::to_json(report, true)["trials"]) r->trace += row.dump() + "\n";
  r->scalars = {{"cv_miscoverage_upper", report.cv_miscoverage_upper},
                {"cv_miscoverage_lower", report.cv_miscoverage_lower},
                {"ncv_miscoverage_upper", report.ncv_miscoverage_upper},
                {"ncv_miscoverage_lower", report.ncv_miscoverage_lower},
                {"mean_se_cv", report.mean_se_cv},
                {"mean_se_ncv", report.mean_se_ncv},
                {"mean_point_cv", report.mean_point_cv},
                {"mean_point_ncv", report.mean_point_ncv},
                {"completed_trials", report.completed},
                {"failed_trials", report.failed}};
  return r;
}

}  // namespace

extern "C" {

const char* ncvcox_version(void) { return "0.1.0"; }

const char* ncvcox_last_error(void) { return last_error.c_str(); }

void ncvcox_learner_config_default(ncvcox_learner_config* c) {
  if (c == nullptr) return;
  const ncvcox::LearnerConfig d;
  *c = ncvcox_learner_config{d.penalty.alpha, d.penalty.n_lambda, d.penalty.lambda_min_ratio, d.fit.tol,
                             d.fit.max_iter,  d.selection_folds,  NCVCOX_LAMBDA_MAX};
}

void ncvcox_cv_config_default(ncvcox_cv_config* c) {
  if (c != nullptr) *c = ncvcox_cv_config{10, 0.1, 1, NCVCOX_PER_FOLD, 0};
}

void ncvcox_ncv_config_default(ncvcox_ncv_config* c) {
  if (c == nullptr) return;
  const ncvcox::NcvConfig d;
  *c = ncvcox_ncv_config{d.k, d.repetitions, d.alpha, d.seed, NCVCOX_ZERO_FLOOR, 0};
}

void ncvcox_sim_config_default(ncvcox_sim_config* c) {
  if (c == nullptr) return;
  const ncvcox::SimSpec d;
  *c = ncvcox_sim_config{static_cast<size_t>(d.n_train), static_cast<size_t>(d.n_test), static_cast<size_t>(d.p),
                         nullptr, d.signal, d.noise_c, d.censoring_rate, d.trials, d.seed};
}

void ncvcox_coverage_config_default(ncvcox_coverage_config* c) {
  if (c == nullptr) return;
  const ncvcox::CoverageOptions d;
  *c = ncvcox_coverage_config{d.k, d.repetitions, d.alpha, NCVCOX_PER_FOLD, NCVCOX_ZERO_FLOOR, 0};
}

ncvcox_status ncvcox_dataset_create(size_t n, size_t p, const double* x, const double* times, const int* status,
                                    ncvcox_dataset** out) {
  return guarded([&] {
    require(out, "out");
    require(times, "times");
    require(status, "status");
    if (p > 0) require(x, "x");
    ncvcox::Matrix m(static_cast<ncvcox::Index>(n), static_cast<ncvcox::Index>(p));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < p; ++j) {
        m(static_cast<ncvcox::Index>(i), static_cast<ncvcox::Index>(j)) = x[i * p + j];
      }
    }
    *out = new ncvcox_dataset{ncvcox::SurvivalDataset(std::move(m), std::vector<double>(times, times + n),
                                                      std::vector<int>(status, status + n))};
  });
}

ncvcox_status ncvcox_dataset_load_csv(const char* path, const char* time_col, const char* status_col,
                                      ncvcox_dataset** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new ncvcox_dataset{ncvcox::load_csv(path, time_col ? time_col : "time", status_col ? status_col : "status")};
  });
}

ncvcox_status ncvcox_dataset_write_csv(const ncvcox_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    ncvcox::write_csv(dataset->data, path);
  });
}

ncvcox_status ncvcox_dataset_variance_filter(const ncvcox_dataset* dataset, size_t top_k, ncvcox_dataset** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = new ncvcox_dataset{ncvcox::variance_filter(dataset->data, static_cast<ncvcox::Index>(top_k))};
  });
}

size_t ncvcox_dataset_rows(const ncvcox_dataset* d) { return d ? static_cast<size_t>(d->data.n()) : 0; }
size_t ncvcox_dataset_cols(const ncvcox_dataset* d) { return d ? static_cast<size_t>(d->data.p()) : 0; }
void ncvcox_dataset_free(ncvcox_dataset* d) { delete d; }

ncvcox_status ncvcox_simulate_draw(const ncvcox_sim_config* sim, int trial, ncvcox_dataset** train,
                                   ncvcox_dataset** test) {
  return guarded([&] {
    require(train, "train");
    require(test, "test");
    auto draw = ncvcox::generate(to_spec(sim), trial);
    *train = new ncvcox_dataset{std::move(draw.train)};
    *test = new ncvcox_dataset{std::move(draw.test)};
  });
}

ncvcox_status ncvcox_concordance(size_t n, const double* times, const int* status, const double* predictors,
                                 double* c_index, double* ij_variance) {
  return guarded([&] {
    require(times, "times");
    require(status, "status");
    require(predictors, "predictors");
    const auto r = ncvcox::c_index(std::span<const double>(times, n), std::span<const int>(status, n),
                                   std::span<const double>(predictors, n));
    if (c_index) *c_index = r.c_index;
    if (ij_variance) *ij_variance = r.ij_variance;
  });
}

ncvcox_status ncvcox_fit_path(const ncvcox_dataset* dataset, const ncvcox_learner_config* learner,
                              ncvcox_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    const auto l = to_learner(learner);
    const auto fit = ncvcox::fit_path(dataset->data, l.penalty, l.fit);
    auto* r = new ncvcox_result;
    r->json = ncvcox::to_json(fit).dump(2);
    r->csv = ncvcox::fit_path_csv(fit, dataset->data.feature_names());
    r->scalars = {{"n_lambda", static_cast<double>(fit.size())}, {"lambda_max", fit.lambda_path.front()}};
    *out = r;
  });
}

ncvcox_status ncvcox_cv(const ncvcox_dataset* dataset, const ncvcox_learner_config* learner,
                        const ncvcox_cv_config* config, ncvcox_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(config, "cv config");
    require(out, "out");
    const auto est = ncvcox::cv_c_index(dataset->data, to_learner(learner), config->k, config->alpha, config->seed,
                                        to_pooling(config->pooling), to_threads(config->threads));
    auto* r = new ncvcox_result;
    r->json = ncvcox::to_json(est).dump(2);
    r->scalars = {{"point", est.point}, {"se", est.naive_se}, {"lo", est.interval.lo}, {"hi", est.interval.hi}};
    *out = r;
  });
}

ncvcox_status ncvcox_ncv(const ncvcox_dataset* dataset, const ncvcox_learner_config* learner,
                         const ncvcox_ncv_config* config, ncvcox_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(config, "ncv config");
    require(out, "out");
    ncvcox::NcvConfig cfg;
    cfg.k = config->k;
    cfg.repetitions = config->repetitions;
    cfg.alpha = config->alpha;
    cfg.seed = config->seed;
    cfg.mse_floor_policy = to_floor(config->mse_floor);
    cfg.validate();
    const auto est = ncvcox::ncv_estimate(dataset->data, cfg, to_learner(learner), to_threads(config->threads));
    auto* r = new ncvcox_result;
    r->json = ncvcox::to_json(est, false).dump(2);
    r->trace = ncvcox::ncv_trace_jsonl(est);
    r->scalars = {{"point", est.point},         {"se", est.se()},           {"mse", est.mse},
                  {"bias", est.bias},           {"lo", est.interval.lo},    {"hi", est.interval.hi},
                  {"err_cv", est.err_cv},       {"failed_splits", est.failed_splits},
                  {"splits", static_cast<double>(est.trace.size())}};
    *out = r;
  });
}

ncvcox_status ncvcox_simulate(const ncvcox_sim_config* sim, const ncvcox_learner_config* learner,
                              const ncvcox_coverage_config* coverage, ncvcox_result** out) {
  return guarded([&] {
    require(out, "out");
    const auto spec = to_spec(sim);
    *out = coverage_result(ncvcox::run_coverage(spec, to_coverage(coverage, learner)));
  });
}

ncvcox_status ncvcox_real_data(const ncvcox_dataset* dataset, size_t n_train, int trials, uint64_t seed,
                               const ncvcox_learner_config* learner, const ncvcox_coverage_config* coverage,
                               ncvcox_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = coverage_result(ncvcox::run_real_data(dataset->data, static_cast<ncvcox::Index>(n_train), trials, seed,
                                                 to_coverage(coverage, learner)));
  });
}

ncvcox_status ncvcox_fig2(const ncvcox_sim_config* base, const size_t* n_grid, size_t grid_len, int replicates,
                          const ncvcox_learner_config* learner, int threads, ncvcox_result** out) {
  return guarded([&] {
    require(out, "out");
    require(n_grid, "n_grid");
    std::vector<ncvcox::Index> grid;
    for (size_t i = 0; i < grid_len; ++i) grid.push_back(static_cast<ncvcox::Index>(n_grid[i]));
    const auto rows = ncvcox::figure2_data(to_spec(base), grid, replicates, to_learner(learner), to_threads(threads));
    auto* r = new ncvcox_result;
    r->csv = ncvcox::fig2_csv(rows);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      arr.push_back({{"n", row.n}, {"replicate", row.replicate}, {"measure", row.measure}, {"value", row.value}});
    }
    r->json = arr.dump(2);
    r->scalars = {{"rows", static_cast<double>(rows.size())}};
    *out = r;
  });
}

const char* ncvcox_result_json(const ncvcox_result* r) { return r ? r->json.c_str() : ""; }
const char* ncvcox_result_csv(const ncvcox_result* r) { return r ? r->csv.c_str() : ""; }
const char* ncvcox_result_trace(const ncvcox_result* r) { return r ? r->trace.c_str() : ""; }

ncvcox_status ncvcox_result_scalar(const ncvcox_result* r, const char* key, double* value) {
  return guarded([&] {
    require(r, "result");
    require(key, "key");
    require(value, "value");
    auto it = r->scalars.find(key);
    if (it == r->scalars.end()) ncvcox::config_error(std::string("result has no scalar '") + key + "'");
    *value = it->second;
  });
}

void ncvcox_result_free(ncvcox_result* r) { delete r; }

}  // extern "C"

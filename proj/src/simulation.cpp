#include "ncvcox/simulation.hpp"

#include "ncvcox/concordance.hpp"
#include "ncvcox/error.hpp"
#include "ncvcox/parallel.hpp"
#include "ncvcox/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace ncvcox {

namespace {

constexpr std::uint64_t kSimStream = 0x73696d;
constexpr std::uint64_t kRealStream = 0x7265616c;
constexpr std::uint64_t kNcvStream = 0x6e6376;
constexpr std::uint64_t kTruthStream = 0x747275;

double censored_fraction(const std::vector<double>& latent, double lo, double hi) {
  double sum = 0.0;
  for (double t : latent) sum += std::clamp((t - lo) / (hi - lo), 0.0, 1.0);
  return sum / static_cast<double>(latent.size());
}

TrialRecord coverage_trial(const SurvivalDataset& train, const SurvivalDataset& test, const CoverageOptions& options,
                           std::uint64_t ncv_seed, std::uint64_t truth_seed) {
  TrialRecord rec;
  NcvConfig cfg;
  cfg.k = options.k;
  cfg.repetitions = options.repetitions;
  cfg.alpha = options.alpha;
  cfg.seed = ncv_seed;
  cfg.mse_floor_policy = options.mse_floor_policy;
  const auto both = ncv_and_cv(train, cfg, options.learner, options.cv_pooling, 1);

  rec.cv_point = both.cv.point;
  rec.cv_se = both.cv.naive_se;
  rec.cv_interval = both.cv.interval;
  rec.ncv_point = both.ncv.point;
  rec.ncv_se = both.ncv.se();
  rec.ncv_bias = both.ncv.bias;
  rec.ncv_mse_raw = both.ncv.mse_raw;
  rec.ncv_interval = both.ncv.interval;
  rec.ncv_failed_splits = both.ncv.failed_splits;

  const auto model = train_model(train, options.learner, truth_seed);
  const Vector eta = test.x() * model.beta;
  std::vector<double> pred(eta.data(), eta.data() + eta.size());
  rec.truth = c_index(test.times(), test.status(), pred).c_index;
  rec.ok = true;
  return rec;
}

CoverageReport aggregate(std::vector<TrialRecord> records, const CoverageOptions& options) {
  CoverageReport report;
  report.alpha = options.alpha;
  report.k = options.k;
  report.repetitions = options.repetitions;
  std::vector<double> se_cv, se_ncv, pt_cv, pt_ncv, truth;
  int cv_up = 0, cv_lo = 0, ncv_up = 0, ncv_lo = 0;
  for (const auto& r : records) {
    if (!r.ok) {
      ++report.failed;
      continue;
    }
    ++report.completed;
    cv_up += r.truth < r.cv_interval.lo;
    cv_lo += r.truth > r.cv_interval.hi;
    ncv_up += r.truth < r.ncv_interval.lo;
    ncv_lo += r.truth > r.ncv_interval.hi;
    se_cv.push_back(r.cv_se);
    se_ncv.push_back(r.ncv_se);
    pt_cv.push_back(r.cv_point);
    pt_ncv.push_back(r.ncv_point);
    truth.push_back(r.truth);
  }
  report.trials = std::move(records);
  const auto total = static_cast<double>(report.trials.size());
  if (report.completed == 0 || static_cast<double>(report.failed) > kMaxTrialFailureRate * total) {
    numerical_error("coverage run aborted: " + std::to_string(report.failed) + " of " +
                    std::to_string(report.trials.size()) + " trials failed");
  }
  const double done = report.completed;
  report.cv_miscoverage_upper = cv_up / done;
  report.cv_miscoverage_lower = cv_lo / done;
  report.ncv_miscoverage_upper = ncv_up / done;
  report.ncv_miscoverage_lower = ncv_lo / done;
  report.mean_se_cv = mean(se_cv);
  report.mean_se_ncv = mean(se_ncv);
  report.mean_point_cv = mean(pt_cv);
  report.mean_point_ncv = mean(pt_ncv);
  report.mean_truth = mean(truth);
  return report;
}

}  // namespace

void SimSpec::validate() const {
  if (n_train < 2 || n_test < 2) config_error("n_train and n_test must be >= 2");
  if (p < 1) config_error("p must be >= 1");
  if (!beta_true.empty() && static_cast<Index>(beta_true.size()) != p) {
    config_error("beta_true has " + std::to_string(beta_true.size()) + " entries, p=" + std::to_string(p));
  }
  if (!(censoring_rate >= 0.0 && censoring_rate < 1.0)) config_error("censoring_rate must be in [0, 1)");
  if (!std::isfinite(noise_c) || !std::isfinite(signal)) config_error("noise_c and signal must be finite");
  if (trials < 1) config_error("trials must be >= 1");
}

Vector SimSpec::beta() const {
  if (!beta_true.empty()) return Eigen::Map<const Vector>(beta_true.data(), p);
  Vector b = Vector::Zero(p);
  const Index active = (p + 9) / 10;
  b.head(active).setConstant(signal);
  return b;
}

double calibrate_censoring(const std::vector<double>& latent, double rate) {
  if (latent.size() < 2) config_error("censoring calibration needs >= 2 latent times");
  const double lo = *std::min_element(latent.begin(), latent.end());
  const double max_reachable =
      static_cast<double>(std::count_if(latent.begin(), latent.end(), [&](double t) { return t > lo; })) /
      static_cast<double>(latent.size());
  if (!(rate > 0.0) || rate >= max_reachable) {
    config_error("censoring rate " + std::to_string(rate) + " is not reachable (must be in (0, " +
                 std::to_string(max_reachable) + "))");
  }
  const double spread = *std::max_element(latent.begin(), latent.end()) - lo;
  double a = 0.0;
  double b = spread;
  while (censored_fraction(latent, lo, lo + b) > rate) b *= 2.0;
  for (int it = 0; it < 200 && b - a > 1e-12 * spread; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= 0.0 || censored_fraction(latent, lo, lo + mid) > rate) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return lo + 0.5 * (a + b);
}

SimDraw generate(const SimSpec& spec, int trial) {
  spec.validate();
  const Index total = spec.n_train + spec.n_test;
  auto rng = make_rng(spec.seed, {kSimStream, static_cast<std::uint64_t>(trial)});
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix x(total, spec.p);
  for (Index i = 0; i < total; ++i) {
    for (Index j = 0; j < spec.p; ++j) x(i, j) = normal(rng);
  }
  const Vector signal = x * spec.beta();
  std::vector<double> latent(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) latent[static_cast<std::size_t>(i)] = signal[i] + spec.noise_c * normal(rng);

  std::vector<double> times = latent;
  std::vector<int> status(static_cast<std::size_t>(total), 1);
  if (spec.censoring_rate > 0.0) {
    const double lo = *std::min_element(latent.begin(), latent.end());
    const double hi = calibrate_censoring(latent, spec.censoring_rate);
    std::uniform_real_distribution<double> censor(lo, hi);
    for (std::size_t i = 0; i < latent.size(); ++i) {
      const double c = censor(rng);
      times[i] = std::min(latent[i], c);
      status[i] = latent[i] <= c ? 1 : 0;
    }
  }

  Matrix xt = x.topRows(spec.n_train);
  Matrix xs = x.bottomRows(spec.n_test);
  return SimDraw{
      SurvivalDataset(std::move(xt), std::vector<double>(times.begin(), times.begin() + spec.n_train),
                      std::vector<int>(status.begin(), status.begin() + spec.n_train)),
      SurvivalDataset(std::move(xs), std::vector<double>(times.begin() + spec.n_train, times.end()),
                      std::vector<int>(status.begin() + spec.n_train, status.end()))};
}

void CoverageOptions::validate() const {
  if (k < 3) config_error("coverage runs need K >= 3 for nested CV");
  if (repetitions < 1) config_error("repetitions must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha must be in (0, 1)");
  learner.validate();
}

CoverageReport run_coverage(const SimSpec& spec, const CoverageOptions& options) {
  spec.validate();
  options.validate();
  std::vector<TrialRecord> records(static_cast<std::size_t>(spec.trials));
  parallel_for(records.size(), options.threads, [&](std::size_t t) {
    const int trial = static_cast<int>(t);
    TrialRecord rec;
    try {
      const auto draw = generate(spec, trial);
      rec = coverage_trial(draw.train, draw.test, options,
                           derive_seed(spec.seed, {kNcvStream, t}), derive_seed(spec.seed, {kTruthStream, t}));
    } catch (const Error& e) {
      rec.ok = false;
      rec.failure = e.what();
    }
    rec.trial = trial;
    records[t] = rec;
  });
  auto report = aggregate(std::move(records), options);
  report.setting = "simulated: n=" + std::to_string(spec.n_train) + ", p=" + std::to_string(spec.p);
  return report;
}

std::pair<std::vector<Index>, std::vector<Index>> real_data_split(Index n, Index n_train, std::uint64_t seed,
                                                                  int trial) {
  if (n_train < 2 || n_train >= n - 1) config_error("n_train must be in [2, n - 2]");
  auto rng = make_rng(seed, {kRealStream, static_cast<std::uint64_t>(trial)});
  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  std::shuffle(rows.begin(), rows.end(), rng);
  std::vector<Index> train(rows.begin(), rows.begin() + n_train);
  std::vector<Index> test(rows.begin() + n_train, rows.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

CoverageReport run_real_data(const SurvivalDataset& dataset, Index n_train, int trials, std::uint64_t seed,
                             const CoverageOptions& options) {
  options.validate();
  if (trials < 1) config_error("trials must be >= 1");
  if (n_train >= dataset.n()) config_error("n_train must be smaller than the dataset");
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
  parallel_for(records.size(), options.threads, [&](std::size_t t) {
    const int trial = static_cast<int>(t);
    TrialRecord rec;
    try {
      const auto [train_rows, test_rows] = real_data_split(dataset.n(), n_train, seed, trial);
      rec = coverage_trial(dataset.subset(train_rows), dataset.subset(test_rows), options,
                           derive_seed(seed, {kNcvStream, t}), derive_seed(seed, {kTruthStream, t}));
    } catch (const Error& e) {
      rec.ok = false;
      rec.failure = e.what();
    }
    rec.trial = trial;
    records[t] = rec;
  });
  auto report = aggregate(std::move(records), options);
  report.setting = "real data: n=" + std::to_string(dataset.n()) + ", p=" + std::to_string(dataset.p()) +
                   ", n_train=" + std::to_string(n_train);
  return report;
}

std::vector<Fig2Row> figure2_data(const SimSpec& base, const std::vector<Index>& n_grid, int replicates,
                                  const LearnerConfig& learner, int threads) {
  if (n_grid.empty() || replicates < 1) config_error("figure2 needs a non-empty n grid and replicates >= 1");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 10) config_error("figure2 sizes must be >= 10");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) config_error("figure2 n grid must be increasing");
  }
  learner.validate();
  const std::size_t units = n_grid.size() * static_cast<std::size_t>(replicates);
  std::vector<std::array<double, 3>> values(units);
  parallel_for(units, threads, [&](std::size_t u) {
    SimSpec spec = base;
    spec.n_train = n_grid[u / static_cast<std::size_t>(replicates)];
    spec.n_test = spec.n_train;
    const auto draw = generate(spec, static_cast<int>(u));
    const auto model = train_model(draw.train, learner, derive_seed(base.seed, {kTruthStream, u}));
    const double n = static_cast<double>(draw.test.n());
    values[u] = {test_error(ErrorMeasureKind::log_pl_per_n, model.beta, draw.test),
                 test_error(ErrorMeasureKind::log_pl_per_nlogn, model.beta, draw.test),
                 test_error(ErrorMeasureKind::null_deviance_diff, model.beta, draw.test) / n};
  });
  std::vector<Fig2Row> rows;
  static const char* names[] = {"log_pl_per_n", "log_pl_per_nlogn", "null_deviance_diff_per_n"};
  for (std::size_t u = 0; u < units; ++u) {
    for (std::size_t m = 0; m < 3; ++m) {
      rows.push_back({n_grid[u / static_cast<std::size_t>(replicates)],
                      static_cast<int>(u % static_cast<std::size_t>(replicates)), names[m], values[u][m]});
    }
  }
  return rows;
}

}  // namespace ncvcox

#include "helpers.hpp"

#include "ncvcox/concordance.hpp"
#include "ncvcox/nested_cv.hpp"
#include "ncvcox/simulation.hpp"

#include <cmath>

using namespace ncvcox;

namespace {

LearnerConfig quick_learner() {
  LearnerConfig l;
  l.selection_folds = 3;
  l.penalty.n_lambda = 15;
  return l;
}

SurvivalDataset sim_train(Index n, std::uint64_t seed, double signal = 0.5) {
  SimSpec spec;
  spec.n_train = n;
  spec.n_test = 10;
  spec.seed = seed;
  spec.signal = signal;
  return generate(spec, 0).train;
}

}  // namespace

TEST_CASE("bias and width factors") {
  CHECK(ncv_bias(0.7, 0.6, 10) == doctest::Approx(1.8 * 0.1).epsilon(1e-14));
  CHECK(ncv_bias(0.6, 0.6, 10) == 0.0);
  CHECK(ncv_bias(0.5, 0.6, 5) == doctest::Approx(-1.6 * 0.1).epsilon(1e-14));

  NcvEstimate e;
  e.k = 10;
  e.point = 0.661;
  e.bias = 0.0;
  e.mse = 0.063 * 0.063;
  CHECK(e.se() == doctest::Approx(std::sqrt(0.9) * 0.063).epsilon(1e-14));
  auto i = ncv_interval(e, 0.1);
  CHECK((i.hi - i.lo) / 2 == doctest::Approx(0.0983).epsilon(1e-3));
  CHECK((i.hi + i.lo) / 2 == doctest::Approx(0.661).epsilon(1e-14));

  e.bias = 0.02;
  auto shifted = ncv_interval(e, 0.1);
  CHECK((shifted.hi + shifted.lo) / 2 == doctest::Approx(0.641).epsilon(1e-14));

  e.mse = 0.0;
  e.bias = 0.0;
  auto point = ncv_interval(e, 0.1);
  CHECK(point.lo == 0.661);
  CHECK(point.hi == 0.661);

  e.mse = -1.0;
  CHECK(testing::error_kind_of([&] { ncv_interval(e, 0.1); }) == ErrorKind::numerical);
}

TEST_CASE("single split bookkeeping matches an explicit recount") {
  auto d = sim_train(30, 4, 1.0);
  auto learner = quick_learner();
  const std::uint64_t seed = 9;
  auto folds = repetition_folds(d, 3, seed, 0);
  for (int f = 0; f < 3; ++f) {
    auto split = ncv_single_split(d, f, folds, learner, seed, 0);
    REQUIRE(split.record.ok);

    std::vector<double> t, eta;
    std::vector<int> s;
    for (int g = 0; g < 3; ++g) {
      if (g == f) continue;
      std::vector<Index> train_rows;
      for (Index i = 0; i < d.n(); ++i) {
        const int fi = folds.fold_of[static_cast<std::size_t>(i)];
        if (fi != f && fi != g) train_rows.push_back(i);
      }
      auto model = train_model(d.subset(train_rows), learner, model_seed(seed, 0, f, g));
      for (Index i = 0; i < d.n(); ++i) {
        if (folds.fold_of[static_cast<std::size_t>(i)] != g) continue;
        t.push_back(d.times()[static_cast<std::size_t>(i)]);
        s.push_back(d.status()[static_cast<std::size_t>(i)]);
        eta.push_back(d.x().row(i).dot(model.beta));
      }
    }
    CHECK(split.record.err_in == c_index(t, s, eta).c_index);

    auto outer = train_model(d.subset(folds.complement(f)), learner, model_seed(seed, 0, f, -1));
    std::vector<double> th, eh;
    std::vector<int> sh;
    for (Index i : folds.members(f)) {
      th.push_back(d.times()[static_cast<std::size_t>(i)]);
      sh.push_back(d.status()[static_cast<std::size_t>(i)]);
      eh.push_back(d.x().row(i).dot(outer.beta));
    }
    CHECK(split.held_out_predictions == eh);
    auto c = c_index(th, sh, eh);
    CHECK(split.record.e_out == c.c_index);
    CHECK(split.record.var_out == c.ij_variance);
  }
}

TEST_CASE("strong signal gives high inner and outer C") {
  SimSpec spec;
  spec.n_train = 60;
  spec.n_test = 10;
  spec.signal = 5.0;
  spec.noise_c = 0.05;
  spec.censoring_rate = 0.1;
  auto d = generate(spec, 0).train;
  auto folds = repetition_folds(d, 3, 1, 0);
  auto split = ncv_single_split(d, 1, folds, quick_learner(), 1, 0);
  REQUIRE(split.record.ok);
  CHECK(split.record.err_in > 0.9);
  CHECK(split.record.e_out > 0.9);
}

TEST_CASE("constant held-out predictions have zero variance") {
  auto d = sim_train(30, 2);
  LearnerConfig learner;
  learner.penalty.lambda_path = {1e6};
  auto folds = repetition_folds(d, 3, 1, 0);
  auto split = ncv_single_split(d, 0, folds, learner, 1, 0);
  REQUIRE(split.record.ok);
  CHECK(split.record.var_out == 0.0);
  CHECK(split.record.e_out == 0.5);
}

TEST_CASE("nested CV estimate aggregates its trace") {
  auto d = sim_train(40, 6);
  NcvConfig cfg;
  cfg.k = 4;
  cfg.repetitions = 3;
  cfg.seed = 5;
  auto both = ncv_and_cv(d, cfg, quick_learner());
  const auto& est = both.ncv;
  REQUIRE(est.trace.size() == 12);
  CHECK(est.failed_splits == 0);
  double err_in = 0.0, a = 0.0, b = 0.0, e_out = 0.0;
  for (const auto& r : est.trace) {
    err_in += r.err_in / 12;
    e_out += r.e_out / 12;
    a += (r.err_in - r.e_out) * (r.err_in - r.e_out) / 12;
    b += r.var_out / 12;
  }
  CHECK(est.point == doctest::Approx(err_in).epsilon(1e-14));
  CHECK(est.mse_raw == doctest::Approx(a - b).epsilon(1e-12));
  CHECK(est.mse_alt == doctest::Approx((err_in - e_out) * (err_in - e_out) - b).epsilon(1e-12));
  CHECK(est.mse >= 0.0);
  CHECK(est.err_cv_by_repetition.size() == 3);
  CHECK(est.bias == doctest::Approx(1.5 * (est.point - est.err_cv)).epsilon(1e-14));
  const double half = 1.6448536269514722 * std::sqrt(0.75 * est.mse);
  CHECK(est.interval.hi - est.interval.lo == doctest::Approx(2 * half).epsilon(1e-10));

  // repetition 0's outer models are exactly the standard CV fits
  auto cv = cv_c_index(d, quick_learner(), 4, cfg.alpha, cfg.seed);
  CHECK(both.cv.point == cv.point);
  CHECK(both.cv.fold_values == cv.fold_values);
  auto pooled = cv_c_index(d, quick_learner(), 4, cfg.alpha, cfg.seed, Pooling::pooled);
  CHECK(est.err_cv_by_repetition[0] == pooled.point);

  for (int f = 0; f < 4; ++f) {
    auto folds = repetition_folds(d, 4, cfg.seed, 1);
    auto split = ncv_single_split(d, f, folds, quick_learner(), cfg.seed, 1);
    CHECK(split.record.err_in == est.trace[static_cast<std::size_t>(4 + f)].err_in);
    CHECK(split.record.e_out == est.trace[static_cast<std::size_t>(4 + f)].e_out);
  }
}

TEST_CASE("nested CV is identical across thread counts") {
  auto d = sim_train(40, 7);
  NcvConfig cfg;
  cfg.k = 4;
  cfg.repetitions = 2;
  auto serial = ncv_estimate(d, cfg, quick_learner(), 1);
  auto parallel = ncv_estimate(d, cfg, quick_learner(), 4);
  CHECK(serial.point == parallel.point);
  CHECK(serial.mse_raw == parallel.mse_raw);
  CHECK(serial.a_values == parallel.a_values);
  CHECK(serial.b_values == parallel.b_values);
  CHECK(serial.interval.lo == parallel.interval.lo);
}

TEST_CASE("nested CV configuration checks") {
  auto d = sim_train(30, 8);
  NcvConfig cfg;
  cfg.k = 2;
  CHECK(testing::error_kind_of([&] { ncv_estimate(d, cfg, quick_learner()); }) == ErrorKind::config);
  cfg.k = 3;
  cfg.repetitions = 0;
  CHECK(testing::error_kind_of([&] { ncv_estimate(d, cfg, quick_learner()); }) == ErrorKind::config);
  CHECK(parse_mse_floor_policy("a_fallback") == MseFloorPolicy::a_fallback);
  CHECK(testing::error_kind_of([] { parse_mse_floor_policy("clip"); }) == ErrorKind::config);
}

#include "helpers.hpp"

#include "ncvcox/survival_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

using namespace ncvcox;

namespace {

SurvivalDataset tiny(std::vector<double> times, std::vector<int> status) {
  Matrix x = Matrix::Zero(static_cast<Index>(times.size()), 1);
  for (Index i = 0; i < x.rows(); ++i) x(i, 0) = static_cast<double>(i);
  return SurvivalDataset(x, std::move(times), std::move(status));
}

}  // namespace

TEST_CASE("dataset construction checks its invariants") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  CHECK(testing::error_kind_of([&] { SurvivalDataset(x, {1, 2, 3}, {0, 0, 0}); }) == ErrorKind::data);

  Matrix two(2, 1);
  two << 0.5, -1.0;
  SurvivalDataset ok(two, {1, 2}, {1, 0});
  CHECK(ok.n() == 2);
  CHECK(ok.event_count() == 1);

  x(1, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    SurvivalDataset(x, {1, 2, 3}, {1, 1, 1});
    FAIL("accepted NaN covariate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    CHECK(std::string(e.what()).find("col 0") != std::string::npos);
  }

  Matrix y(3, 1);
  y << 1, 2, 3;
  CHECK(testing::error_kind_of([&] { SurvivalDataset(y, {1, 2}, {1, 1}); }) == ErrorKind::data);
  CHECK(testing::error_kind_of([&] { SurvivalDataset(y, {1, 2, 3}, {1, 2, 0}); }) == ErrorKind::data);
}

TEST_CASE("risk sets follow the Breslow convention") {
  SUBCASE("distinct times") {
    auto r = build_risk_sets(tiny({1, 2, 3}, {1, 1, 1}));
    CHECK(r.risk_set_sizes == std::vector<Index>{3, 2, 1});
  }
  SUBCASE("censored middle") {
    auto r = build_risk_sets(tiny({1, 2, 3}, {1, 0, 1}));
    CHECK(r.event_order == std::vector<Index>{0, 2});
    CHECK(r.risk_set_sizes == std::vector<Index>{3, 1});
  }
  SUBCASE("tied event times share a risk set") {
    auto r = build_risk_sets(tiny({2, 2, 5}, {1, 1, 1}));
    CHECK(r.risk_set_sizes == std::vector<Index>{3, 3, 1});
    REQUIRE(r.tie_groups.size() == 2);
    CHECK(r.tie_groups[0].size() == 2);
    CHECK(r.tie_groups[1] == std::vector<Index>{2});
  }
  SUBCASE("unsorted input") {
    auto r = build_risk_sets(tiny({3, 1, 2}, {1, 1, 0}));
    CHECK(r.event_order == std::vector<Index>{1, 0});
    CHECK(r.risk_set_sizes == std::vector<Index>{3, 1});
  }
}

TEST_CASE("risk set sizes match enumeration") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto d = testing::random_dataset(seed, 25, 1, 0.4, true);
    auto r = build_risk_sets(d);
    for (std::size_t k = 0; k < r.event_order.size(); ++k) {
      const double tj = d.times()[static_cast<std::size_t>(r.event_order[k])];
      const auto count = std::count_if(d.times().begin(), d.times().end(), [&](double t) { return t >= tj; });
      CHECK(r.risk_set_sizes[k] == count);
    }
  }
}

TEST_CASE("fold assignment is balanced and deterministic") {
  std::vector<int> status(10, 1);
  auto f = assign_folds(10, 5, status, 3);
  for (int k = 0; k < 5; ++k) CHECK(f.members(k).size() == 2);

  std::vector<int> status11(11, 1);
  auto g = assign_folds(11, 5, status11, 3);
  std::multiset<std::size_t> sizes;
  for (int k = 0; k < 5; ++k) sizes.insert(g.members(k).size());
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 2, 2, 3});

  CHECK(assign_folds(11, 5, status11, 3).fold_of == g.fold_of);
  CHECK(assign_folds(11, 5, status11, 4).fold_of != g.fold_of);
}

TEST_CASE("every fold receives an event") {
  std::vector<int> status(40, 0);
  for (int i : {3, 11, 17, 25, 38}) status[static_cast<std::size_t>(i)] = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto f = assign_folds(40, 5, status, seed);
    for (int k = 0; k < 5; ++k) {
      auto m = f.members(k);
      CHECK(std::any_of(m.begin(), m.end(), [&](Index i) { return status[static_cast<std::size_t>(i)] == 1; }));
    }
  }
  CHECK(testing::error_kind_of([&] { assign_folds(40, 6, status, 1); }) == ErrorKind::data);
  CHECK(testing::error_kind_of([&] { assign_folds(40, 1, status, 1); }) == ErrorKind::config);
}

TEST_CASE("fold complements partition the rows") {
  std::vector<int> status(23, 1);
  auto f = assign_folds(23, 4, status, 9);
  auto a = f.members(1);
  auto rest = f.complement(1);
  CHECK(a.size() + rest.size() == 23);
  auto both = f.complement(0, 2);
  CHECK(both.size() == 23 - f.members(0).size() - f.members(2).size());
  for (Index i : both) CHECK((f.fold_of[static_cast<std::size_t>(i)] != 0 && f.fold_of[static_cast<std::size_t>(i)] != 2));
}

TEST_CASE("csv loading") {
  auto path = testing::write_text("three.csv", "time,status,x1\n1.5,1,0.2\n2.0,0,-1\n3.25,1,4\n");
  auto d = load_csv(path.string(), "time", "status");
  CHECK(d.n() == 3);
  CHECK(d.p() == 1);
  CHECK(d.times()[2] == 3.25);
  CHECK(d.status() == std::vector<int>{1, 0, 1});
  CHECK(d.feature_names() == std::vector<std::string>{"x1"});

  try {
    load_csv(path.string(), "time", "event");
    FAIL("missing column accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("event") != std::string::npos);
  }

  std::string wide = "id,time,status";
  for (int j = 1; j <= 11; ++j) wide += ",v" + std::to_string(j);
  wide += "\n";
  for (int i = 0; i < 15; ++i) {
    wide += std::to_string(i) + "," + std::to_string(i + 1) + "," + std::to_string(i % 2);
    for (int j = 1; j <= 11; ++j) wide += "," + std::to_string(i * j % 7);
    wide += "\n";
  }
  auto wide_path = testing::write_text("wide.csv", wide);
  auto w = load_csv(wide_path.string(), "time", "status");
  CHECK(w.p() == 12);  // id is an ordinary covariate column
  CHECK(w.select_columns(std::vector<Index>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}).p() == 11);

  auto bad = testing::write_text("bad.csv", "time,status,x\n1,1,abc\n2,0,1\n");
  CHECK(testing::error_kind_of([&] { load_csv(bad.string(), "time", "status"); }) == ErrorKind::data);
}

TEST_CASE("csv round trip") {
  auto d = testing::random_dataset(5, 12, 3);
  auto path = testing::temp_file("roundtrip.csv");
  write_csv(d, path.string());
  auto e = load_csv(path.string(), "time", "status");
  CHECK(e.times() == d.times());
  CHECK(e.status() == d.status());
  CHECK(e.x() == d.x());
}

TEST_CASE("variance filter keeps the highest-variance columns in order") {
  Matrix x(4, 3);
  // column variances proportional to 1, 9, 4
  x << 1, 3, 2, -1, -3, -2, 1, 3, 2, -1, -3, -2;
  SurvivalDataset d(x, {1, 2, 3, 4}, {1, 1, 1, 1}, {"a", "b", "c"});
  auto f = variance_filter(d, 2);
  CHECK(f.feature_names() == std::vector<std::string>{"b", "c"});
  CHECK(f.x().col(0) == x.col(1));

  auto same = variance_filter(d, 3);
  CHECK(same.x() == d.x());
  CHECK(same.feature_names() == d.feature_names());

  Matrix y = x;
  y.col(0).setConstant(7.0);
  SurvivalDataset dc(y, {1, 2, 3, 4}, {1, 1, 1, 1});
  for (Index k = 1; k < 3; ++k) {
    auto g = variance_filter(dc, k);
    for (Index j = 0; j < g.p(); ++j) CHECK((g.x().col(j).array() != 7.0).any());
  }
  CHECK(testing::error_kind_of([&] { variance_filter(d, 0); }) == ErrorKind::config);
  CHECK(testing::error_kind_of([&] { variance_filter(d, 4); }) == ErrorKind::config);
}

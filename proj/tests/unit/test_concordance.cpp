#include "helpers.hpp"

#include "ncvcox/concordance.hpp"

#include <cmath>
#include <numeric>

using namespace ncvcox;

namespace {

struct Draw {
  std::vector<double> t;
  std::vector<int> s;
  std::vector<double> eta;
};

// Integer-valued times and predictors so ties of both kinds are common.
Draw random_draw(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> time(1, n / 2 + 2);
  std::uniform_int_distribution<int> pred(0, 5);
  std::bernoulli_distribution event(0.65);
  Draw d;
  for (int i = 0; i < n; ++i) {
    d.t.push_back(time(rng));
    d.s.push_back(event(rng) ? 1 : 0);
    d.eta.push_back(pred(rng));
  }
  d.s[0] = 1;
  d.t[0] = 0;  // guarantees one comparable pair
  d.eta[1] = 9;
  return d;
}

}  // namespace

TEST_CASE("pair classification") {
  CHECK(classify_pair(1, 1, 2, 2, 1, 1) == PairClass::concordant);
  CHECK(classify_pair(2, 1, 1, 1, 1, 2) == PairClass::concordant);
  CHECK(classify_pair(1, 1, 1, 2, 1, 2) == PairClass::discordant);
  CHECK(classify_pair(1, 1, 4, 2, 0, 4) == PairClass::tied_prediction);
  CHECK(classify_pair(1, 0, 5, 2, 1, 0) == PairClass::incomparable);
  CHECK(classify_pair(1, 1, 3, 1, 1, 0) == PairClass::incomparable);
  CHECK(classify_pair(1, 1, 3, 1, 0, 0) == PairClass::incomparable);
}

TEST_CASE("c_index identities") {
  std::vector<double> t{1, 2, 3, 4};
  std::vector<int> s{1, 1, 1, 1};
  std::vector<double> anti{4, 3, 2, 1};
  CHECK(c_index(t, s, anti).c_index == 1.0);
  std::vector<double> same{4, 3, 2, 1};
  std::reverse(same.begin(), same.end());
  CHECK(c_index(t, s, same).c_index == 0.0);

  std::vector<double> flat(4, 0.7);
  auto r = c_index(t, s, flat);
  CHECK(r.c_index == 0.5);
  CHECK(r.tied_predictions == 6.0);
  CHECK(r.comparable_pairs == 6.0);
  CHECK(r.ij_variance == 0.0);
  for (double u : r.influences) CHECK(u == 0.0);

  std::vector<int> none{0, 0, 0, 1};
  CHECK(testing::error_kind_of([&] { c_index(t, none, anti); }) == ErrorKind::numerical);
}

TEST_CASE("c_index equals brute-force enumeration") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = random_draw(rng, 2 + rep % 49);
    auto fast = c_index(d.t, d.s, d.eta);
    auto slow = c_index_pairwise(d.t, d.s, d.eta);
    auto ref = oracle::harrell(d.t, d.s, d.eta);
    CHECK(fast.concordant == ref.concordant);
    CHECK(fast.discordant == ref.discordant);
    CHECK(fast.tied_predictions == ref.tied);
    CHECK(fast.c_index == ref.c());
    CHECK(slow.c_index == ref.c());
    for (std::size_t i = 0; i < d.t.size(); ++i) {
      CHECK(fast.influences[i] == doctest::Approx(slow.influences[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted c_index equals brute-force enumeration") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> w(0, 3);
  for (int rep = 0; rep < 50; ++rep) {
    auto d = random_draw(rng, 8 + rep % 20);
    std::vector<double> weights(d.t.size());
    for (auto& v : weights) v = w(rng);
    weights[0] = weights[1] = 1;
    auto fast = c_index(d.t, d.s, d.eta, weights);
    auto ref = oracle::harrell(d.t, d.s, d.eta, weights);
    CHECK(fast.concordant == ref.concordant);
    CHECK(fast.comparable_pairs == ref.comparable);
    CHECK(fast.c_index == ref.c());
  }
}

TEST_CASE("influences are derivatives of the weighted C") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    auto d = random_draw(rng, 6 + rep % 25);
    auto r = c_index(d.t, d.s, d.eta);
    double scale = 0.0;
    double sum = 0.0;
    for (double u : r.influences) {
      scale = std::max(scale, std::abs(u));
      sum += u;
    }
    CHECK(std::abs(sum) <= 1e-10 * std::max(scale, 1e-300) + 1e-300);
    const double h = 1e-6;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
      std::vector<double> up(d.t.size(), 1.0), down(d.t.size(), 1.0);
      up[i] += h;
      down[i] -= h;
      const double fd = (oracle::harrell(d.t, d.s, d.eta, up).c() - oracle::harrell(d.t, d.s, d.eta, down).c()) / (2 * h);
      CHECK(std::abs(r.influences[i] - fd) <= 1e-5 * std::max(std::abs(fd), scale));
    }
    double var = 0.0;
    for (double u : r.influences) var += u * u;
    CHECK(r.ij_variance == doctest::Approx(var).epsilon(1e-12));
    auto iv = ij_variance(d.t, d.s, d.eta);
    CHECK(iv.variance == r.ij_variance);
  }
}

TEST_CASE("IJ variance tracks the delete-one jackknife") {
  std::mt19937_64 rng(31);
  int agree = 0;
  const int draws = 100;
  for (int rep = 0; rep < draws; ++rep) {
    auto in = oracle::random_instance(rng, 20, 2, 0.3, false, 1.0);
    std::vector<double> eta(20);
    for (int i = 0; i < 20; ++i) eta[static_cast<std::size_t>(i)] = in.x(i, 0) + 0.5 * in.x(i, 1);
    const double ij = ij_variance(in.times, in.status, eta).variance;
    const double jk = oracle::jackknife_variance(in.times, in.status, eta);
    if (ij <= 2 * jk && jk <= 2 * ij) ++agree;
  }
  CHECK(agree >= 90);
}

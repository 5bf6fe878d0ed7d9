#include "ncvcox/concordance.hpp"

#include "ncvcox/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace ncvcox {

namespace {

// Fenwick tree over predictor ranks holding summed weights.
class RankTree {
 public:
  explicit RankTree(std::size_t size) : tree_(size + 1, 0.0) {}

  void add(std::size_t rank, double w) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += w;
  }
  // Sum over ranks < rank.
  double below(std::size_t rank) const {
    double s = 0.0;
    for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  double at(std::size_t rank) const { return below(rank + 1) - below(rank); }
  double total() const { return below(tree_.size() - 1); }

 private:
  std::vector<double> tree_;
};

void check_inputs(std::span<const double> times, std::span<const int> status, std::span<const double> predictors,
                  std::span<const double> weights) {
  if (status.size() != times.size() || predictors.size() != times.size() ||
      (!weights.empty() && weights.size() != times.size())) {
    config_error("concordance inputs have mismatched lengths");
  }
}

ConcordanceResult finish(ConcordanceResult r, const std::vector<double>& score, const std::vector<double>& comparable) {
  r.comparable_pairs = r.concordant + r.discordant + r.tied_predictions;
  if (!(r.comparable_pairs > 0.0)) numerical_error("no comparable pairs: C-index undefined");
  r.c_index = (r.concordant + 0.5 * r.tied_predictions) / r.comparable_pairs;
  r.influences.resize(score.size());
  double var = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    r.influences[i] = (score[i] - r.c_index * comparable[i]) / r.comparable_pairs;
    var += r.influences[i] * r.influences[i];
  }
  r.ij_variance = kIjVarianceScale * var;
  return r;
}

}  // namespace

PairClass classify_pair(double t_i, int status_i, double eta_i, double t_j, int status_j, double eta_j) {
  if (t_j < t_i) {
    std::swap(t_i, t_j);
    std::swap(status_i, status_j);
    std::swap(eta_i, eta_j);
  }
  if (!(t_i < t_j) || status_i != 1) return PairClass::incomparable;
  if (eta_i > eta_j) return PairClass::concordant;
  if (eta_i < eta_j) return PairClass::discordant;
  return PairClass::tied_prediction;
}

ConcordanceResult c_index(std::span<const double> times, std::span<const int> status,
                          std::span<const double> predictors, std::span<const double> weights) {
  check_inputs(times, status, predictors, weights);
  const std::size_t n = times.size();
  auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  std::vector<double> levels(predictors.begin(), predictors.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), predictors[i]) - levels.begin());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // equal-time runs in `order`
  for (std::size_t pos = 0; pos < n;) {
    std::size_t end = pos;
    while (end < n && times[order[end]] == times[order[pos]]) ++end;
    groups.emplace_back(pos, end);
    pos = end;
  }

  ConcordanceResult r;
  std::vector<double> score(n, 0.0);       // S_i: partner-weighted pair scores involving i
  std::vector<double> comparable(n, 0.0);  // D_i: partner-weighted comparable pairs involving i

  // i as the earlier event: partners are all observations with a strictly later time.
  RankTree later(levels.size());
  for (auto g = groups.rbegin(); g != groups.rend(); ++g) {
    for (std::size_t pos = g->first; pos < g->second; ++pos) {
      const std::size_t i = order[pos];
      if (status[i] != 1) continue;
      const double lower = later.below(rank[i]);
      const double tied = later.at(rank[i]);
      const double total = later.total();
      const double wi = weight(i);
      r.concordant += wi * lower;
      r.tied_predictions += wi * tied;
      r.discordant += wi * (total - lower - tied);
      score[i] += lower + 0.5 * tied;
      comparable[i] += total;
    }
    for (std::size_t pos = g->first; pos < g->second; ++pos) later.add(rank[order[pos]], weight(order[pos]));
  }

  // j as the later member: partners are events with a strictly earlier time.
  RankTree earlier(levels.size());
  for (const auto& g : groups) {
    for (std::size_t pos = g.first; pos < g.second; ++pos) {
      const std::size_t j = order[pos];
      const double lower = earlier.below(rank[j]);
      const double tied = earlier.at(rank[j]);
      const double total = earlier.total();
      score[j] += (total - lower - tied) + 0.5 * tied;
      comparable[j] += total;
    }
    for (std::size_t pos = g.first; pos < g.second; ++pos) {
      if (status[order[pos]] == 1) earlier.add(rank[order[pos]], weight(order[pos]));
    }
  }
  return finish(std::move(r), score, comparable);
}

ConcordanceResult c_index_pairwise(std::span<const double> times, std::span<const int> status,
                                   std::span<const double> predictors, std::span<const double> weights) {
  check_inputs(times, status, predictors, weights);
  const std::size_t n = times.size();
  auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  ConcordanceResult r;
  std::vector<double> score(n, 0.0), comparable(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto cls = classify_pair(times[i], status[i], predictors[i], times[j], status[j], predictors[j]);
      if (cls == PairClass::incomparable) continue;
      const double w = weight(i) * weight(j);
      double s = 0.0;
      if (cls == PairClass::concordant) {
        r.concordant += w;
        s = 1.0;
      } else if (cls == PairClass::discordant) {
        r.discordant += w;
      } else {
        r.tied_predictions += w;
        s = 0.5;
      }
      score[i] += weight(j) * s;
      score[j] += weight(i) * s;
      comparable[i] += weight(j);
      comparable[j] += weight(i);
    }
  }
  return finish(std::move(r), score, comparable);
}

IjVariance ij_variance(std::span<const double> times, std::span<const int> status,
                       std::span<const double> predictors) {
  auto r = c_index(times, status, predictors);
  return IjVariance{std::move(r.influences), r.ij_variance};
}

}  // namespace ncvcox

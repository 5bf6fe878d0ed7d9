#pragma once

#include <span>
#include <vector>

namespace ncvcox {

enum class PairClass { concordant, discordant, tied_prediction, incomparable };

/// Harrell's rule: comparable iff the earlier time is strictly earlier and is an
/// event. Concordant when the earlier event carries the larger predictor.
PairClass classify_pair(double t_i, int status_i, double eta_i, double t_j, int status_j, double eta_j);

struct ConcordanceResult {
  double c_index = 0.0;
  double concordant = 0.0;
  double discordant = 0.0;
  double tied_predictions = 0.0;
  double comparable_pairs = 0.0;
  std::vector<double> influences;  // d C / d w_i
  double ij_variance = 0.0;
};

/// Small-sample factor applied to the infinitesimal-jackknife variance; 1 means
/// the plain sum of squared influences.
inline constexpr double kIjVarianceScale = 1.0;

/// Weighted Harrell C with per-observation case weights (pair weight w_i * w_j)
/// and its infinitesimal-jackknife variance, in O(n log n). Throws
/// Error(numerical) when no pair is comparable.
ConcordanceResult c_index(std::span<const double> times, std::span<const int> status,
                          std::span<const double> predictors, std::span<const double> weights = {});

/// O(n^2) pair loop computing the same counts; the reference for c_index.
ConcordanceResult c_index_pairwise(std::span<const double> times, std::span<const int> status,
                                   std::span<const double> predictors, std::span<const double> weights = {});

struct IjVariance {
  std::vector<double> influences;
  double variance = 0.0;
};

IjVariance ij_variance(std::span<const double> times, std::span<const int> status,
                       std::span<const double> predictors);

}  // namespace ncvcox

#pragma once

#include "ncvcox/survival_data.hpp"

#include <span>
#include <vector>

namespace ncvcox {

/// Elastic-net penalty lambda * (alpha * |b|_1 + (1 - alpha) * |b|_2^2 / 2) on
/// standardized coefficients.
struct PenaltySpec {
  double alpha = 1.0;
  std::vector<double> lambda_path;  // explicit path; empty means derive from data
  int n_lambda = 100;
  double lambda_min_ratio = 0.0;  // <= 0 picks 0.01 when n > p, else 0.05

  void validate() const;
};

struct FitOptions {
  double tol = 1e-7;      // max standardized coefficient change
  int max_iter = 10000;   // coordinate sweeps per lambda
};

struct CoxFit {
  Matrix beta_path;  // p x n_lambda, original covariate scale
  std::vector<double> lambda_path;
  std::vector<Index> nonzero_counts;
  std::vector<double> log_pl_path;  // unpenalized, on the fitting data
  std::vector<int> converged;
  std::vector<int> iterations;

  Index size() const { return static_cast<Index>(lambda_path.size()); }
  Vector beta(Index k) const { return beta_path.col(k); }
};

/// Breslow log partial likelihood evaluated on linear predictors. Sorting and
/// tie grouping are done once so repeated evaluation is O(n).
class PartialLikelihood {
 public:
  PartialLikelihood(std::span<const double> times, std::span<const int> status);
  explicit PartialLikelihood(const SurvivalDataset& dataset)
      : PartialLikelihood(dataset.times(), dataset.status()) {}

  Index n() const { return static_cast<Index>(order_.size()); }
  double log_pl(const Vector& eta) const;

  /// d l / d eta and the diagonal of -d^2 l / d eta^2.
  void derivatives(const Vector& eta, Vector& grad, Vector& hess_diag) const;

 private:
  struct TimeGroup {
    Index begin;  // positions in ascending time order
    Index end;
    Index events;
  };
  std::vector<Index> order_;
  std::vector<TimeGroup> groups_;
  std::vector<Index> events_;
};

double log_partial_likelihood(const SurvivalDataset& dataset, const Vector& beta);
Vector log_pl_gradient(const SurvivalDataset& dataset, const Vector& beta);

/// Smallest lambda at which every standardized coefficient is zero.
double lambda_max(const SurvivalDataset& dataset, double alpha);
std::vector<double> lambda_sequence(const SurvivalDataset& dataset, const PenaltySpec& penalty);

/// Penalized path, warm-started along the descending lambda sequence. Each
/// Newton step on the exact partial likelihood is solved by cyclic coordinate
/// descent plus an active-set solve, with step halving. Non-converged lambdas
/// are flagged, not thrown.
CoxFit fit_path(const SurvivalDataset& dataset, const PenaltySpec& penalty, const FitOptions& options = {});

Vector linear_predictor(const Vector& beta, const Matrix& covariates);

/// beta = 0; the model with no signal.
CoxFit null_fit(const SurvivalDataset& dataset);

}  // namespace ncvcox

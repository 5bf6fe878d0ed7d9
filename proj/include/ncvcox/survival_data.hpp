#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ncvcox {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Right-censored survival data: covariates plus (time, status) responses.
///
/// Instances are validated on construction and immutable afterwards, so they
/// can be shared freely between threads. Times may be negative; only their
/// ordering is ever used.
class SurvivalDataset {
 public:
  /// Throws Error(data) naming the first violated invariant.
  SurvivalDataset(Matrix covariates, std::vector<double> times, std::vector<int> status,
                  std::vector<std::string> feature_names = {});

  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  const Matrix& x() const { return x_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<int>& status() const { return status_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  Index event_count() const;

  /// Rows in the given order (duplicates allowed).
  SurvivalDataset subset(std::span<const Index> rows) const;
  SurvivalDataset select_columns(std::span<const Index> cols) const;

 private:
  Matrix x_;
  std::vector<double> times_;
  std::vector<int> status_;
  std::vector<std::string> names_;
};

/// Re-checks every dataset invariant; returns the input unchanged when they hold.
const SurvivalDataset& validate(const SurvivalDataset& dataset);

/// Risk sets under the Breslow convention: R(j) = {i : t_i >= t_j}.
struct RiskSetIndex {
  std::vector<Index> event_order;     // event observations, time ascending
  std::vector<Index> risk_set_sizes;  // aligned with event_order
  std::vector<std::vector<Index>> tie_groups;  // events sharing a time, one group per distinct event time
};

RiskSetIndex build_risk_sets(const SurvivalDataset& dataset);

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<Index> members(int fold) const;
  std::vector<Index> complement(int fold) const;
  /// Observations outside both folds.
  std::vector<Index> complement(int fold_a, int fold_b) const;
};

inline constexpr int kFoldRetryLimit = 1000;

/// Balanced random fold assignment, redrawn until every fold holds an event.
FoldAssignment assign_folds(Index n, int k, std::span<const int> status, std::uint64_t seed);

SurvivalDataset load_csv(const std::string& path, const std::string& time_col,
                         const std::string& status_col);
void write_csv(const SurvivalDataset& dataset, const std::string& path,
               const std::string& time_col = "time", const std::string& status_col = "status");

/// Keeps the top_k highest-variance columns in their original order.
SurvivalDataset variance_filter(const SurvivalDataset& dataset, Index top_k);

}  // namespace ncvcox

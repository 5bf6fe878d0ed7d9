#include "ncvcox/survival_data.hpp"

#include "ncvcox/error.hpp"
#include "ncvcox/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ncvcox {

namespace {

void check_invariants(const Matrix& x, const std::vector<double>& times, const std::vector<int>& status,
                      const std::vector<std::string>& names) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (times.size() != n || status.size() != n) {
    data_error("length mismatch: " + std::to_string(n) + " covariate rows, " + std::to_string(times.size()) +
               " times, " + std::to_string(status.size()) + " status values");
  }
  if (n < 2) data_error("dataset needs at least 2 observations, got " + std::to_string(n));
  if (!names.empty() && names.size() != static_cast<std::size_t>(x.cols())) {
    data_error("feature_names has " + std::to_string(names.size()) + " entries for " + std::to_string(x.cols()) +
               " columns");
  }
  bool any_event = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (status[i] != 0 && status[i] != 1) {
      data_error("status at row " + std::to_string(i) + " is " + std::to_string(status[i]) + ", expected 0 or 1");
    }
    if (!std::isfinite(times[i])) data_error("non-finite time at row " + std::to_string(i));
    any_event = any_event || status[i] == 1;
  }
  if (!any_event) data_error("no events: every observation is censored");
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (!std::isfinite(x(i, j))) {
        data_error("non-finite covariate at row " + std::to_string(i) + ", col " + std::to_string(j));
      }
    }
  }
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    data_error("non-numeric cell '" + cell + "' at data row " + std::to_string(row) + ", column '" + column + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

SurvivalDataset::SurvivalDataset(Matrix covariates, std::vector<double> times, std::vector<int> status,
                                 std::vector<std::string> feature_names)
    : x_(std::move(covariates)), times_(std::move(times)), status_(std::move(status)), names_(std::move(feature_names)) {
  check_invariants(x_, times_, status_, names_);
}

Index SurvivalDataset::event_count() const {
  return static_cast<Index>(std::count(status_.begin(), status_.end(), 1));
}

SurvivalDataset SurvivalDataset::subset(std::span<const Index> rows) const {
  Matrix x(static_cast<Index>(rows.size()), p());
  std::vector<double> t(rows.size());
  std::vector<int> s(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    if (r < 0 || r >= n()) data_error("subset row " + std::to_string(r) + " out of range");
    x.row(static_cast<Index>(k)) = x_.row(r);
    t[k] = times_[static_cast<std::size_t>(r)];
    s[k] = status_[static_cast<std::size_t>(r)];
  }
  return SurvivalDataset(std::move(x), std::move(t), std::move(s), names_);
}

SurvivalDataset SurvivalDataset::select_columns(std::span<const Index> cols) const {
  Matrix x(n(), static_cast<Index>(cols.size()));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= p()) data_error("column " + std::to_string(cols[k]) + " out of range");
    x.col(static_cast<Index>(k)) = x_.col(cols[k]);
    if (!names_.empty()) names.push_back(names_[static_cast<std::size_t>(cols[k])]);
  }
  return SurvivalDataset(std::move(x), times_, status_, std::move(names));
}

const SurvivalDataset& validate(const SurvivalDataset& dataset) {
  check_invariants(dataset.x(), dataset.times(), dataset.status(), dataset.feature_names());
  return dataset;
}

RiskSetIndex build_risk_sets(const SurvivalDataset& dataset) {
  const auto& t = dataset.times();
  const auto& s = dataset.status();
  const auto n = static_cast<Index>(t.size());

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return t[a] < t[b]; });

  RiskSetIndex index;
  // Observations at positions >= first position of a time value are at risk at that time.
  Index group_start = 0;
  for (Index pos = 0; pos < n; ++pos) {
    const Index i = order[static_cast<std::size_t>(pos)];
    if (pos > 0 && t[order[static_cast<std::size_t>(pos - 1)]] < t[i]) group_start = pos;
    if (s[i] != 1) continue;
    if (index.event_order.empty() || t[index.event_order.back()] < t[i]) index.tie_groups.emplace_back();
    index.event_order.push_back(i);
    index.risk_set_sizes.push_back(n - group_start);
    index.tie_groups.back().push_back(i);
  }
  return index;
}

std::vector<Index> FoldAssignment::members(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<Index> FoldAssignment::complement(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<Index> FoldAssignment::complement(int fold_a, int fold_b) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold_a && fold_of[i] != fold_b) out.push_back(static_cast<Index>(i));
  }
  return out;
}

FoldAssignment assign_folds(Index n, int k, std::span<const int> status, std::uint64_t seed) {
  if (k < 2 || k > n) config_error("fold count K=" + std::to_string(k) + " must satisfy 2 <= K <= n=" + std::to_string(n));
  if (static_cast<Index>(status.size()) != n) config_error("status length does not match n");
  const auto events = std::count(status.begin(), status.end(), 1);
  if (events < k) {
    data_error("cannot give each of " + std::to_string(k) + " folds an event: only " + std::to_string(events) +
               " events");
  }

  auto rng = make_rng(seed, {0x666f6c64});
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % k);

  for (int attempt = 0; attempt < kFoldRetryLimit; ++attempt) {
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<char> has_event(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      if (status[static_cast<std::size_t>(i)] == 1) has_event[static_cast<std::size_t>(labels[i])] = 1;
    }
    if (std::all_of(has_event.begin(), has_event.end(), [](char c) { return c != 0; })) {
      return FoldAssignment{labels, k, seed};
    }
  }
  data_error("fold assignment failed after " + std::to_string(kFoldRetryLimit) + " draws: " + std::to_string(events) +
             " events over " + std::to_string(k) + " folds");
}

SurvivalDataset load_csv(const std::string& path, const std::string& time_col, const std::string& status_col) {
  std::ifstream in(path);
  if (!in) data_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) data_error("empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // Strip a UTF-8 byte-order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line = line.substr(3);
  const auto header = split_row(line);

  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) data_error("missing column '" + name + "' in '" + path + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto time_idx = find_col(time_col);
  const auto status_idx = find_col(status_col);

  std::vector<std::size_t> cov_idx;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == time_idx || c == status_idx) continue;
    cov_idx.push_back(c);
    names.push_back(header[c]);
  }

  std::vector<double> times;
  std::vector<int> status;
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      data_error("data row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, header has " +
                 std::to_string(header.size()));
    }
    times.push_back(parse_number(cells[time_idx], row, time_col));
    const double sv = parse_number(cells[status_idx], row, status_col);
    if (sv != 0.0 && sv != 1.0) {
      data_error("status at data row " + std::to_string(row) + " is '" + cells[status_idx] + "', expected 0 or 1");
    }
    status.push_back(static_cast<int>(sv));
    for (auto c : cov_idx) values.push_back(parse_number(cells[c], row, header[c]));
    ++row;
  }
  if (row == 0) data_error("no data rows in '" + path + "'");

  Matrix x(static_cast<Index>(row), static_cast<Index>(cov_idx.size()));
  for (std::size_t r = 0; r < row; ++r) {
    for (std::size_t c = 0; c < cov_idx.size(); ++c) {
      x(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cov_idx.size() + c];
    }
  }
  return SurvivalDataset(std::move(x), std::move(times), std::move(status), std::move(names));
}

void write_csv(const SurvivalDataset& dataset, const std::string& path, const std::string& time_col,
               const std::string& status_col) {
  std::ofstream out(path);
  if (!out) data_error("cannot write '" + path + "'");
  out << time_col << ',' << status_col;
  for (Index j = 0; j < dataset.p(); ++j) {
    out << ',';
    if (dataset.feature_names().empty()) {
      out << 'x' << (j + 1);
    } else {
      out << dataset.feature_names()[static_cast<std::size_t>(j)];
    }
  }
  out << '\n';
  for (Index i = 0; i < dataset.n(); ++i) {
    out << format_double(dataset.times()[static_cast<std::size_t>(i)]) << ',' << dataset.status()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < dataset.p(); ++j) out << ',' << format_double(dataset.x()(i, j));
    out << '\n';
  }
}

SurvivalDataset variance_filter(const SurvivalDataset& dataset, Index top_k) {
  if (top_k < 1 || top_k > dataset.p()) {
    config_error("top_k=" + std::to_string(top_k) + " must be in [1, p=" + std::to_string(dataset.p()) + "]");
  }
  const auto& x = dataset.x();
  std::vector<double> var(static_cast<std::size_t>(x.cols()));
  for (Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    var[static_cast<std::size_t>(j)] = (x.col(j).array() - mean).square().sum() / static_cast<double>(x.rows() - 1);
  }
  std::vector<Index> cols(var.size());
  std::iota(cols.begin(), cols.end(), Index{0});
  std::stable_sort(cols.begin(), cols.end(), [&](Index a, Index b) { return var[a] > var[b]; });
  cols.resize(static_cast<std::size_t>(top_k));
  std::sort(cols.begin(), cols.end());
  return dataset.select_columns(cols);
}

}  // namespace ncvcox

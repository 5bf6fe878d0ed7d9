#include "ncvcox/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace ncvcox {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(number(v));
  return arr;
}

json interval(const Interval& i) { return json::array({number(i.lo), number(i.hi)}); }

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

json to_json(const CvEstimate& e) {
  return json{{"point", number(e.point)},
              {"fold_values", numbers(e.fold_values)},
              {"naive_se", number(e.naive_se)},
              {"interval", interval(e.interval)},
              {"alpha", e.alpha},
              {"lambda_rule", to_string(e.lambda_rule)},
              {"pooling", to_string(e.pooling)},
              {"degenerate_folds", e.degenerate_folds}};
}

json to_json(const SplitRecord& r) {
  json j{{"repetition", r.repetition}, {"fold", r.fold}, {"ok", r.ok}};
  if (r.ok) {
    const double d = r.err_in - r.e_out;
    j["err_in"] = number(r.err_in);
    j["e_out"] = number(r.e_out);
    j["var_out"] = number(r.var_out);
    j["a"] = number(d * d);
  } else {
    j["failure"] = r.failure;
  }
  return j;
}

json to_json(const NcvEstimate& e, bool include_trace) {
  json j{{"point", number(e.point)},
         {"mse", number(e.mse)},
         {"mse_raw", number(e.mse_raw)},
         {"mse_floored", e.mse_floored},
         {"mse_alt_squared_mean_difference", number(e.mse_alt)},
         {"mean_a", number(mean(e.a_values))},
         {"mean_b", number(mean(e.b_values))},
         {"se", number(e.se())},
         {"bias", number(e.bias)},
         {"interval", interval(e.interval)},
         {"err_cv", number(e.err_cv)},
         {"err_cv_by_repetition", numbers(e.err_cv_by_repetition)},
         {"k", e.k},
         {"repetitions", e.repetitions},
         {"alpha", e.alpha},
         {"splits", e.trace.size()},
         {"failed_splits", e.failed_splits},
         {"warnings", e.warnings}};
  if (include_trace) {
    json trace = json::array();
    for (const auto& r : e.trace) trace.push_back(to_json(r));
    j["trace"] = std::move(trace);
  }
  return j;
}

std::string ncv_trace_jsonl(const NcvEstimate& e) {
  std::string out;
  for (const auto& r : e.trace) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

json to_json(const CoverageReport& r, bool include_trials) {
  json j{{"setting", r.setting},
         {"convention", kMiscoverageConvention},
         {"alpha", r.alpha},
         {"k", r.k},
         {"repetitions", r.repetitions},
         {"completed_trials", r.completed},
         {"failed_trials", r.failed},
         {"point_estimate", {{"cv", number(r.mean_point_cv)}, {"ncv", number(r.mean_point_ncv)}}},
         {"mean_se", {{"cv", number(r.mean_se_cv)}, {"ncv", number(r.mean_se_ncv)}}},
         {"miscoverage",
          {{"cv", {{"upper", r.cv_miscoverage_upper}, {"lower", r.cv_miscoverage_lower}}},
           {"ncv", {{"upper", r.ncv_miscoverage_upper}, {"lower", r.ncv_miscoverage_lower}}}}},
         {"mean_truth", number(r.mean_truth)}};
  if (include_trials) {
    json trials = json::array();
    for (const auto& t : r.trials) {
      json row{{"trial", t.trial}, {"ok", t.ok}};
      if (t.ok) {
        row["truth"] = number(t.truth);
        row["cv"] = {{"point", number(t.cv_point)}, {"se", number(t.cv_se)}, {"interval", interval(t.cv_interval)}};
        row["ncv"] = {{"point", number(t.ncv_point)},
                      {"se", number(t.ncv_se)},
                      {"bias", number(t.ncv_bias)},
                      {"mse_raw", number(t.ncv_mse_raw)},
                      {"interval", interval(t.ncv_interval)},
                      {"failed_splits", t.ncv_failed_splits}};
      } else {
        row["failure"] = t.failure;
      }
      trials.push_back(std::move(row));
    }
    j["trials"] = std::move(trials);
  }
  return j;
}

json to_json(const CoxFit& fit) {
  json beta = json::array();
  for (Index l = 0; l < fit.size(); ++l) {
    std::vector<double> col(fit.beta_path.col(l).data(), fit.beta_path.col(l).data() + fit.beta_path.rows());
    beta.push_back(numbers(col));
  }
  return json{{"lambda", numbers(fit.lambda_path)},
              {"nonzero", fit.nonzero_counts},
              {"log_pl", numbers(fit.log_pl_path)},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"beta", std::move(beta)}};
}

std::string fit_path_csv(const CoxFit& fit, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "lambda,log_lambda,nonzero,log_pl,converged,iterations";
  for (Index j = 0; j < fit.beta_path.rows(); ++j) {
    out << ',' << (names.empty() ? "x" + std::to_string(j + 1) : names[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  for (Index l = 0; l < fit.size(); ++l) {
    const double lambda = fit.lambda_path[static_cast<std::size_t>(l)];
    out << format_double(lambda) << ',' << format_double(std::log(lambda)) << ','
        << fit.nonzero_counts[static_cast<std::size_t>(l)] << ','
        << format_double(fit.log_pl_path[static_cast<std::size_t>(l)]) << ','
        << fit.converged[static_cast<std::size_t>(l)] << ',' << fit.iterations[static_cast<std::size_t>(l)];
    for (Index j = 0; j < fit.beta_path.rows(); ++j) out << ',' << format_double(fit.beta_path(j, l));
    out << '\n';
  }
  return out.str();
}

std::string coverage_summary_csv(const CoverageReport& r) {
  std::ostringstream out;
  out << "setting,point_cv,point_ncv,mean_se_cv,mean_se_ncv,cv_miscoverage_upper,cv_miscoverage_lower,"
         "ncv_miscoverage_upper,ncv_miscoverage_lower,completed_trials,failed_trials\n";
  out << '"' << r.setting << "\"," << format_double(r.mean_point_cv) << ',' << format_double(r.mean_point_ncv) << ','
      << format_double(r.mean_se_cv) << ',' << format_double(r.mean_se_ncv) << ','
      << format_double(r.cv_miscoverage_upper) << ',' << format_double(r.cv_miscoverage_lower) << ','
      << format_double(r.ncv_miscoverage_upper) << ',' << format_double(r.ncv_miscoverage_lower) << ','
      << r.completed << ',' << r.failed << '\n';
  return out.str();
}

std::string coverage_trials_csv(const CoverageReport& r) {
  std::ostringstream out;
  out << "trial,ok,truth,cv_point,cv_se,cv_lo,cv_hi,ncv_point,ncv_se,ncv_bias,ncv_lo,ncv_hi\n";
  for (const auto& t : r.trials) {
    out << t.trial << ',' << (t.ok ? 1 : 0) << ',' << format_double(t.truth) << ',' << format_double(t.cv_point)
        << ',' << format_double(t.cv_se) << ',' << format_double(t.cv_interval.lo) << ','
        << format_double(t.cv_interval.hi) << ',' << format_double(t.ncv_point) << ',' << format_double(t.ncv_se)
        << ',' << format_double(t.ncv_bias) << ',' << format_double(t.ncv_interval.lo) << ','
        << format_double(t.ncv_interval.hi) << '\n';
  }
  return out.str();
}

std::string fig2_csv(const std::vector<Fig2Row>& rows) {
  std::ostringstream out;
  out << "n,replicate,measure,value\n";
  for (const auto& r : rows) out << r.n << ',' << r.replicate << ',' << r.measure << ',' << format_double(r.value) << '\n';
  return out.str();
}

}  // namespace ncvcox

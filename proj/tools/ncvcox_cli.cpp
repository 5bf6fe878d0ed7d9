// ncvcox command-line front end. Talks to the library only through the C API.

#include "ncvcox/ncvcox.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kNumerical = 3 };

const char* kind_name(int code) {
  switch (code) {
    case kConfig: return "config";
    case kData: return "data";
    default: return "numerical";
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

// Single machine-parsable line on stderr.
int fail(int code, const std::string& message) {
  std::fprintf(stderr, "error kind=%s code=%d message=\"%s\"\n", kind_name(code), code, escape(message).c_str());
  return code;
}

struct Failure {
  int code;
  std::string message;
};

void check(ncvcox_status status) {
  if (status != NCVCOX_OK) {
    const int code = status == NCVCOX_ERR_INTERNAL ? kNumerical : static_cast<int>(status);
    throw Failure{code, ncvcox_last_error()};
  }
}

struct DatasetDeleter {
  void operator()(ncvcox_dataset* d) const { ncvcox_dataset_free(d); }
};
struct ResultDeleter {
  void operator()(ncvcox_result* r) const { ncvcox_result_free(r); }
};
using DatasetPtr = std::unique_ptr<ncvcox_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<ncvcox_result, ResultDeleter>;

struct Options {
  std::string command;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string format;

  std::string data;
  std::string time_col = "time";
  std::string status_col = "status";
  std::size_t top_k = 0;

  double enet_alpha = 1.0;
  int n_lambda = 100;
  double lambda_min_ratio = 0.0;
  double tol = 1e-7;
  int max_iter = 10000;
  int selection_folds = 10;
  std::string lambda_rule = "max";

  int folds = 10;
  int repetitions = 50;
  double alpha = 0.1;
  std::string pooling = "per_fold";
  std::string mse_floor = "zero_floor";
  std::string trace;

  std::size_t n_train = 100;
  std::size_t n_test = 1000;
  std::size_t p = 10;
  double signal = 0.45;
  double noise_c = 1.0;
  double censoring_rate = 0.3;
  int trials = 1;
  std::string trials_out;

  std::vector<std::size_t> n_grid{100, 200, 400, 800};
  int replicates = 20;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Failure{kData, "cannot write '" + path + "'"};
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

ncvcox_learner_config learner_config(const Options& o) {
  ncvcox_learner_config c;
  ncvcox_learner_config_default(&c);
  c.enet_alpha = o.enet_alpha;
  c.n_lambda = o.n_lambda;
  c.lambda_min_ratio = o.lambda_min_ratio;
  c.tol = o.tol;
  c.max_iter = o.max_iter;
  c.selection_folds = o.selection_folds;
  c.lambda_rule = o.lambda_rule == "one_se" ? NCVCOX_LAMBDA_ONE_SE : NCVCOX_LAMBDA_MAX;
  return c;
}

ncvcox_sim_config sim_config(const Options& o) {
  ncvcox_sim_config c;
  ncvcox_sim_config_default(&c);
  c.n_train = o.n_train;
  c.n_test = o.n_test;
  c.p = o.p;
  c.signal = o.signal;
  c.noise_c = o.noise_c;
  c.censoring_rate = o.censoring_rate;
  c.trials = o.trials;
  c.seed = o.seed;
  return c;
}

ncvcox_coverage_config coverage_config(const Options& o) {
  ncvcox_coverage_config c;
  ncvcox_coverage_config_default(&c);
  c.k = o.folds;
  c.repetitions = o.repetitions;
  c.alpha = o.alpha;
  c.pooling = o.pooling == "pooled" ? NCVCOX_POOLED : NCVCOX_PER_FOLD;
  c.mse_floor = o.mse_floor == "a_fallback" ? NCVCOX_A_FALLBACK : NCVCOX_ZERO_FLOOR;
  c.threads = o.threads;
  return c;
}

DatasetPtr load_dataset(const Options& o) {
  if (o.data.empty()) throw Failure{kConfig, "--data is required for command '" + o.command + "'"};
  ncvcox_dataset* raw = nullptr;
  check(ncvcox_dataset_load_csv(o.data.c_str(), o.time_col.c_str(), o.status_col.c_str(), &raw));
  DatasetPtr data(raw);
  if (o.top_k > 0) {
    ncvcox_dataset* filtered = nullptr;
    check(ncvcox_dataset_variance_filter(data.get(), o.top_k, &filtered));
    data.reset(filtered);
  }
  return data;
}

std::string pick(const ncvcox_result* r, const std::string& format, const std::string& fallback) {
  const std::string f = format.empty() ? fallback : format;
  if (f == "csv") {
    std::string csv = ncvcox_result_csv(r);
    if (csv.empty()) throw Failure{kConfig, "csv output is not available for this command"};
    return csv;
  }
  return ncvcox_result_json(r);
}

int run(const Options& o) {
  const auto learner = learner_config(o);
  ncvcox_result* raw = nullptr;
  if (o.command == "fit") {
    auto data = load_dataset(o);
    check(ncvcox_fit_path(data.get(), &learner, &raw));
    ResultPtr result(raw);
    write_output(o.out, pick(result.get(), o.format, "csv"));
  } else if (o.command == "cv") {
    auto data = load_dataset(o);
    ncvcox_cv_config cfg{o.folds, o.alpha, o.seed, o.pooling == "pooled" ? NCVCOX_POOLED : NCVCOX_PER_FOLD,
                         o.threads};
    check(ncvcox_cv(data.get(), &learner, &cfg, &raw));
    ResultPtr result(raw);
    write_output(o.out, pick(result.get(), o.format, "json"));
  } else if (o.command == "ncv") {
    if (o.folds < 3) throw Failure{kConfig, "ncv needs --folds >= 3"};
    auto data = load_dataset(o);
    ncvcox_ncv_config cfg{o.folds, o.repetitions, o.alpha, o.seed,
                          o.mse_floor == "a_fallback" ? NCVCOX_A_FALLBACK : NCVCOX_ZERO_FLOOR, o.threads};
    check(ncvcox_ncv(data.get(), &learner, &cfg, &raw));
    ResultPtr result(raw);
    if (!o.trace.empty()) write_output(o.trace, ncvcox_result_trace(result.get()));
    write_output(o.out, pick(result.get(), o.format, "json"));
  } else if (o.command == "simulate") {
    const auto coverage = coverage_config(o);
    if (o.data.empty()) {
      const auto sim = sim_config(o);
      check(ncvcox_simulate(&sim, &learner, &coverage, &raw));
    } else {
      auto data = load_dataset(o);
      check(ncvcox_real_data(data.get(), o.n_train, o.trials, o.seed, &learner, &coverage, &raw));
    }
    ResultPtr result(raw);
    if (!o.trials_out.empty()) write_output(o.trials_out, ncvcox_result_trace(result.get()));
    write_output(o.out, pick(result.get(), o.format, "json"));
  } else if (o.command == "fig2") {
    const auto sim = sim_config(o);
    check(ncvcox_fig2(&sim, o.n_grid.data(), o.n_grid.size(), o.replicates, &learner, o.threads, &raw));
    ResultPtr result(raw);
    write_output(o.out, pick(result.get(), o.format, "csv"));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Penalized Cox models with nested cross-validation intervals for the C-index", "ncvcox"};
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.add_option("command", o.command, "fit | cv | ncv | simulate | fig2")
      ->required()
      ->check(CLI::IsMember({"fit", "cv", "ncv", "simulate", "fig2"}));

  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores, 1 = serial reference path)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  app.add_option("--data", o.data, "Input CSV");
  app.add_option("--time-col", o.time_col, "Time column name");
  app.add_option("--status-col", o.status_col, "Event-status column name");
  app.add_option("--top-k", o.top_k, "Keep the top-k highest-variance covariates (0 = all)");

  app.add_option("--enet-alpha", o.enet_alpha, "Elastic-net mixing (1 = lasso)")->check(CLI::Range(0.0, 1.0));
  app.add_option("--n-lambda", o.n_lambda, "Lambda path length")->check(CLI::PositiveNumber);
  app.add_option("--lambda-min-ratio", o.lambda_min_ratio, "Smallest/largest lambda (0 = automatic)");
  app.add_option("--tol", o.tol, "Coordinate-descent tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", o.max_iter, "Coordinate sweeps per lambda")->check(CLI::PositiveNumber);
  app.add_option("--selection-folds", o.selection_folds, "Folds of the CV-PL lambda selection")
      ->check(CLI::Range(2, 1000000));
  app.add_option("--lambda-rule", o.lambda_rule, "max or one_se")->check(CLI::IsMember({"max", "one_se"}));

  app.add_option("--folds,-K", o.folds, "Outer fold count K")->check(CLI::Range(2, 1000000));
  app.add_option("--repetitions,-r", o.repetitions, "Nested-CV repetitions")->check(CLI::PositiveNumber);
  app.add_option("--alpha", o.alpha, "Interval miscoverage level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--pooling", o.pooling, "Naive CV: per_fold or pooled")
      ->check(CLI::IsMember({"per_fold", "pooled"}));
  app.add_option("--mse-floor", o.mse_floor, "zero_floor or a_fallback")
      ->check(CLI::IsMember({"zero_floor", "a_fallback"}));
  app.add_option("--trace", o.trace, "ncv: write per-split JSON lines here");

  app.add_option("--n-train", o.n_train, "Training size");
  app.add_option("--n-test", o.n_test, "Test size (simulated data)");
  app.add_option("--p", o.p, "Covariate count (simulated data)");
  app.add_option("--signal", o.signal, "Value of the leading ceil(p/10) true coefficients");
  app.add_option("--noise-c", o.noise_c, "Noise scale c");
  app.add_option("--censoring-rate", o.censoring_rate, "Target censored fraction")->check(CLI::Range(0.0, 0.999));
  app.add_option("--trials", o.trials, "Coverage trials")->check(CLI::PositiveNumber);
  app.add_option("--trials-out", o.trials_out, "simulate: write per-trial JSON lines here");
  app.add_option("--n-grid", o.n_grid, "fig2: sample sizes")->delimiter(',');
  app.add_option("--replicates", o.replicates, "fig2: replicates per size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(kConfig, e.what());
  }

  try {
    return run(o);
  } catch (const Failure& f) {
    return fail(f.code, f.message);
  } catch (const std::exception& e) {
    return fail(kNumerical, e.what());
  }
}

#pragma once

// Reference implementations written from the definitions, deliberately slow
// and sharing no code with the library.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

struct Instance {
  Eigen::MatrixXd x;
  std::vector<double> times;
  std::vector<int> status;
};

// Covariates N(0,1); times from a proportional-hazards draw, optionally
// rounded so ties occur; at least one event guaranteed.
inline Instance random_instance(std::mt19937_64& rng, int n, int p, double censor_prob = 0.3, bool ties = false,
                                double signal = 0.5) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Instance in;
  in.x.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) in.x(i, j) = normal(rng);
  }
  for (int i = 0; i < n; ++i) {
    double eta = 0.0;
    for (int j = 0; j < p; ++j) eta += signal * in.x(i, j) / (j + 1);
    double t = -std::log(unif(rng) + 1e-300) * std::exp(-eta);
    if (ties) t = std::ceil(t * 4.0) / 4.0;
    in.times.push_back(t);
    in.status.push_back(unif(rng) < censor_prob ? 0 : 1);
  }
  in.status[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n))] = 1;
  return in;
}

// Breslow log partial likelihood by explicit risk-set enumeration.
inline double log_pl(const Eigen::MatrixXd& x, const std::vector<double>& t, const std::vector<int>& s,
                     const Eigen::VectorXd& beta) {
  const auto n = static_cast<int>(t.size());
  const Eigen::VectorXd eta = x * beta;
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    if (s[j] != 1) continue;
    double risk = 0.0;
    for (int i = 0; i < n; ++i) {
      if (t[i] >= t[j]) risk += std::exp(eta[i]);
    }
    value += eta[j] - std::log(risk);
  }
  return value;
}

// Score and observed information from the textbook risk-set sums.
inline void score_information(const Eigen::MatrixXd& x, const std::vector<double>& t, const std::vector<int>& s,
                              const Eigen::VectorXd& beta, Eigen::VectorXd& score, Eigen::MatrixXd& info) {
  const auto n = static_cast<int>(t.size());
  const auto p = static_cast<int>(x.cols());
  score = Eigen::VectorXd::Zero(p);
  info = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < n; ++j) {
    if (s[j] != 1) continue;
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < n; ++i) {
      if (t[i] < t[j]) continue;
      const double w = std::exp(x.row(i).dot(beta));
      s0 += w;
      s1 += w * x.row(i).transpose();
      s2 += w * x.row(i).transpose() * x.row(i);
    }
    const Eigen::VectorXd mean = s1 / s0;
    score += x.row(j).transpose() - mean;
    info += s2 / s0 - mean * mean.transpose();
  }
}

// Unpenalized MLE by Newton-Raphson with step halving on the oracle log PL.
inline Eigen::VectorXd newton_mle(const Eigen::MatrixXd& x, const std::vector<double>& t, const std::vector<int>& s,
                                  int max_iter = 100) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  double current = log_pl(x, t, s, beta);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd score;
    Eigen::MatrixXd info;
    score_information(x, t, s, beta, score, info);
    Eigen::VectorXd step = info.ldlt().solve(score);
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    double value = log_pl(x, t, s, next);
    while (value < current && scale > 1e-10) {
      scale *= 0.5;
      next = beta + scale * step;
      value = log_pl(x, t, s, next);
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    current = value;
    if (change < 1e-12) break;
  }
  return beta;
}

// Ridge-penalized maximizer of l(beta) - lambda/2 * sum (sd_j beta_j)^2, where
// sd_j is the 1/n standard deviation of column j.
inline Eigen::VectorXd newton_ridge(const Eigen::MatrixXd& x, const std::vector<double>& t,
                                    const std::vector<int>& s, double lambda) {
  const auto p = x.cols();
  const double n = static_cast<double>(x.rows());
  Eigen::VectorXd var(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double m = x.col(j).mean();
    var[j] = (x.col(j).array() - m).square().sum() / n;
  }
  auto objective = [&](const Eigen::VectorXd& b) {
    return log_pl(x, t, s, b) - 0.5 * lambda * (var.array() * b.array().square()).sum();
  };
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double current = objective(beta);
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd score;
    Eigen::MatrixXd info;
    score_information(x, t, s, beta, score, info);
    score -= lambda * var.cwiseProduct(beta);
    info.diagonal() += lambda * var;
    const Eigen::VectorXd step = info.ldlt().solve(score);
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    while (objective(next) < current && scale > 1e-10) {
      scale *= 0.5;
      next = beta + scale * step;
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    current = objective(beta);
    if (change < 1e-12) break;
  }
  return beta;
}

struct PairCounts {
  double concordant = 0.0;
  double discordant = 0.0;
  double tied = 0.0;
  double comparable = 0.0;
  double c() const { return (concordant + 0.5 * tied) / comparable; }
};

// Harrell's C over every ordered pair: (i, j) is usable when t_i < t_j and i
// had the event; the shorter survivor should carry the higher risk score.
inline PairCounts harrell(const std::vector<double>& t, const std::vector<int>& s, const std::vector<double>& eta,
                          const std::vector<double>& w = {}) {
  PairCounts out;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || s[i] != 1 || !(t[i] < t[j])) continue;
      const double weight = w.empty() ? 1.0 : w[i] * w[j];
      out.comparable += weight;
      if (eta[i] > eta[j]) {
        out.concordant += weight;
      } else if (eta[i] < eta[j]) {
        out.discordant += weight;
      } else {
        out.tied += weight;
      }
    }
  }
  return out;
}

// Delete-one jackknife variance of Harrell's C.
inline double jackknife_variance(const std::vector<double>& t, const std::vector<int>& s,
                                 const std::vector<double>& eta) {
  const std::size_t n = t.size();
  std::vector<double> loo(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> w(n, 1.0);
    w[k] = 0.0;
    loo[k] = harrell(t, s, eta, w).c();
  }
  double m = 0.0;
  for (double v : loo) m += v;
  m /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : loo) ss += (v - m) * (v - m);
  return static_cast<double>(n - 1) / static_cast<double>(n) * ss;
}

}  // namespace oracle

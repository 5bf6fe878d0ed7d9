#include "ncvcox/cox_model.hpp"

#include "ncvcox/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ncvcox {

namespace {

void require_finite(const Vector& beta) {
  for (Index k = 0; k < beta.size(); ++k) {
    if (!std::isfinite(beta[k])) numerical_error("non-finite coefficient at index " + std::to_string(k));
  }
}

void require_dims(const SurvivalDataset& dataset, const Vector& beta) {
  if (beta.size() != dataset.p()) {
    config_error("coefficient length " + std::to_string(beta.size()) + " does not match p=" +
                 std::to_string(dataset.p()));
  }
  require_finite(beta);
}

// Sum of logs taken as a running product, with one log per ~1e150 range.
class LogSum {
 public:
  void add(double x) {
    product_ *= x;
    if (product_ > 1e150 || product_ < 1e-150) flush();
  }
  double value() {
    flush();
    return sum_;
  }

 private:
  void flush() {
    sum_ += std::log(product_);
    product_ = 1.0;
  }
  double product_ = 1.0;
  double sum_ = 0.0;
};

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// Covariates centered and scaled to unit (1/n) variance; constant columns are
// left at zero and never enter the model.
struct Standardized {
  Matrix x;
  Vector scale;
  std::vector<char> usable;
};

Standardized standardize(const Matrix& x) {
  Standardized s{x, Vector::Ones(x.cols()), std::vector<char>(static_cast<std::size_t>(x.cols()), 1)};
  const double n = static_cast<double>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    s.x.col(j).array() -= mean;
    const double sd = std::sqrt(s.x.col(j).squaredNorm() / n);
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      s.x.col(j).setZero();
      s.usable[static_cast<std::size_t>(j)] = 0;
      s.scale[j] = 1.0;
    } else {
      s.x.col(j) /= sd;
      s.scale[j] = sd;
    }
  }
  return s;
}

double penalty_value(const Vector& beta, double lambda, double alpha) {
  return lambda * (alpha * beta.lpNorm<1>() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

}  // namespace

void PenaltySpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) config_error("alpha must be in [0, 1], got " + std::to_string(alpha));
  if (lambda_path.empty()) {
    if (n_lambda < 1) config_error("n_lambda must be >= 1");
    if (lambda_min_ratio >= 1.0) config_error("lambda_min_ratio must be < 1");
    return;
  }
  for (std::size_t k = 0; k < lambda_path.size(); ++k) {
    if (!(lambda_path[k] >= 0.0) || !std::isfinite(lambda_path[k])) {
      config_error("lambda_path entries must be finite and >= 0");
    }
    if (k > 0 && !(lambda_path[k] < lambda_path[k - 1])) config_error("lambda_path must be strictly decreasing");
  }
}

PartialLikelihood::PartialLikelihood(std::span<const double> times, std::span<const int> status) {
  const auto n = static_cast<Index>(times.size());
  if (static_cast<Index>(status.size()) != n) data_error("times and status lengths differ");
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), Index{0});
  std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return times[a] < times[b]; });
  for (Index pos = 0; pos < n;) {
    Index end = pos;
    Index events = 0;
    const double t = times[order_[pos]];
    while (end < n && times[order_[end]] == t) {
      events += status[order_[end]] == 1 ? 1 : 0;
      ++end;
    }
    groups_.push_back({pos, end, events});
    pos = end;
  }
  for (Index i = 0; i < n; ++i) {
    if (status[i] == 1) events_.push_back(i);
  }
}

double PartialLikelihood::log_pl(const Vector& eta) const {
  double value = 0.0;
  for (Index i : events_) value += eta[i];
  // Risk-set sums accumulate from the latest time backwards, as top * acc with
  // a running maximum so late risk sets never underflow.
  double top = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (auto g = groups_.rbegin(); g != groups_.rend(); ++g) {
    for (Index pos = g->begin; pos < g->end; ++pos) {
      const double x = eta[order_[pos]];
      if (x > top) {
        acc = acc * std::exp(top - x) + 1.0;
        top = x;
      } else {
        acc += std::exp(x - top);
      }
    }
    if (g->events > 0) value -= static_cast<double>(g->events) * (top + std::log(acc));
  }
  return value;
}

void PartialLikelihood::derivatives(const Vector& eta, Vector& grad, Vector& hess_diag) const {
  const Index n = this->n();
  const double shift = eta.maxCoeff();
  Vector e = (eta.array() - shift).exp();
  std::vector<double> risk(groups_.size());
  double acc = 0.0;
  for (std::size_t g = groups_.size(); g-- > 0;) {
    for (Index pos = groups_[g].begin; pos < groups_[g].end; ++pos) acc += e[order_[pos]];
    risk[g] = acc;
  }
  grad.resize(n);
  hess_diag.resize(n);
  double a = 0.0;  // sum over event groups up to this time of d / S
  double b = 0.0;  // same with d / S^2
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].events > 0) {
      const double d = static_cast<double>(groups_[g].events);
      a += d / risk[g];
      b += d / (risk[g] * risk[g]);
    }
    for (Index pos = groups_[g].begin; pos < groups_[g].end; ++pos) {
      const Index i = order_[pos];
      grad[i] = -e[i] * a;
      hess_diag[i] = e[i] * a - e[i] * e[i] * b;
    }
  }
  for (Index i : events_) grad[i] += 1.0;
}

double log_partial_likelihood(const SurvivalDataset& dataset, const Vector& beta) {
  require_dims(dataset, beta);
  return PartialLikelihood(dataset).log_pl(dataset.x() * beta);
}

Vector log_pl_gradient(const SurvivalDataset& dataset, const Vector& beta) {
  require_dims(dataset, beta);
  Vector grad_eta, hess;
  PartialLikelihood(dataset).derivatives(dataset.x() * beta, grad_eta, hess);
  return dataset.x().transpose() * grad_eta;
}

double lambda_max(const SurvivalDataset& dataset, double alpha) {
  const auto s = standardize(dataset.x());
  Vector grad_eta, hess;
  PartialLikelihood(dataset).derivatives(Vector::Zero(dataset.n()), grad_eta, hess);
  const double max_grad = (s.x.transpose() * grad_eta).cwiseAbs().maxCoeff();
  return max_grad / std::max(alpha, 1e-3);
}

std::vector<double> lambda_sequence(const SurvivalDataset& dataset, const PenaltySpec& penalty) {
  penalty.validate();
  if (!penalty.lambda_path.empty()) return penalty.lambda_path;
  const double top = lambda_max(dataset, penalty.alpha);
  if (!(top > 0.0)) return {0.0};
  const double ratio = penalty.lambda_min_ratio > 0.0 ? penalty.lambda_min_ratio
                       : dataset.n() > dataset.p()    ? 0.01
                                                      : 0.05;
  std::vector<double> path(static_cast<std::size_t>(penalty.n_lambda));
  if (penalty.n_lambda == 1) {
    path[0] = top;
    return path;
  }
  const double step = std::log(ratio) / static_cast<double>(penalty.n_lambda - 1);
  for (int k = 0; k < penalty.n_lambda; ++k) path[static_cast<std::size_t>(k)] = top * std::exp(step * k);
  return path;
}

namespace {

// Breslow partial likelihood on rows pre-sorted by time, with the exact
// Hessian in eta-space applied through risk-set cumulative sums:
//   H v = e * A * v - e * cumsum_g( d_g / S_g^2 * sum_{k in R_g} e_k v_k ).
class SortedCox {
 public:
  // Tied times share a risk set; each group's event count is parked on its
  // first row so every pass below is a flat prefix or suffix scan.
  SortedCox(const std::vector<double>& times, const std::vector<int>& status)
      : n_(static_cast<Index>(times.size())), event_(n_), lead_(n_), e_(n_), ea_(n_), risk_(n_), w_(n_) {
    lead_.setZero();
    for (Index pos = 0; pos < n_;) {
      Index end = pos;
      while (end < n_ && times[static_cast<std::size_t>(end)] == times[static_cast<std::size_t>(pos)]) {
        lead_[pos] += status[static_cast<std::size_t>(end)] == 1 ? 1.0 : 0.0;
        ++end;
      }
      pos = end;
    }
    for (Index i = 0; i < n_; ++i) event_[i] = status[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
    events_ = event_.sum();
  }

  // Log PL at eta; caches exp(eta - shift) and risk-set sums for expand().
  double evaluate(const Vector& eta) {
    const double shift = eta.maxCoeff();
    e_ = (eta.array() - shift).exp();
    double value = event_.dot(eta);
    double acc = 0.0;
    for (Index i = n_; i-- > 0;) {
      acc += e_[i];
      risk_[i] = acc;
    }
    LogSum logs;
    for (Index i = 0; i < n_; ++i) {
      if (lead_[i] == 0.0) continue;
      // Underflowed risk sets mean eta spans too wide a range to expand around;
      // report the point as unusable so step halving backs off.
      if (risk_[i] < 1e-280) return -std::numeric_limits<double>::infinity();
      for (double d = lead_[i]; d > 0.0; d -= 1.0) logs.add(risk_[i]);
    }
    return value - logs.value() - events_ * shift;
  }

  // Curvature state at the last evaluated eta; writes d l / d eta to `grad`.
  void expand(Vector& grad) {
    double a = 0.0;
    for (Index i = 0; i < n_; ++i) {
      const double d = lead_[i];
      if (d > 0.0) {
        const double inv = 1.0 / risk_[i];
        a += d * inv;
        w_[i] = d * inv * inv;
      } else {
        w_[i] = 0.0;
      }
      ea_[i] = e_[i] * a;
    }
    grad = event_ - ea_;
  }

  void apply_hessian(const double* v, double* out) const {
    const double* e = e_.data();
    const double* ea = ea_.data();
    const double* w = w_.data();
    // out first holds suffix sums of e * v, read back before being overwritten.
    double acc = 0.0;
    for (Index i = n_; i-- > 0;) {
      acc += e[i] * v[i];
      out[i] = acc;
    }
    double cum = 0.0;
    for (Index i = 0; i < n_; ++i) {
      cum += w[i] * out[i];
      out[i] = ea[i] * v[i] - e[i] * cum;
    }
  }

 private:
  Index n_;
  double events_ = 0.0;
  Vector event_, lead_, e_, ea_, risk_, w_;
};

}  // namespace

CoxFit fit_path(const SurvivalDataset& dataset, const PenaltySpec& penalty, const FitOptions& options) {
  if (dataset.p() < 1) config_error("fit_path needs at least one covariate");
  if (!(options.tol > 0.0) || options.max_iter < 1) config_error("tol must be > 0 and max_iter >= 1");
  const auto lambdas = lambda_sequence(dataset, penalty);
  const Index n = dataset.n();
  const Index p = dataset.p();
  const double alpha = penalty.alpha;

  // Rows sorted by time make every risk set a contiguous suffix.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& t = dataset.times();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return t[a] < t[b]; });
  Matrix sorted_x(n, p);
  std::vector<double> sorted_t(static_cast<std::size_t>(n));
  std::vector<int> sorted_s(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    sorted_x.row(i) = dataset.x().row(src);
    sorted_t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(src)];
    sorted_s[static_cast<std::size_t>(i)] = dataset.status()[static_cast<std::size_t>(src)];
  }
  const auto s = standardize(sorted_x);
  SortedCox cox(sorted_t, sorted_s);

  CoxFit fit;
  fit.lambda_path = lambdas;
  fit.beta_path = Matrix::Zero(p, static_cast<Index>(lambdas.size()));

  Vector beta = Vector::Zero(p);
  Vector eta = Vector::Zero(n);
  Vector beta_old(p), eta_old(n), grad_eta(n), grad(p), curvature(p), q(n);
  Matrix hx(n, p);  // H x_k, filled lazily per Newton step
  std::vector<char> hx_ready(static_cast<std::size_t>(p));
  std::vector<Index> active;
  Matrix block, sub, xa, hxa;
  Vector rhs, sub_rhs, step, delta, moved;
  std::vector<Index> keep;

  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double lambda = lambdas[l];
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    const double entry = l1 * (1.0 + 1e-10);  // rounding slack at lambda_max
    int sweeps = 0;
    bool converged = false;

    auto ensure_hx = [&](Index k) {
      if (!hx_ready[static_cast<std::size_t>(k)]) {
        cox.apply_hessian(s.x.col(k).data(), hx.col(k).data());
        curvature[k] = s.x.col(k).dot(hx.col(k));
        hx_ready[static_cast<std::size_t>(k)] = 1;
      }
    };

    // Coordinate step on the second-order model around beta_old, where q
    // tracks H X (beta - beta_old).
    auto update = [&](Index k) {
      const double g = grad[k] - s.x.col(k).dot(q);
      const double old = beta[k];
      if (old == 0.0 && std::abs(g) <= entry) return 0.0;
      ensure_hx(k);
      const double u = g + curvature[k] * old;
      const double denom = curvature[k] + l2;
      const double next = denom > 0.0 ? soft_threshold(u, l1) / denom : 0.0;
      const double delta = next - old;
      if (delta != 0.0) {
        beta[k] = next;
        q.noalias() += delta * hx.col(k);
      }
      return std::abs(delta);
    };

    // Minimizes the quadratic model over the active set with signs held
    // fixed, stepping to the first sign crossing and dropping that
    // coordinate until the full step fits.
    auto solve_active = [&]() {
      const auto m0 = static_cast<Index>(active.size());
      if (m0 == 0) return true;
      if (m0 > n) return false;
      block.resize(m0, m0);
      rhs.resize(m0);
      moved.setZero(m0);
      xa.resize(n, m0);
      hxa.resize(n, m0);
      for (Index b = 0; b < m0; ++b) {
        const Index kb = active[static_cast<std::size_t>(b)];
        ensure_hx(kb);
        xa.col(b) = s.x.col(kb);
        hxa.col(b) = hx.col(kb);
      }
      block.noalias() = xa.transpose() * hxa;
      rhs.noalias() = xa.transpose() * q;
      for (Index b = 0; b < m0; ++b) {
        const Index kb = active[static_cast<std::size_t>(b)];
        block(b, b) += l2;
        const double sign = beta[kb] > 0.0 ? 1.0 : -1.0;
        rhs[b] = grad[kb] - rhs[b] - l1 * sign - l2 * beta[kb];
      }
      keep.resize(static_cast<std::size_t>(m0));
      std::iota(keep.begin(), keep.end(), Index{0});
      bool done = false;
      while (!done && !keep.empty()) {
        const auto m = static_cast<Index>(keep.size());
        sub.resize(m, m);
        sub_rhs.resize(m);
        for (Index b = 0; b < m; ++b) {
          sub_rhs[b] = rhs[keep[static_cast<std::size_t>(b)]];
          for (Index a = 0; a < m; ++a) sub(a, b) = block(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
        }
        const Eigen::LLT<Matrix> llt(sub);
        if (llt.info() != Eigen::Success) break;
        step = llt.solve(sub_rhs);
        if (!step.allFinite()) break;
        double t = 1.0;
        Index blocking = -1;
        for (Index a = 0; a < m; ++a) {
          const Index k = active[static_cast<std::size_t>(keep[static_cast<std::size_t>(a)])];
          if (l1 > 0.0 && (beta[k] + step[a]) * beta[k] <= 0.0) {
            const double reach = -beta[k] / step[a];
            if (reach < t) {
              t = reach;
              blocking = a;
            }
          }
        }
        delta.setZero(m0);
        for (Index a = 0; a < m; ++a) {
          const Index j = keep[static_cast<std::size_t>(a)];
          const Index k = active[static_cast<std::size_t>(j)];
          delta[j] = a == blocking ? -beta[k] : t * step[a];
          beta[k] = a == blocking ? 0.0 : beta[k] + delta[j];
        }
        moved += delta;
        rhs.noalias() -= block * delta;
        if (blocking < 0) {
          done = true;
        } else {
          keep.erase(keep.begin() + blocking);
        }
      }
      for (Index j = 0; j < m0; ++j) {
        if (moved[j] != 0.0) q.noalias() += moved[j] * hx.col(active[static_cast<std::size_t>(j)]);
      }
      return done || keep.empty();
    };

    double pl = cox.evaluate(eta);
    // Linear extrapolation in log(lambda) from the last two solutions, kept
    // only when it improves the penalized objective over the plain warm start.
    if (l >= 2) {
      const Vector prev = fit.beta_path.col(static_cast<Index>(l - 2)).cwiseProduct(s.scale);
      const double ratio = std::log(lambdas[l] / lambdas[l - 1]) / std::log(lambdas[l - 1] / lambdas[l - 2]);
      beta_old = beta;
      eta_old = eta;
      for (Index k = 0; k < p; ++k) {
        const double guess = beta[k] + ratio * (beta[k] - prev[k]);
        if (guess * beta[k] > 0.0) beta[k] = guess;
      }
      eta.noalias() = s.x * beta;
      const double guess_pl = cox.evaluate(eta);
      if (std::isfinite(ratio) &&
          guess_pl - penalty_value(beta, lambda, alpha) > pl - penalty_value(beta_old, lambda, alpha)) {
        pl = guess_pl;
      } else {
        beta = beta_old;
        eta = eta_old;
        pl = cox.evaluate(eta);
      }
    }
    while (sweeps < options.max_iter) {
      beta_old = beta;
      eta_old = eta;
      cox.expand(grad_eta);
      const double obj_old = pl - penalty_value(beta, lambda, alpha);
      grad.noalias() = s.x.transpose() * grad_eta;
      std::fill(hx_ready.begin(), hx_ready.end(), 0);
      q.setZero();

      while (sweeps < options.max_iter) {
        double max_change = 0.0;
        for (Index k = 0; k < p; ++k) {
          if (s.usable[static_cast<std::size_t>(k)]) max_change = std::max(max_change, update(k));
        }
        ++sweeps;
        if (max_change < options.tol) break;
        active.clear();
        for (Index k = 0; k < p; ++k) {
          if (beta[k] != 0.0) active.push_back(k);
        }
        if (solve_active()) continue;
        active.clear();
        for (Index k = 0; k < p; ++k) {
          if (beta[k] != 0.0) active.push_back(k);
        }
        while (sweeps < options.max_iter) {
          double change = 0.0;
          for (Index k : active) change = std::max(change, update(k));
          ++sweeps;
          if (change < options.tol) break;
        }
      }

      eta.noalias() = s.x * beta;
      pl = cox.evaluate(eta);
      double obj_new = pl - penalty_value(beta, lambda, alpha);
      for (int halving = 0; halving < 30 && !(obj_new >= obj_old - 1e-12 * std::abs(obj_old)); ++halving) {
        beta = 0.5 * (beta + beta_old);
        eta = 0.5 * (eta + eta_old);
        pl = cox.evaluate(eta);
        obj_new = pl - penalty_value(beta, lambda, alpha);
      }
      if ((beta - beta_old).cwiseAbs().maxCoeff() < options.tol) {
        converged = true;
        break;
      }
    }

    const Index col = static_cast<Index>(l);
    fit.beta_path.col(col) = beta.cwiseQuotient(s.scale);
    fit.nonzero_counts.push_back((beta.array() != 0.0).count());
    fit.log_pl_path.push_back(pl);
    fit.converged.push_back(converged ? 1 : 0);
    fit.iterations.push_back(sweeps);
  }
  return fit;
}

Vector linear_predictor(const Vector& beta, const Matrix& covariates) {
  if (covariates.cols() != beta.size()) {
    config_error("covariate matrix has " + std::to_string(covariates.cols()) + " columns, coefficients have " +
                 std::to_string(beta.size()));
  }
  return covariates * beta;
}

CoxFit null_fit(const SurvivalDataset& dataset) {
  CoxFit fit;
  fit.beta_path = Matrix::Zero(dataset.p(), 1);
  fit.lambda_path = {dataset.p() > 0 ? lambda_max(dataset, 1.0) : 0.0};
  fit.nonzero_counts = {0};
  fit.log_pl_path = {PartialLikelihood(dataset).log_pl(Vector::Zero(dataset.n()))};
  fit.converged = {1};
  fit.iterations = {0};
  return fit;
}

}  // namespace ncvcox

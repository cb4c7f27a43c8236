#include "gaitsim/cma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gaitsim {

VectorXd reflect_into_box(const VectorXd& x, const BoxBounds& bounds) {
  VectorXd y = x;
  for (int i = 0; i < x.size(); ++i) {
    const double lo = bounds.lo(i), hi = bounds.hi(i);
    const double w = hi - lo;
    if (w <= 0.0) {
      y(i) = lo;
      continue;
    }
    double t = std::fmod(x(i) - lo, 2.0 * w);
    if (t < 0.0) t += 2.0 * w;
    y(i) = lo + (t <= w ? t : 2.0 * w - t);
  }
  return y;
}

CmaEs::CmaEs(const VectorXd& mean0, double sigma0, int lambda,
             std::optional<BoxBounds> bounds)
    : lambda_(lambda),
      mean_(mean0),
      sigma_(sigma0),
      bounds_(std::move(bounds)),
      best_f_(std::numeric_limits<double>::infinity()) {
  const int n = dim();
  if (n < 1) throw std::invalid_argument("CmaEs: empty mean");
  if (lambda_ < 2) throw std::invalid_argument("CmaEs: lambda must be >= 2");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("CmaEs: sigma0 must be > 0");
  if (bounds_ && (bounds_->lo.size() != n || bounds_->hi.size() != n)) {
    throw std::invalid_argument("CmaEs: bounds dimension mismatch");
  }

  mu_ = lambda_ / 2;
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) {
    weights_(i) = std::log(lambda_ / 2.0 + 0.5) - std::log(i + 1.0);
  }
  weights_ /= weights_.sum();
  mueff_ = 1.0 / weights_.squaredNorm();

  cc_ = (4.0 + mueff_ / n) / (n + 4.0 + 2.0 * mueff_ / n);
  cs_ = (mueff_ + 2.0) / (n + mueff_ + 5.0);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mueff_);
  cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) /
                                 ((n + 2.0) * (n + 2.0) + mueff_));
  damps_ =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (n + 1.0)) - 1.0) +
      cs_;
  chi_n_ = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  C_ = MatrixXd::Identity(n, n);
  pc_ = VectorXd::Zero(n);
  ps_ = VectorXd::Zero(n);
  best_x_ = mean_;
}

std::vector<VectorXd> CmaEs::ask(Rng& rng) {
  const int n = dim();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C_);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("CmaEs: covariance eigendecomposition failed");
  }
  const MatrixXd B = eig.eigenvectors();
  const VectorXd D =
      eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();

  std::vector<VectorXd> population;
  population.reserve(lambda_);
  for (int k = 0; k < lambda_; ++k) {
    VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    VectorXd x = mean_ + sigma_ * (B * D.cwiseProduct(z));
    if (bounds_) x = reflect_into_box(x, *bounds_);
    population.push_back(std::move(x));
  }
  return population;
}

void CmaEs::tell(const std::vector<VectorXd>& population,
                 const std::vector<double>& fitness) {
  const int n = dim();
  if (static_cast<int>(population.size()) != lambda_ ||
      fitness.size() != population.size()) {
    throw std::invalid_argument("CmaEs: tell size mismatch");
  }

  // Rank ascending; non-finite counts as worst, and exact ties break on the
  // candidate itself so the update cannot depend on presentation order.
  std::vector<int> order(lambda_);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int i) {
    const double f = fitness[i];
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = key(a), fb = key(b);
    if (fa != fb) return fa < fb;
    return std::lexicographical_compare(
        population[a].data(), population[a].data() + n, population[b].data(),
        population[b].data() + n);
  });

  if (key(order[0]) < best_f_) {
    best_f_ = key(order[0]);
    best_x_ = population[order[0]];
  }

  const VectorXd old_mean = mean_;
  mean_ = VectorXd::Zero(n);
  for (int i = 0; i < mu_; ++i) {
    mean_ += weights_(i) * population[order[i]];
  }
  const VectorXd shift = (mean_ - old_mean) / sigma_;

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(C_);
  const MatrixXd B = eig.eigenvectors();
  const VectorXd D = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
  const VectorXd c_inv_sqrt_shift =
      B * (B.transpose() * shift).cwiseQuotient(D);

  ps_ = (1.0 - cs_) * ps_ +
        std::sqrt(cs_ * (2.0 - cs_) * mueff_) * c_inv_sqrt_shift;
  const double hsig_lhs =
      ps_.norm() /
      std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * (generation_ + 1)));
  const bool hsig = hsig_lhs / chi_n_ < 1.4 + 2.0 / (n + 1.0);

  pc_ = (1.0 - cc_) * pc_;
  if (hsig) pc_ += std::sqrt(cc_ * (2.0 - cc_) * mueff_) * shift;

  MatrixXd rank_mu = MatrixXd::Zero(n, n);
  for (int i = 0; i < mu_; ++i) {
    const VectorXd y = (population[order[i]] - old_mean) / sigma_;
    rank_mu += weights_(i) * y * y.transpose();
  }
  C_ = (1.0 - c1_ - cmu_) * C_ +
       c1_ * (pc_ * pc_.transpose() +
              (hsig ? 0.0 : cc_ * (2.0 - cc_)) * C_) +
       cmu_ * rank_mu;
  C_ = 0.5 * (C_ + C_.transpose().eval());

  sigma_ *= std::exp((cs_ / damps_) * (ps_.norm() / chi_n_ - 1.0));
  generation_ += 1;
}

CmaResult cma_minimize(const std::function<double(const VectorXd&)>& f,
                       const VectorXd& x0, const CmaConfig& config, Rng& rng,
                       std::optional<BoxBounds> bounds) {
  CmaEs es(x0, config.sigma0, config.lambda, std::move(bounds));
  CmaResult result;
  result.evaluations = 0;
  while (result.evaluations + config.lambda <= config.max_evals) {
    const std::vector<VectorXd> pop = es.ask(rng);
    std::vector<double> fitness(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      fitness[i] = f(pop[i]);
      result.evaluations += 1;
    }
    es.tell(pop, fitness);
    result.best_history.push_back(es.best_f());
    if (config.target_f && es.best_f() <= *config.target_f) break;
  }
  result.best_x = es.best_x();
  result.best_f = es.best_f();
  result.mean = es.mean();
  result.sigma = es.sigma();
  result.generations = es.generation();
  return result;
}

}  // namespace gaitsim

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "gaitsim/rng.hpp"

namespace gaitsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BoxBounds {
  VectorXd lo, hi;
};

// Reflects x into [lo, hi] component-wise by mirroring at the violated
// boundary (periodic fold, so arbitrarily distant points map inside).
VectorXd reflect_into_box(const VectorXd& x, const BoxBounds& bounds);

// Covariance matrix adaptation evolution strategy (minimization), the
// standard rank-mu variant with cumulative step-size control. ask() samples
// a population, tell() consumes it with its fitness values; the pairs may
// arrive in any order, and non-finite fitness ranks worst.
class CmaEs {
 public:
  CmaEs(const VectorXd& mean0, double sigma0, int lambda,
        std::optional<BoxBounds> bounds = std::nullopt);

  std::vector<VectorXd> ask(Rng& rng);
  void tell(const std::vector<VectorXd>& population,
            const std::vector<double>& fitness);

  const VectorXd& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const MatrixXd& covariance() const { return C_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  int lambda() const { return lambda_; }
  int generation() const { return generation_; }
  const VectorXd& best_x() const { return best_x_; }
  double best_f() const { return best_f_; }

 private:
  int lambda_, mu_;
  VectorXd weights_;
  double mueff_, cc_, cs_, c1_, cmu_, damps_, chi_n_;

  VectorXd mean_;
  double sigma_;
  MatrixXd C_;
  VectorXd pc_, ps_;
  std::optional<BoxBounds> bounds_;
  int generation_ = 0;

  VectorXd best_x_;
  double best_f_;
};

struct CmaConfig {
  int lambda = 8;
  double sigma0 = 0.3;
  int max_evals = 1600;
  // optional early stop once best fitness falls to or below this
  std::optional<double> target_f;
};

struct CmaResult {
  VectorXd best_x;
  double best_f = 0.0;
  VectorXd mean;
  double sigma = 0.0;
  int evaluations = 0;
  int generations = 0;
  std::vector<double> best_history;  // best-so-far after each generation
};

// Convenience driver around ask/tell with an evaluation budget.
CmaResult cma_minimize(const std::function<double(const VectorXd&)>& f,
                       const VectorXd& x0, const CmaConfig& config, Rng& rng,
                       std::optional<BoxBounds> bounds = std::nullopt);

}  // namespace gaitsim

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fairmix/mixture.hpp"

namespace fairmix {

struct OptimizerConfig {
    double step = 1e-2;       // first-order step size
    double grad_tol = 1e-6;   // max-norm of the full gradient at return
    int max_iter = 50000;
    double coef_cap = 1e4;    // separation guard on original-scale slopes
    bool use_newton = false;  // second-order steps with first-order fallback
};

struct FairLogisticFit {
    double beta0 = 0.0;
    Eigen::VectorXd alpha;  // K entries, last pinned to zero
    Eigen::VectorXd beta;
    double lambda = 0.0;
    double delta = 1e-8;
    double objective = 0.0;
    double penalty_value = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    int n_iter = 0;
    std::vector<std::string> warnings;
};

// sqrt(|A_hat' C pi|^2 + delta); C centers across rows
double penalty_value(const GroupPosterior& A_hat, const Eigen::VectorXd& pi_hat, double delta);

// gradient of the smoothed penalty wrt coefs, eta = X_aug * coefs
Eigen::VectorXd penalty_gradient(const GroupPosterior& A_hat, const Eigen::MatrixXd& X_aug,
                                 const Eigen::VectorXd& coefs, double delta);

FairLogisticFit fit_fair_logistic(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                                  const Eigen::MatrixXd& U, double lambda, double delta = 1e-8,
                                  const OptimizerConfig& opt = OptimizerConfig{});

// fitted probabilities on new rows
Eigen::VectorXd predict_logistic_batch(const FairLogisticFit& fit, const GroupPosterior& A_hat,
                                       const Eigen::MatrixXd& U);

}  // namespace fairmix

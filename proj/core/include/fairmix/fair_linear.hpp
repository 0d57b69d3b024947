#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fairmix/mixture.hpp"

namespace fairmix {

// Constrained least-squares fit of y on [1, A_hat, U] where the share of
// predictor variance attributable to the posterior block is capped:
// (1-eps) a'S_A a <= eps b'S_U b.
struct FairLinearFit {
    double beta0 = 0.0;
    Eigen::VectorXd alpha;   // K
    Eigen::VectorXd beta;    // p
    double epsilon = 0.0;
    double sse = 0.0;
    double r2_given_A = 0.0;   // a'S_A a / (a'S_A a + b'S_U b)
    double multiplier = 0.0;   // dual value of the quadratic constraint
    std::vector<std::string> warnings;
};

// eps=1 is the unconstrained least-squares fit; eps=0 forces alpha = 0. In
// between, the KKT system is solved by bisection on the single dual
// multiplier: both stationarity solves decouple into scalings of the
// unconstrained solutions.
FairLinearFit fit_fair_ls(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                          const Eigen::MatrixXd& U, double epsilon);

double predict_linear(const FairLinearFit& fit, const Eigen::VectorXd& a_row,
                      const Eigen::VectorXd& u_row);

Eigen::VectorXd predict_linear_batch(const FairLinearFit& fit, const GroupPosterior& A_hat,
                                     const Eigen::MatrixXd& U);

}  // namespace fairmix

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fairmix/mixture.hpp"

namespace fairmix {

// Least-squares decomposition X = 1 mu' + A_hat B + U with U orthogonal to
// the intercept and to the centered posterior columns.
struct ResidualizedDesign {
    Eigen::MatrixXd residuals;     // n x p, U
    Eigen::MatrixXd coefficients;  // K x p, B (zero row for a dropped column)
    Eigen::VectorXd intercept;     // p, mu
    std::vector<std::string> warnings;
};

// Regress every column of X on [1, A_hat]. Posterior rows sum to 1, so that
// design is rank-deficient by construction; the last posterior column is
// dropped from the solve and reported with a zero coefficient row.
ResidualizedDesign residualize(const Eigen::MatrixXd& X, const GroupPosterior& A_hat);

// Sample covariances (centered second moments over n) of posterior rows and
// residual rows.
struct SampleCov {
    Eigen::MatrixXd S_A;   // K x K
    Eigen::MatrixXd S_U;   // p x p
};

SampleCov sample_covs(const GroupPosterior& A_hat, const Eigen::MatrixXd& U);

}  // namespace fairmix

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "fairmix/mixture.hpp"

namespace fairmix {

// Parameter-counting test: a product-categorical mixture is identifiable
// only if the mixture's free parameters fit inside the joint distribution's
// degrees of freedom.
struct IdentifiabilityVerdict {
    long long n_mix = 0;     // (K-1) + K * sum_d (M_d - 1)
    long long n_joint = 0;   // prod_d M_d - 1
    bool identifiable = false;
};

IdentifiabilityVerdict identifiability_check(int K, const std::vector<int>& arities);

// Population accuracy of the posterior-mode classifier for a shared-covariance
// Gaussian mixture. Exact for K=2; for K>=3 the pairwise-event product is an
// approximation (pairwise events are not independent).
double gaussian_accuracy_multi(const Eigen::MatrixXd& means, const Eigen::MatrixXd& sigma_e,
                               const Eigen::VectorXd& mixing);

// Univariate specialization; pairwise separation |mu_k - mu_l| / sigma_e.
double gaussian_accuracy_uni(const Eigen::VectorXd& mus, double sigma_e,
                             const Eigen::VectorXd& mixing);

// Minimum standardized separation delta* such that the accuracy formula is
// at least 1 - alpha whenever all pairwise separations reach delta*.
double separation_threshold(const Eigen::VectorXd& mixing, double alpha);

// Population accuracy of the posterior-mode classifier for a product-
// categorical mixture, by exact enumeration of all level combinations.
// Enumeration larger than `cap` cells throws TooLargeError.
double categorical_accuracy(const CategoricalMixtureParams& params,
                            std::uint64_t cap = (1ull << 20));

// Closed form for K=2, D=1, binary levels: component 1 has success
// probability theta1 and prior p, component 2 has theta2 and prior 1-p.
double categorical_accuracy_binary(double p, double theta1, double theta2);

// Inputs of the population R^2 trade-off formulas. The sensitive block is
// x_a = h(A)^T mu + e with h one-hot; x_z is the remaining block.
struct R2Inputs {
    Eigen::VectorXd beta_a;    // p_a
    Eigen::VectorXd beta_z;    // p_z (may be empty)
    Eigen::MatrixXd mu;        // K x p_a component means
    Eigen::MatrixXd sigma_A;   // K x K one-hot covariance
    Eigen::MatrixXd sigma_e;   // p_a x p_a
    Eigen::MatrixXd sigma_xz;  // p_z x p_z
    Eigen::MatrixXd sigma_12;  // p_a x p_z cross-covariance of (e, x_z)
    double sigma_eps2 = 0.0;   // residual variance
};

// Returns (R_x^2, R_a^2): population R^2 of the full linear predictor and of
// the group-information-free predictor.
std::pair<double, double> r2_general(const R2Inputs& inp);

// Univariate binary-group closed form; agrees with r2_general on the
// equivalent inputs.
std::pair<double, double> r2_univariate(double beta1, double mu, double p, double sigma_e,
                                        double sigma_eps);

}  // namespace fairmix

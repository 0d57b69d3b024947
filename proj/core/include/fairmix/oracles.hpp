#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "fairmix/mixture.hpp"

namespace fairmix {

// Brute-force references. Everything here reimplements its target quantity
// through a different route than the library code it checks.
struct OracleReport {
    std::string name;
    double value = 0.0;
    double se = 0.0;  // 0 for deterministic oracles
    std::string inputs_hash;
};

// hex FNV-1a over the 17-digit rendering of the inputs
std::string hash_inputs(const std::vector<double>& inputs);

// simulate, classify by maximum joint density, report hit rate; the returned
// SE uses an add-half correction so stochastic reports never claim zero noise
std::pair<double, double> mc_classification_accuracy(const GaussianMixtureParams& params,
                                                     Eigen::Index n, std::uint64_t seed);
std::pair<double, double> mc_classification_accuracy(const CategoricalMixtureParams& params,
                                                     Eigen::Index n, std::uint64_t seed);

// depth-first walk over all level combinations, literal decision per cell
double enumerate_categorical_accuracy(const CategoricalMixtureParams& params,
                                      std::uint64_t cap = (1ull << 20));

// exact two-component univariate Gaussian accuracy via the decision threshold
double gaussian_threshold_accuracy(const Eigen::Vector2d& mus, double sigma,
                                   const Eigen::Vector2d& mixing);

// central differences, one coordinate at a time
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h);

struct DualScanResult {
    Eigen::VectorXd alpha_reduced;  // K-1 coordinates, last posterior column dropped
    Eigen::VectorXd beta;
    double sse = 0.0;
    double multiplier = 0.0;
};

// dense multiplier scan with per-point stationarity solves, bracket refined by
// bisection on the constraint sign; returns the best feasible point found
DualScanResult dual_scan_fair_ls(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                                 const Eigen::MatrixXd& U, double epsilon, int grid_size = 1000);

// unpenalized logistic maximum likelihood by iteratively reweighted least
// squares on an explicit design (intercept column included by the caller)
Eigen::VectorXd irls_logistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                              int max_iter = 100, double tol = 1e-12);

}  // namespace fairmix

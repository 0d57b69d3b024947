#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fairmix {

// Fitting controls shared by all mixture families.
struct EmConfig {
    int max_iter = 500;
    double rel_tol = 1e-8;       // relative log-likelihood change
    int n_restarts = 5;
    std::uint64_t seed = 0;
};

// K-component Gaussian mixture with one covariance shared by all components.
struct GaussianMixtureParams {
    Eigen::VectorXd mixing;      // K, nonnegative, sums to 1
    Eigen::MatrixXd means;       // K x p, one row per component
    Eigen::MatrixXd cov;         // p x p shared covariance
};

// K-component product-multinomial mixture over D categorical predictors.
// probs[k][d] holds the level probabilities of predictor d in component k;
// levels are coded 1..m_d in data matrices.
struct CategoricalMixtureParams {
    Eigen::VectorXd mixing;
    std::vector<std::vector<Eigen::VectorXd>> probs;  // [K][D], each length m_d
};

// Product of a categorical block and a diagonal-Gaussian block; the diagonal
// variances are shared across components.
struct HybridMixtureParams {
    Eigen::VectorXd mixing;
    std::vector<std::vector<Eigen::VectorXd>> cat_probs;  // [K][D]
    Eigen::MatrixXd means;                                // K x M
    Eigen::VectorXd vars;                                 // M, shared diagonal
};

// Posterior class-membership probabilities, one row per observation.
// Every row sums to 1 within 1e-10.
struct GroupPosterior {
    Eigen::MatrixXd probs;       // n x K
    int n() const { return static_cast<int>(probs.rows()); }
    int k() const { return static_cast<int>(probs.cols()); }
};

template <class Params>
struct MixtureFit {
    Params params;
    GroupPosterior posterior;
    double loglik = 0.0;
    int n_iter = 0;
    bool converged = false;
    // Smallest log-likelihood increment seen over all restarts/iterations;
    // steps immediately after an empty-component reseed are excluded.
    double min_loglik_step = std::numeric_limits<double>::infinity();
    std::vector<double> loglik_trace;   // winning restart, includes final E-step
    std::vector<std::string> warnings;
};

using GaussianMixtureFit = MixtureFit<GaussianMixtureParams>;
using CategoricalMixtureFit = MixtureFit<CategoricalMixtureParams>;
using HybridMixtureFit = MixtureFit<HybridMixtureParams>;

// Multi-restart EM fits. Deterministic given (data, cfg.seed); components are
// returned in canonical order (ascending first mean coordinate for families
// with a continuous block, ascending first level probability of the first
// categorical predictor otherwise).
GaussianMixtureFit fit_gaussian_em(const Eigen::MatrixXd& xa, int K, const EmConfig& cfg = {});

CategoricalMixtureFit fit_categorical_em(const Eigen::MatrixXi& levels,
                                         const std::vector<int>& arities, int K,
                                         const EmConfig& cfg = {});

HybridMixtureFit fit_hybrid_em(const Eigen::MatrixXi& levels, const std::vector<int>& arities,
                               const Eigen::MatrixXd& xa_cont, int K, const EmConfig& cfg = {});

// One maximization update from fixed responsibilities, through the same code
// the iterative fits run; mixing comes back as the responsibility column means.
GaussianMixtureParams gaussian_m_step(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& resp);
CategoricalMixtureParams categorical_m_step(const Eigen::MatrixXi& levels,
                                            const std::vector<int>& arities,
                                            const Eigen::MatrixXd& resp);
HybridMixtureParams hybrid_m_step(const Eigen::MatrixXi& levels, const std::vector<int>& arities,
                                  const Eigen::MatrixXd& xa_cont, const Eigen::MatrixXd& resp);

// Posterior membership probabilities at given observations.
Eigen::MatrixXd posterior_matrix(const GaussianMixtureParams& p, const Eigen::MatrixXd& x);
Eigen::MatrixXd posterior_matrix(const CategoricalMixtureParams& p, const Eigen::MatrixXi& levels);
Eigen::MatrixXd posterior_matrix(const HybridMixtureParams& p, const Eigen::MatrixXi& levels,
                                 const Eigen::MatrixXd& xc);

// Single-observation convenience overloads.
Eigen::VectorXd posterior(const GaussianMixtureParams& p, const Eigen::VectorXd& x);
Eigen::VectorXd posterior(const CategoricalMixtureParams& p, const Eigen::VectorXi& levels);
Eigen::VectorXd posterior(const HybridMixtureParams& p, const Eigen::VectorXi& levels,
                          const Eigen::VectorXd& xc);

// Posterior-mode labels in {1..K}; ties go to the smallest index.
Eigen::VectorXi map_classify(const GroupPosterior& post);

// Observed-data log-likelihood, recomputed directly from the parameters.
double log_likelihood(const GaussianMixtureParams& p, const Eigen::MatrixXd& x);
double log_likelihood(const CategoricalMixtureParams& p, const Eigen::MatrixXi& levels);
double log_likelihood(const HybridMixtureParams& p, const Eigen::MatrixXi& levels,
                      const Eigen::MatrixXd& xc);

}  // namespace fairmix

#include "fairmix/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fairmix/errors.hpp"
#include "fairmix/normal.hpp"

namespace fairmix {

namespace {

void check_mixing(const Eigen::VectorXd& mixing) {
    if (mixing.size() < 1) throw std::invalid_argument("mixing vector is empty");
    if (mixing.minCoeff() <= 0.0) {
        throw std::invalid_argument("mixing weights must be strictly positive");
    }
    if (std::abs(mixing.sum() - 1.0) > 1e-8) {
        throw std::invalid_argument("mixing weights must sum to 1");
    }
}

// Pairwise term P(component k beats component l) at standardized separation
// d = ||Delta mu_tilde||. Zero separation resolves by prior, ties by index.
double pairwise_term(double d, double pk, double pl, int k, int l) {
    if (d <= 0.0) {
        if (pk > pl) return 1.0;
        if (pk < pl) return 0.0;
        return k < l ? 1.0 : 0.0;
    }
    return 1.0 - norm_cdf(std::log(pl / pk) / d - 0.5 * d);
}

double product_form_accuracy(const Eigen::MatrixXd& sep, const Eigen::VectorXd& mixing) {
    const int K = static_cast<int>(mixing.size());
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
        double prod = 1.0;
        for (int l = 0; l < K; ++l) {
            if (l == k) continue;
            prod *= pairwise_term(sep(k, l), mixing(k), mixing(l), k, l);
        }
        acc += mixing(k) * prod;
    }
    return acc;
}

}  // namespace

IdentifiabilityVerdict identifiability_check(int K, const std::vector<int>& arities) {
    if (K < 2) throw std::invalid_argument("identifiability_check: K must be >= 2");
    if (arities.empty()) throw std::invalid_argument("identifiability_check: arities empty");
    long long sum_extra = 0;
    long long joint = 1;
    for (int m : arities) {
        if (m < 2) throw std::invalid_argument("identifiability_check: every arity must be >= 2");
        sum_extra += m - 1;
        if (joint > (1ll << 62) / m) {
            throw TooLargeError("identifiability_check: joint cell count overflows");
        }
        joint *= m;
    }
    IdentifiabilityVerdict v;
    v.n_mix = (K - 1) + static_cast<long long>(K) * sum_extra;
    v.n_joint = joint - 1;
    v.identifiable = v.n_joint >= v.n_mix;
    return v;
}

double gaussian_accuracy_multi(const Eigen::MatrixXd& means, const Eigen::MatrixXd& sigma_e,
                               const Eigen::VectorXd& mixing) {
    check_mixing(mixing);
    const int K = static_cast<int>(mixing.size());
    if (means.rows() != K) {
        throw std::invalid_argument("gaussian_accuracy_multi: means rows must equal K");
    }
    if (sigma_e.rows() != means.cols() || sigma_e.cols() != means.cols()) {
        throw std::invalid_argument("gaussian_accuracy_multi: sigma_e dimension mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_e);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("gaussian_accuracy_multi: sigma_e must be positive definite");
    }
    // Mahalanobis separations ||Sigma^{-1/2}(mu_k - mu_l)||
    Eigen::MatrixXd sep = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k) {
        for (int l = k + 1; l < K; ++l) {
            Eigen::VectorXd diff = (means.row(k) - means.row(l)).transpose();
            const double d2 = diff.dot(llt.solve(diff));
            const double d = std::sqrt(std::max(d2, 0.0));
            sep(k, l) = d;
            sep(l, k) = d;
        }
    }
    return product_form_accuracy(sep, mixing);
}

double gaussian_accuracy_uni(const Eigen::VectorXd& mus, double sigma_e,
                             const Eigen::VectorXd& mixing) {
    check_mixing(mixing);
    if (sigma_e <= 0.0) throw std::invalid_argument("gaussian_accuracy_uni: sigma_e must be > 0");
    const int K = static_cast<int>(mixing.size());
    if (mus.size() != K) throw std::invalid_argument("gaussian_accuracy_uni: mus size mismatch");
    Eigen::MatrixXd sep(K, K);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
            sep(k, l) = std::abs(mus(k) - mus(l)) / sigma_e;
        }
    }
    return product_form_accuracy(sep, mixing);
}

double separation_threshold(const Eigen::VectorXd& mixing, double alpha) {
    check_mixing(mixing);
    const int K = static_cast<int>(mixing.size());
    if (K < 2) throw std::invalid_argument("separation_threshold: K must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("separation_threshold: alpha must lie in (0,1)");
    }
    const double alpha_pair = 1.0 - std::pow(1.0 - alpha, 1.0 / (K - 1));
    const double z = norm_quantile(alpha_pair);
    const double ratio = mixing.maxCoeff() / mixing.minCoeff();
    const double delta = std::sqrt(2.0 * std::log(ratio) + z * z) - z;
    return std::max(delta, 0.0);
}

double categorical_accuracy(const CategoricalMixtureParams& params, std::uint64_t cap) {
    check_mixing(params.mixing);
    const int K = static_cast<int>(params.mixing.size());
    if (static_cast<int>(params.probs.size()) != K) {
        throw std::invalid_argument("categorical_accuracy: probs blocks must match K");
    }
    const int D = static_cast<int>(params.probs[0].size());
    if (D < 1) throw std::invalid_argument("categorical_accuracy: no categorical predictors");
    std::vector<int> arity(D);
    std::uint64_t cells = 1;
    for (int d = 0; d < D; ++d) {
        arity[d] = static_cast<int>(params.probs[0][d].size());
        for (int k = 0; k < K; ++k) {
            if (static_cast<int>(params.probs[k][d].size()) != arity[d]) {
                throw std::invalid_argument("categorical_accuracy: inconsistent arities");
            }
        }
        if (cells > cap / static_cast<std::uint64_t>(arity[d])) {
            throw TooLargeError("categorical_accuracy: " + std::to_string(D) +
                                " predictors exceed the enumeration cap; use the Monte-Carlo oracle");
        }
        cells *= static_cast<std::uint64_t>(arity[d]);
    }
    if (cells > cap) {
        throw TooLargeError("categorical_accuracy: enumeration cap exceeded");
    }

    // mixed-radix walk over all cells; per cell the posterior-mode winner
    // takes the mass it owns (strict argmax, ties to the smallest index)
    std::vector<int> idx(D, 0);
    Eigen::VectorXd cellmass(K);
    double acc = 0.0;
    for (std::uint64_t c = 0; c < cells; ++c) {
        for (int k = 0; k < K; ++k) {
            double m = params.mixing(k);
            for (int d = 0; d < D; ++d) m *= params.probs[k][d](idx[d]);
            cellmass(k) = m;
        }
        int win = 0;
        for (int k = 1; k < K; ++k) {
            if (cellmass(k) > cellmass(win)) win = k;
        }
        acc += cellmass(win);
        for (int d = D - 1; d >= 0; --d) {
            if (++idx[d] < arity[d]) break;
            idx[d] = 0;
        }
    }
    return acc;
}

double categorical_accuracy_binary(double p, double theta1, double theta2) {
    for (double v : {p, theta1, theta2}) {
        if (!(v > 0.0 && v < 1.0)) {
            throw std::invalid_argument(
                "categorical_accuracy_binary: arguments must lie strictly in (0,1)");
        }
    }
    const double m = (theta1 / theta2 >= (1.0 - p) / p) ? 1.0 : 0.0;
    const double n = ((1.0 - theta1) / (1.0 - theta2) >= (1.0 - p) / p) ? 1.0 : 0.0;
    return (m - n) * (p * theta1 - (1.0 - p) * theta2) + n * (2.0 * p - 1.0) + (1.0 - p);
}

namespace {

void require_psd(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + " must be square");
    }
    if (m.rows() == 0) return;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + m.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument(std::string(what) + " must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw std::invalid_argument(std::string(what) + " must be positive semidefinite");
    }
}

}  // namespace

std::pair<double, double> r2_general(const R2Inputs& inp) {
    const auto pa = inp.beta_a.size();
    const auto pz = inp.beta_z.size();
    const auto K = inp.mu.rows();
    if (inp.mu.cols() != pa) throw std::invalid_argument("r2_general: mu columns must match beta_a");
    if (inp.sigma_A.rows() != K || inp.sigma_A.cols() != K) {
        throw std::invalid_argument("r2_general: sigma_A must be K x K");
    }
    if (inp.sigma_e.rows() != pa || inp.sigma_e.cols() != pa) {
        throw std::invalid_argument("r2_general: sigma_e must be p_a x p_a");
    }
    if (inp.sigma_xz.rows() != pz || inp.sigma_xz.cols() != pz) {
        throw std::invalid_argument("r2_general: sigma_xz must be p_z x p_z");
    }
    if (inp.sigma_12.rows() != pa || inp.sigma_12.cols() != pz) {
        throw std::invalid_argument("r2_general: sigma_12 must be p_a x p_z");
    }
    if (!(inp.sigma_eps2 > 0.0)) {
        throw std::invalid_argument("r2_general: sigma_eps2 must be positive");
    }
    require_psd(inp.sigma_A, "sigma_A");
    const double rowsum = inp.sigma_A.rowwise().sum().cwiseAbs().maxCoeff();
    if (rowsum > 1e-8 * (1.0 + inp.sigma_A.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("r2_general: sigma_A rows must sum to zero (one-hot covariance)");
    }
    // (e, x_z) joint covariance must be PSD; this implies the block condition
    // with the group term added and is what keeps both R^2 values in [0,1]
    Eigen::MatrixXd block(pa + pz, pa + pz);
    block.topLeftCorner(pa, pa) = inp.sigma_e;
    block.topRightCorner(pa, pz) = inp.sigma_12;
    block.bottomLeftCorner(pz, pa) = inp.sigma_12.transpose();
    block.bottomRightCorner(pz, pz) = inp.sigma_xz;
    require_psd(block, "[[sigma_e, sigma_12],[sigma_12',sigma_xz]]");

    const double na = inp.beta_a.dot(inp.sigma_e * inp.beta_a) +
                      (pz > 0 ? inp.beta_z.dot(inp.sigma_xz * inp.beta_z) : 0.0) +
                      (pz > 0 ? 2.0 * inp.beta_a.dot(inp.sigma_12 * inp.beta_z) : 0.0);
    const Eigen::VectorXd mu_beta = inp.mu * inp.beta_a;             // K
    const double group = mu_beta.dot(inp.sigma_A * mu_beta);
    const double nx = na + group;
    const double denom = nx + inp.sigma_eps2;
    return {nx / denom, na / denom};
}

std::pair<double, double> r2_univariate(double beta1, double mu, double p, double sigma_e,
                                        double sigma_eps) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("r2_univariate: p must lie in (0,1)");
    if (sigma_e <= 0.0 || sigma_eps <= 0.0) {
        throw std::invalid_argument("r2_univariate: sigma_e and sigma_eps must be positive");
    }
    const double b2 = beta1 * beta1;
    const double group = p * (1.0 - p) * mu * mu;
    const double denom = b2 * group + b2 * sigma_e * sigma_e + sigma_eps * sigma_eps;
    return {b2 * (group + sigma_e * sigma_e) / denom, b2 * sigma_e * sigma_e / denom};
}

}  // namespace fairmix

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fairmix/mixture.hpp"
#include "fairmix/oracles.hpp"
#include "fairmix/residualize.hpp"
#include "fairmix/rng.hpp"
#include "fairmix/theory.hpp"

using namespace fairmix;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

CategoricalMixtureParams binary_config(double p, const std::vector<double>& th1,
                                       const std::vector<double>& th2) {
    CategoricalMixtureParams params;
    params.mixing = vec({p, 1.0 - p});
    params.probs.resize(2);
    for (std::size_t d = 0; d < th1.size(); ++d) {
        params.probs[0].push_back(vec({th1[d], 1.0 - th1[d]}));
        params.probs[1].push_back(vec({th2[d], 1.0 - th2[d]}));
    }
    return params;
}

}  // namespace

TEST_CASE("input hashing is stable and collision-averse") {
    const std::string h1 = hash_inputs({1.0, 2.0, 3.0});
    CHECK(h1 == hash_inputs({1.0, 2.0, 3.0}));
    CHECK(h1 != hash_inputs({1.0, 2.0, 3.0000001}));
    CHECK(h1 != hash_inputs({3.0, 2.0, 1.0}));
    CHECK(!h1.empty());
}

TEST_CASE("threshold accuracy reference value and symmetry") {
    CHECK(std::abs(gaussian_threshold_accuracy(Eigen::Vector2d(0.0, 3.0), 1.0,
                                               Eigen::Vector2d(0.7, 0.3)) -
                   0.94035418899387103) < 1e-12);
    // swapping the components cannot change the attainable accuracy
    const double a = gaussian_threshold_accuracy(Eigen::Vector2d(-1.0, 2.0), 1.3,
                                                 Eigen::Vector2d(0.4, 0.6));
    const double b = gaussian_threshold_accuracy(Eigen::Vector2d(2.0, -1.0), 1.3,
                                                 Eigen::Vector2d(0.6, 0.4));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("two-component formula equals the threshold construction") {
    Rng rng(701);
    for (int rep = 0; rep < 100; ++rep) {
        const double mu2 = 0.5 + 5.0 * rng.next_double();
        const double sd = 0.4 + 1.6 * rng.next_double();
        const double p = 0.05 + 0.9 * rng.next_double();
        const double f = gaussian_accuracy_uni(vec({0.0, mu2}), sd, vec({p, 1.0 - p}));
        const double t = gaussian_threshold_accuracy(Eigen::Vector2d(0.0, mu2), sd,
                                                     Eigen::Vector2d(p, 1.0 - p));
        CHECK(std::abs(f - t) < 1e-10);
    }
}

TEST_CASE("gaussian monte carlo agrees with the exact two-component value") {
    GaussianMixtureParams params;
    params.mixing = vec({0.6, 0.4});
    params.means = Eigen::MatrixXd(2, 1);
    params.means << 0.0, 2.5;
    params.cov = Eigen::MatrixXd::Identity(1, 1);
    const auto [acc, se] = mc_classification_accuracy(params, 200000, 11);
    CHECK(se > 0.0);
    const double exact =
        gaussian_threshold_accuracy(Eigen::Vector2d(0.0, 2.5), 1.0, Eigen::Vector2d(0.6, 0.4));
    CHECK(std::abs(acc - exact) < 4.0 * se);
}

TEST_CASE("categorical monte carlo agrees with enumeration") {
    const CategoricalMixtureParams params =
        binary_config(0.3, {0.2, 0.6, 0.2}, {0.4, 0.3, 0.5});
    const double exact = enumerate_categorical_accuracy(params);
    const auto [acc, se] = mc_classification_accuracy(params, 200000, 13);
    CHECK(std::abs(acc - exact) < 4.0 * se);
}

TEST_CASE("both categorical enumerations agree on random designs") {
    Rng rng(702);
    for (int rep = 0; rep < 40; ++rep) {
        const int K = 2 + static_cast<int>(rng.next_index(2));
        const int D = 1 + static_cast<int>(rng.next_index(3));
        CategoricalMixtureParams params;
        params.mixing.resize(K);
        for (int k = 0; k < K; ++k) params.mixing(k) = 0.1 + rng.next_double();
        params.mixing /= params.mixing.sum();
        params.probs.resize(K);
        for (int k = 0; k < K; ++k) {
            for (int d = 0; d < D; ++d) {
                const int m = 2 + static_cast<int>(rng.next_index(3));
                Eigen::VectorXd pr(m);
                for (int l = 0; l < m; ++l) pr(l) = 0.05 + rng.next_double();
                pr /= pr.sum();
                params.probs[k].push_back(pr);
            }
            // all components must share the arity pattern of component 0
            if (k > 0) {
                for (int d = 0; d < D; ++d) {
                    const int m = static_cast<int>(params.probs[0][d].size());
                    Eigen::VectorXd pr(m);
                    for (int l = 0; l < m; ++l) pr(l) = 0.05 + rng.next_double();
                    pr /= pr.sum();
                    params.probs[k][d] = pr;
                }
            }
        }
        const double a = categorical_accuracy(params);
        const double b = enumerate_categorical_accuracy(params);
        CHECK(std::abs(a - b) < 1e-12);
    }
}

TEST_CASE("difference quotients recover a known gradient") {
    Eigen::MatrixXd Q(3, 3);
    Q << 4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0;
    const Eigen::VectorXd x = vec({0.3, -1.2, 0.8});
    const Eigen::VectorXd g = finite_diff_gradient(
        [&](const Eigen::VectorXd& v) { return 0.5 * v.dot(Q * v); }, x, 1e-6);
    CHECK((g - Q * x).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("reference logistic solver reaches a stationary point") {
    Rng rng(703);
    const int n = 2000;
    Eigen::MatrixXd X(n, 3);
    X.col(0).setOnes();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 1) = rng.next_normal();
        X(i, 2) = rng.next_normal();
        const double eta = -0.5 + 1.2 * X(i, 1) - 0.8 * X(i, 2);
        y(i) = rng.next_double() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    }
    const Eigen::VectorXd coef = irls_logistic(y, X);
    const Eigen::VectorXd pi = (1.0 / (1.0 + (-(X * coef).array()).exp())).matrix();
    CHECK((X.transpose() * (pi - y)).cwiseAbs().maxCoeff() < 1e-8);
    // estimates sit near the generating coefficients
    CHECK(std::abs(coef(1) - 1.2) < 0.35);
    CHECK(std::abs(coef(2) + 0.8) < 0.35);
}

TEST_CASE("multiplier scan returns a feasible point no better than unconstrained") {
    Rng rng(704);
    const int n = 200, K = 2, p = 2;
    GroupPosterior post;
    post.probs.resize(n, K);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double a = 0.1 + 0.8 * rng.next_double();
        post.probs(i, 0) = a;
        post.probs(i, 1) = 1.0 - a;
        X(i, 0) = rng.next_normal();
        X(i, 1) = rng.next_normal();
        y(i) = 2.0 * a + 0.5 * X(i, 0) + 0.3 * rng.next_normal();
    }
    const Eigen::MatrixXd U = residualize(X, post).residuals;
    const DualScanResult free_fit = dual_scan_fair_ls(y, post, U, 1.0);
    const DualScanResult tight = dual_scan_fair_ls(y, post, U, 0.2);
    CHECK(tight.sse >= free_fit.sse - 1e-9);
    CHECK(tight.multiplier >= 0.0);
}

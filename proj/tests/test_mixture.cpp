#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fairmix/errors.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/rng.hpp"
#include "fairmix/scenarios.hpp"

using namespace fairmix;

namespace {

// rows uniform on the simplex, independent of the data
Eigen::MatrixXd random_resp(int n, int K, Rng& rng) {
    Eigen::MatrixXd r(n, K);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            r(i, k) = -std::log(rng.next_open());
            s += r(i, k);
        }
        r.row(i) /= s;
    }
    return r;
}

Eigen::MatrixXd blob_data(int n, Rng& rng, const std::vector<double>& centers, double sd) {
    Eigen::MatrixXd x(n, 2);
    const int K = static_cast<int>(centers.size());
    for (int i = 0; i < n; ++i) {
        const int k = static_cast<int>(rng.next_index(K));
        x(i, 0) = centers[k] + sd * rng.next_normal();
        x(i, 1) = -centers[k] + sd * rng.next_normal();
    }
    return x;
}

}  // namespace

TEST_CASE("gaussian maximization step reproduces weighted moments") {
    Rng rng(101);
    const int n = 240, K = 3;
    Eigen::MatrixXd x = blob_data(n, rng, {0.0, 2.0, 5.0}, 1.0);
    Eigen::MatrixXd resp = random_resp(n, K, rng);

    GaussianMixtureParams p = gaussian_m_step(x, resp);

    // direct weighted statistics, computed here with plain loops
    Eigen::VectorXd mass = resp.colwise().sum();
    for (int k = 0; k < K; ++k) {
        Eigen::RowVectorXd mk = Eigen::RowVectorXd::Zero(2);
        for (int i = 0; i < n; ++i) mk += resp(i, k) * x.row(i);
        mk /= mass(k);
        CHECK((p.means.row(k) - mk).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(p.mixing(k) == doctest::Approx(mass(k) / n).epsilon(1e-12));
    }
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < n; ++i) {
            Eigen::RowVectorXd d = x.row(i) - p.means.row(k);
            cov += resp(i, k) * d.transpose() * d;
        }
    }
    cov /= n;
    CHECK((p.cov - cov).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("categorical maximization step reproduces weighted frequencies") {
    Rng rng(102);
    const int n = 300, K = 2;
    std::vector<int> arities = {3, 2, 4};
    Eigen::MatrixXi lv(n, 3);
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < 3; ++d) lv(i, d) = 1 + static_cast<int>(rng.next_index(arities[d]));
    }
    Eigen::MatrixXd resp = random_resp(n, K, rng);

    CategoricalMixtureParams p = categorical_m_step(lv, arities, resp);

    Eigen::VectorXd mass = resp.colwise().sum();
    for (int k = 0; k < K; ++k) {
        CHECK(p.mixing(k) == doctest::Approx(mass(k) / n).epsilon(1e-12));
        for (int d = 0; d < 3; ++d) {
            Eigen::VectorXd freq = Eigen::VectorXd::Zero(arities[d]);
            for (int i = 0; i < n; ++i) freq(lv(i, d) - 1) += resp(i, k);
            freq /= mass(k);
            CHECK((p.probs[k][d] - freq).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(p.probs[k][d].sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("hybrid maximization step reproduces both blocks") {
    Rng rng(103);
    const int n = 260, K = 2;
    std::vector<int> arities = {2, 3};
    Eigen::MatrixXi lv(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < 2; ++d) lv(i, d) = 1 + static_cast<int>(rng.next_index(arities[d]));
    }
    Eigen::MatrixXd xc(n, 2);
    for (int i = 0; i < n; ++i) {
        xc(i, 0) = rng.next_normal();
        xc(i, 1) = 2.0 + 0.5 * rng.next_normal();
    }
    Eigen::MatrixXd resp = random_resp(n, K, rng);

    HybridMixtureParams p = hybrid_m_step(lv, arities, xc, resp);
    CategoricalMixtureParams pc = categorical_m_step(lv, arities, resp);

    Eigen::VectorXd mass = resp.colwise().sum();
    for (int k = 0; k < K; ++k) {
        for (int d = 0; d < 2; ++d) {
            CHECK((p.cat_probs[k][d] - pc.probs[k][d]).cwiseAbs().maxCoeff() < 1e-12);
        }
        Eigen::RowVectorXd mk = (resp.col(k).transpose() * xc) / mass(k);
        CHECK((p.means.row(k) - mk).cwiseAbs().maxCoeff() < 1e-12);
    }
    // pooled per-coordinate variances, shared by the components
    for (int d = 0; d < 2; ++d) {
        double v = 0.0;
        for (int k = 0; k < K; ++k) {
            for (int i = 0; i < n; ++i) {
                const double diff = xc(i, d) - p.means(k, d);
                v += resp(i, k) * diff * diff;
            }
        }
        CHECK(p.vars(d) == doctest::Approx(v / n).epsilon(1e-12));
    }
}

TEST_CASE("maximization step rejects malformed responsibilities") {
    Rng rng(104);
    Eigen::MatrixXd x = blob_data(50, rng, {0.0, 4.0}, 1.0);
    CHECK_THROWS_AS(gaussian_m_step(x, Eigen::MatrixXd::Ones(49, 2) * 0.5),
                    std::invalid_argument);
    Eigen::MatrixXd dead = Eigen::MatrixXd::Zero(50, 2);
    dead.col(0).setOnes();  // second column carries no mass
    CHECK_THROWS_AS(gaussian_m_step(x, dead), std::invalid_argument);
}

TEST_CASE("gaussian fit recovers three well separated components") {
    Scenario scn;
    scn.name = "gaussian-uni";
    scn.params["mu_min"] = 4.0;
    scn.n = 900;
    scn.seed = 31;
    const GaussianUniDraw d = gen_gaussian_uni(scn);

    EmConfig cfg;
    cfg.seed = 7;
    const GaussianMixtureFit fit = fit_gaussian_em(d.x, 3, cfg);

    CHECK(fit.converged);
    CHECK(fit.n_iter >= 2);
    // canonical order: ascending first mean coordinate
    CHECK(fit.params.means(0, 0) < fit.params.means(1, 0));
    CHECK(fit.params.means(1, 0) < fit.params.means(2, 0));
    // truth is means (0, 4, 9), shared unit variance, mixing (.2, .3, .5)
    CHECK(std::abs(fit.params.means(0, 0) - 0.0) < 0.5);
    CHECK(std::abs(fit.params.means(1, 0) - 4.0) < 0.5);
    CHECK(std::abs(fit.params.means(2, 0) - 9.0) < 0.5);
    CHECK(std::abs(fit.params.cov(0, 0) - 1.0) < 0.3);
    CHECK(std::abs(fit.params.mixing.sum() - 1.0) < 1e-10);

    const Eigen::VectorXi pred = map_classify(fit.posterior);
    CHECK(permuted_misclassification(d.labels, pred, 3) < 0.05);

    // posterior rows are probability vectors
    for (int i = 0; i < fit.posterior.n(); ++i) {
        CHECK(std::abs(fit.posterior.probs.row(i).sum() - 1.0) < 1e-10);
        CHECK(fit.posterior.probs.row(i).minCoeff() >= 0.0);
    }
}

TEST_CASE("log-likelihood trace never decreases beyond slack") {
    Rng rng(105);
    for (int rep = 0; rep < 6; ++rep) {
        Eigen::MatrixXd x = blob_data(300, rng, {0.0, 3.0}, 1.0);
        EmConfig cfg;
        cfg.seed = 900 + rep;
        cfg.n_restarts = 3;
        const GaussianMixtureFit fit = fit_gaussian_em(x, 2, cfg);
        CHECK(fit.min_loglik_step >= -1e-9);
        if (fit.warnings.empty()) {
            for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
                CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-9);
            }
        }
    }
}

TEST_CASE("reported log-likelihood matches a direct recomputation") {
    Rng rng(106);
    Eigen::MatrixXd x = blob_data(400, rng, {0.0, 5.0}, 1.2);
    EmConfig cfg;
    cfg.seed = 19;
    const GaussianMixtureFit fit = fit_gaussian_em(x, 2, cfg);
    const double ll = log_likelihood(fit.params, x);
    CHECK(ll == doctest::Approx(fit.loglik).epsilon(1e-9));

    const Eigen::MatrixXd post = posterior_matrix(fit.params, x);
    CHECK((post - fit.posterior.probs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("categorical fit recovers separated level profiles") {
    Rng rng(107);
    const int n = 1600;
    const std::vector<double> th1 = {0.9, 0.9, 0.1, 0.1};
    const std::vector<double> th2 = {0.1, 0.1, 0.9, 0.9};
    Eigen::MatrixXi lv(n, 4);
    Eigen::VectorXi truth(n);
    for (int i = 0; i < n; ++i) {
        const bool first = rng.next_double() < 0.4;
        truth(i) = first ? 1 : 2;
        for (int d = 0; d < 4; ++d) {
            const double th = first ? th1[d] : th2[d];
            lv(i, d) = rng.next_double() < th ? 1 : 2;
        }
    }
    EmConfig cfg;
    cfg.seed = 23;
    const CategoricalMixtureFit fit = fit_categorical_em(lv, {2, 2, 2, 2}, 2, cfg);
    CHECK(fit.converged);
    CHECK(fit.min_loglik_step >= -1e-9);
    // canonical order: ascending first level probability of the first predictor
    CHECK(fit.params.probs[0][0](0) <= fit.params.probs[1][0](0));
    CHECK(std::abs(fit.params.probs[0][0](0) - 0.1) < 0.08);
    CHECK(std::abs(fit.params.probs[1][0](0) - 0.9) < 0.08);
    CHECK(std::abs(fit.params.mixing(1) - 0.4) < 0.08);

    const Eigen::VectorXi pred = map_classify(fit.posterior);
    CHECK(permuted_misclassification(truth, pred, 2) < 0.08);

    const double ll = log_likelihood(fit.params, lv);
    CHECK(ll == doctest::Approx(fit.loglik).epsilon(1e-9));
}

TEST_CASE("hybrid fit with no continuous block matches the categorical fit") {
    Rng rng(108);
    const int n = 500;
    Eigen::MatrixXi lv(n, 3);
    for (int i = 0; i < n; ++i) {
        const bool first = rng.next_double() < 0.5;
        for (int d = 0; d < 3; ++d) {
            const double th = first ? 0.2 : 0.8;
            lv(i, d) = rng.next_double() < th ? 1 : 2;
        }
    }
    EmConfig cfg;
    cfg.seed = 29;
    const CategoricalMixtureFit ref = fit_categorical_em(lv, {2, 2, 2}, 2, cfg);
    const HybridMixtureFit hyb = fit_hybrid_em(lv, {2, 2, 2}, Eigen::MatrixXd(n, 0), 2, cfg);
    CHECK(hyb.loglik == doctest::Approx(ref.loglik).epsilon(1e-12));
    CHECK((hyb.params.mixing - ref.params.mixing).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k < 2; ++k) {
        for (int d = 0; d < 3; ++d) {
            CHECK((hyb.params.cat_probs[k][d] - ref.params.probs[k][d]).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
    CHECK((hyb.posterior.probs - ref.posterior.probs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hybrid fit recovers a mixed design") {
    Rng rng(109);
    const int n = 1200;
    Eigen::MatrixXi lv(n, 1);
    Eigen::MatrixXd xc(n, 1);
    Eigen::VectorXi truth(n);
    for (int i = 0; i < n; ++i) {
        const bool first = rng.next_double() < 0.45;
        truth(i) = first ? 1 : 2;
        lv(i, 0) = rng.next_double() < (first ? 0.85 : 0.15) ? 1 : 2;
        xc(i, 0) = (first ? 0.0 : 3.0) + rng.next_normal();
    }
    EmConfig cfg;
    cfg.seed = 37;
    const HybridMixtureFit fit = fit_hybrid_em(lv, {2}, xc, 2, cfg);
    CHECK(fit.converged);
    // canonical order for a present continuous block: ascending first mean
    CHECK(fit.params.means(0, 0) < fit.params.means(1, 0));
    CHECK(std::abs(fit.params.means(0, 0) - 0.0) < 0.4);
    CHECK(std::abs(fit.params.means(1, 0) - 3.0) < 0.4);
    CHECK(std::abs(fit.params.cat_probs[0][0](0) - 0.85) < 0.1);
    CHECK(std::abs(fit.params.cat_probs[1][0](0) - 0.15) < 0.1);
    CHECK(std::abs(fit.params.vars(0) - 1.0) < 0.3);
    CHECK(permuted_misclassification(truth, map_classify(fit.posterior), 2) < 0.12);

    const double ll = log_likelihood(fit.params, lv, xc);
    CHECK(ll == doctest::Approx(fit.loglik).epsilon(1e-9));
}

TEST_CASE("constant data cannot support a gaussian fit") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(60, 2);
    EmConfig cfg;
    cfg.n_restarts = 1;
    CHECK_THROWS_AS(fit_gaussian_em(x, 2, cfg), NumericError);
}

TEST_CASE("fit configuration is validated") {
    Rng rng(110);
    Eigen::MatrixXd x = blob_data(40, rng, {0.0, 3.0}, 1.0);
    EmConfig bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(fit_gaussian_em(x, 2, bad), std::invalid_argument);
    bad = EmConfig{};
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(fit_gaussian_em(x, 2, bad), std::invalid_argument);
    bad = EmConfig{};
    bad.n_restarts = 0;
    CHECK_THROWS_AS(fit_gaussian_em(x, 2, bad), std::invalid_argument);
}

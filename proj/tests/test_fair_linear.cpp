#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fairmix/fair_linear.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/oracles.hpp"
#include "fairmix/residualize.hpp"
#include "fairmix/rng.hpp"

using namespace fairmix;

namespace {

struct Instance {
    Eigen::VectorXd y;
    GroupPosterior post;
    Eigen::MatrixXd U;
};

// posterior-looking block plus residualized predictors plus a response that
// loads on both, so the constraint actually binds for small epsilon
Instance make_instance(int n, int K, int p, Rng& rng) {
    Instance inst;
    inst.post.probs.resize(n, K);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            inst.post.probs(i, k) = 0.05 + rng.next_double();
            s += inst.post.probs(i, k);
        }
        inst.post.probs.row(i) /= s;
    }
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.next_normal();
    }
    inst.U = residualize(X, inst.post).residuals;
    inst.y.resize(n);
    for (int i = 0; i < n; ++i) {
        double v = 1.5 * inst.post.probs(i, 0) - 0.7 * inst.post.probs(i, K - 1);
        for (int j = 0; j < p; ++j) v += 0.6 * inst.U(i, j);
        inst.y(i) = v + 0.4 * rng.next_normal();
    }
    return inst;
}

double sse_of(const Instance& inst, const FairLinearFit& fit) {
    const Eigen::VectorXd pred = predict_linear_batch(fit, inst.post, inst.U);
    return (inst.y - pred).squaredNorm();
}

}  // namespace

TEST_CASE("epsilon one is ordinary least squares") {
    Rng rng(401);
    const Instance inst = make_instance(300, 3, 2, rng);
    const FairLinearFit fit = fit_fair_ls(inst.y, inst.post, inst.U, 1.0);

    // reference: unconstrained least squares on the reduced design
    const int n = static_cast<int>(inst.y.size());
    Eigen::MatrixXd D(n, 1 + 2 + 2);
    D.col(0).setOnes();
    D.block(0, 1, n, 2) = inst.post.probs.leftCols(2);
    D.block(0, 3, n, 2) = inst.U;
    const Eigen::VectorXd coef = D.colPivHouseholderQr().solve(inst.y);
    const Eigen::VectorXd ref_pred = D * coef;
    const double ref_sse = (inst.y - ref_pred).squaredNorm();

    CHECK(std::abs(fit.sse - ref_sse) < 1e-8);
    const Eigen::VectorXd pred = predict_linear_batch(fit, inst.post, inst.U);
    CHECK((pred - ref_pred).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fit.multiplier == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("epsilon zero silences the posterior block") {
    Rng rng(402);
    const Instance inst = make_instance(250, 2, 3, rng);
    const FairLinearFit fit = fit_fair_ls(inst.y, inst.post, inst.U, 0.0);
    CHECK(fit.alpha.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(fit.r2_given_A < 1e-12);

    // with alpha pinned at zero the rest is least squares on [1, U]
    const int n = static_cast<int>(inst.y.size());
    Eigen::MatrixXd D(n, 1 + 3);
    D.col(0).setOnes();
    D.block(0, 1, n, 3) = inst.U;
    const Eigen::VectorXd coef = D.colPivHouseholderQr().solve(inst.y);
    CHECK(std::abs(fit.beta0 - coef(0)) < 1e-8);
    CHECK((fit.beta - coef.tail(3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("interior epsilon satisfies the variance-share constraint") {
    Rng rng(403);
    for (int rep = 0; rep < 8; ++rep) {
        const Instance inst = make_instance(220, 3, 2, rng);
        for (double eps : {0.05, 0.3, 0.6}) {
            const FairLinearFit fit = fit_fair_ls(inst.y, inst.post, inst.U, eps);
            const SampleCov sc = sample_covs(inst.post, inst.U);
            const double va = fit.alpha.dot(sc.S_A * fit.alpha);
            const double vb = fit.beta.dot(sc.S_U * fit.beta);
            CHECK((1.0 - eps) * va <= eps * vb + 1e-8 * (1.0 + va + vb));
            // reported share matches its definition
            if (va + vb > 0) {
                CHECK(fit.r2_given_A == doctest::Approx(va / (va + vb)).epsilon(1e-8));
            }
            CHECK(fit.sse == doctest::Approx(sse_of(inst, fit)).epsilon(1e-10));
        }
    }
}

TEST_CASE("fit error is nonincreasing as the constraint relaxes") {
    Rng rng(404);
    for (int rep = 0; rep < 5; ++rep) {
        const Instance inst = make_instance(200, 2, 2, rng);
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : {0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            const double sse = fit_fair_ls(inst.y, inst.post, inst.U, eps).sse;
            CHECK(sse <= prev + 1e-8);
            prev = sse;
        }
    }
}

TEST_CASE("dual multiplier scan reproduces the fit") {
    Rng rng(405);
    for (int rep = 0; rep < 8; ++rep) {
        const Instance inst = make_instance(180, 3, 2, rng);
        const double eps = 0.05 + 0.5 * rng.next_double();
        const FairLinearFit fit = fit_fair_ls(inst.y, inst.post, inst.U, eps);
        const DualScanResult scan = dual_scan_fair_ls(inst.y, inst.post, inst.U, eps, 1500);
        CHECK(std::abs(fit.sse - scan.sse) < 1e-6 * (1.0 + fit.sse));
    }
}

TEST_CASE("single prediction agrees with the batch path") {
    Rng rng(406);
    const Instance inst = make_instance(60, 2, 2, rng);
    const FairLinearFit fit = fit_fair_ls(inst.y, inst.post, inst.U, 0.5);
    const Eigen::VectorXd batch = predict_linear_batch(fit, inst.post, inst.U);
    for (int i = 0; i < 5; ++i) {
        const double one =
            predict_linear(fit, inst.post.probs.row(i).transpose(), inst.U.row(i).transpose());
        CHECK(one == doctest::Approx(batch(i)).epsilon(1e-13));
    }
}

TEST_CASE("epsilon outside the unit interval is rejected") {
    Rng rng(407);
    const Instance inst = make_instance(50, 2, 1, rng);
    CHECK_THROWS(fit_fair_ls(inst.y, inst.post, inst.U, -0.1));
    CHECK_THROWS(fit_fair_ls(inst.y, inst.post, inst.U, 1.1));
}

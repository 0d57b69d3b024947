#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fairmix/errors.hpp"
#include "fairmix/metrics.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/rng.hpp"

using namespace fairmix;

namespace {

Eigen::VectorXi ivec(std::initializer_list<int> v) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int x : v) out(i++) = x;
    return out;
}

Eigen::VectorXd dvec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("equalized-odds gap on a hand-checked table") {
    // group 1: tpr 1, fpr 0; group 2: tpr 1/2, fpr 1/4
    const Eigen::VectorXi y = ivec({1, 1, 0, 0, 1, 1, 0, 0, 0, 0});
    const Eigen::VectorXi pred = ivec({1, 1, 0, 0, 1, 0, 1, 0, 0, 0});
    const Eigen::VectorXi grp = ivec({1, 1, 1, 1, 2, 2, 2, 2, 2, 2});
    CHECK(delta_eo(pred, y, grp) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("equalized-odds gap falls back to the comparable rate") {
    // group 2 has no positives, so only the fpr gap is defined: |0 - 1/3|
    const Eigen::VectorXi y = ivec({1, 1, 0, 0, 0, 0});
    const Eigen::VectorXi pred = ivec({1, 1, 0, 1, 0, 0});
    const Eigen::VectorXi grp = ivec({1, 1, 1, 2, 2, 2});
    std::vector<std::string> w;
    CHECK(delta_eo(pred, y, grp, &w) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(!w.empty());
}

TEST_CASE("demographic-parity gap on a hand-checked table") {
    // positive rates 3/4 and 1/4
    const Eigen::VectorXi pred = ivec({1, 1, 1, 0, 1, 0, 0, 0});
    const Eigen::VectorXi grp = ivec({1, 1, 1, 1, 2, 2, 2, 2});
    CHECK(delta_dp(pred, grp) == doctest::Approx(0.5).epsilon(1e-14));
    // three groups: the metric takes the widest pair
    const Eigen::VectorXi pred3 = ivec({1, 0, 1, 1, 0, 0});
    const Eigen::VectorXi grp3 = ivec({1, 1, 2, 2, 3, 3});
    CHECK(delta_dp(pred3, grp3) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fairness gaps need two groups and binary inputs") {
    const Eigen::VectorXi ones = ivec({1, 1, 1});
    CHECK_THROWS_AS(delta_dp(ones, ivec({1, 1, 1})), UndefinedMetricError);
    CHECK_THROWS_AS(delta_eo(ones, ones, ivec({2, 2, 2})), UndefinedMetricError);
    CHECK_THROWS(delta_dp(ivec({0, 2, 1}), ivec({1, 2, 1})));
}

TEST_CASE("rank statistic matches explicit pair counting") {
    Rng rng(601);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 40;
        Eigen::VectorXd scores(n);
        Eigen::VectorXi labels(n);
        for (int i = 0; i < n; ++i) {
            // coarse grid forces plenty of ties
            scores(i) = std::round(4.0 * rng.next_double()) / 4.0;
            labels(i) = rng.next_double() < 0.4 ? 1 : 0;
        }
        if (labels.sum() == 0 || labels.sum() == n) labels(0) = 1 - labels(0);

        double wins = 0.0;
        long np = 0, nn = 0;
        for (int i = 0; i < n; ++i) {
            if (labels(i) != 1) continue;
            ++np;
            for (int j = 0; j < n; ++j) {
                if (labels(j) != 0) continue;
                if (scores(i) > scores(j)) wins += 1.0;
                else if (scores(i) == scores(j)) wins += 0.5;
            }
        }
        nn = n - np;
        CHECK(auc(scores, labels) ==
              doctest::Approx(wins / (static_cast<double>(np) * nn)).epsilon(1e-12));
    }
}

TEST_CASE("rank statistic endpoints") {
    CHECK(auc(dvec({0.9, 0.8, 0.2, 0.1}), ivec({1, 1, 0, 0})) == doctest::Approx(1.0));
    CHECK(auc(dvec({0.1, 0.2, 0.8, 0.9}), ivec({1, 1, 0, 0})) == doctest::Approx(0.0));
    CHECK(auc(dvec({0.5, 0.5, 0.5, 0.5}), ivec({1, 1, 0, 0})) == doctest::Approx(0.5));
    CHECK_THROWS_AS(auc(dvec({0.5, 0.5}), ivec({1, 1})), UndefinedMetricError);
}

TEST_CASE("group mean gap matches a direct reimplementation") {
    Rng rng(602);
    const int n = 200, K = 3;
    GroupPosterior post;
    post.probs.resize(n, K);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            post.probs(i, k) = 0.05 + rng.next_double();
            s += post.probs(i, k);
        }
        post.probs.row(i) /= s;
        y(i) = rng.next_normal() + post.probs(i, 0);
    }

    // every row contributes its mode-confidence margin to its modal group
    std::vector<double> wsum(K, 0.0), wy(K, 0.0);
    for (int i = 0; i < n; ++i) {
        int mode = 0;
        const double top = post.probs.row(i).maxCoeff(&mode);
        const double w = top - 1.0 / K;
        wsum[mode] += w;
        wy[mode] += w * y(i);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < K; ++k) {
        if (wsum[k] < 1e-12) continue;
        const double m = wy[k] / wsum[k];
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    CHECK(mean_distance(post, y) == doctest::Approx(hi - lo).epsilon(1e-12));
}

TEST_CASE("degenerate group weights are excluded or rejected") {
    // all rows share one modal group
    GroupPosterior post;
    post.probs.resize(4, 2);
    post.probs << 0.9, 0.1, 0.8, 0.2, 0.95, 0.05, 0.7, 0.3;
    CHECK_THROWS_AS(mean_distance(post, dvec({1.0, 2.0, 3.0, 4.0})), UndefinedMetricError);
}

TEST_CASE("classifier summary bundles all metrics coherently") {
    Rng rng(603);
    const int n = 300;
    GroupPosterior post;
    post.probs.resize(n, 2);
    Eigen::VectorXd scores(n);
    Eigen::VectorXi y(n);
    for (int i = 0; i < n; ++i) {
        const double a = rng.next_double();
        post.probs(i, 0) = a;
        post.probs(i, 1) = 1.0 - a;
        scores(i) = 0.2 + 0.6 * rng.next_double();
        y(i) = rng.next_double() < scores(i) ? 1 : 0;
    }
    const MetricsReport rep = classification_report(scores, y, post);

    Eigen::VectorXi cls(n), grp(n);
    for (int i = 0; i < n; ++i) {
        cls(i) = scores(i) >= 0.5 ? 1 : 0;
        grp(i) = post.probs(i, 0) >= post.probs(i, 1) ? 1 : 2;
    }
    const double acc = (cls.array() == y.array()).cast<double>().mean();
    CHECK(rep.acc == doctest::Approx(acc).epsilon(1e-14));
    CHECK(rep.delta_eo == doctest::Approx(delta_eo(cls, y, grp)).epsilon(1e-12));
    CHECK(rep.delta_dp == doctest::Approx(delta_dp(cls, grp)).epsilon(1e-12));
    CHECK(rep.auc == doctest::Approx(auc(scores, y)).epsilon(1e-12));
    CHECK(rep.md ==
          doctest::Approx(mean_distance(post, cls.cast<double>())).epsilon(1e-12));
}

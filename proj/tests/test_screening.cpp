#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fairmix/rng.hpp"
#include "fairmix/screening.hpp"

using namespace fairmix;

namespace {

// columns 0-1 carry a separated two-group structure driving y, the rest is noise
struct Bench {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd eta;
};

Bench make_bench(int n, Rng& rng) {
    Bench b;
    b.X.resize(n, 6);
    b.y.resize(n);
    b.eta.resize(n);
    for (int i = 0; i < n; ++i) {
        const bool g = rng.next_double() < 0.5;
        b.X(i, 0) = (g ? 3.5 : 0.0) + rng.next_normal();
        b.X(i, 1) = (g ? -2.0 : 1.0) + rng.next_normal();
        for (int j = 2; j < 6; ++j) b.X(i, j) = rng.next_normal();
        b.eta(i) = (g ? 1.5 : -1.5) + 0.3 * rng.next_normal();
        b.y(i) = b.eta(i) + 0.5 * rng.next_normal();
    }
    return b;
}

}  // namespace

TEST_CASE("screening prefers the informative block for regression") {
    Rng rng(801);
    const Bench b = make_bench(600, rng);
    const std::vector<std::vector<int>> cands = {{0, 1}, {2, 3}, {4, 5}};
    ScreenConfig cfg;
    cfg.seed = 4;
    const auto res = screen_predictors(b.X, b.y, cands, TradeoffTask::regression, 2, cfg);
    REQUIRE(res.size() == 3);

    int chosen = -1, n_chosen = 0;
    for (const auto& r : res) {
        if (r.chosen) {
            chosen = r.candidate_id;
            ++n_chosen;
        }
        CHECK_FALSE(r.failed);
    }
    CHECK(n_chosen == 1);
    CHECK(chosen == 0);
    // the winning criterion dominates the noise blocks
    double best = -1.0, rest = -1.0;
    for (const auto& r : res) {
        if (r.candidate_id == 0) best = r.criterion;
        else rest = std::max(rest, r.criterion);
    }
    CHECK(best > rest);
}

TEST_CASE("screening handles a classification response") {
    Rng rng(802);
    Bench b = make_bench(600, rng);
    for (int i = 0; i < 600; ++i) {
        b.y(i) = rng.next_double() < 1.0 / (1.0 + std::exp(-b.eta(i))) ? 1.0 : 0.0;
    }
    const std::vector<std::vector<int>> cands = {{0, 1}, {2, 3}};
    ScreenConfig cfg;
    cfg.seed = 6;
    const auto res = screen_predictors(b.X, b.y, cands, TradeoffTask::classification, 2, cfg);
    REQUIRE(res.size() == 2);
    int n_chosen = 0;
    for (const auto& r : res) {
        n_chosen += r.chosen;
        if (!r.failed) {
            CHECK(std::isfinite(r.error_rate));
            CHECK(r.error_rate >= 0.0);
            CHECK(r.error_rate <= 1.0);
        }
    }
    CHECK(n_chosen == 1);
    // every fit sees the residualized predictors, so the error rates are
    // close; the true block stands out through the group criterion instead
    CHECK(res[0].error_rate < 0.35);
    CHECK(res[1].error_rate < 0.35);
    CHECK(res[0].criterion > res[1].criterion + 0.5);
}

TEST_CASE("screening validates its inputs") {
    Rng rng(803);
    const Bench b = make_bench(80, rng);
    CHECK_THROWS(screen_predictors(b.X, b.y, {}, TradeoffTask::regression, 2, {}));
    CHECK_THROWS(screen_predictors(b.X, b.y, {{0, 99}}, TradeoffTask::regression, 2, {}));
}

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "fairmix/fair_linear.hpp"
#include "fairmix/fair_logistic.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/residualize.hpp"
#include "fairmix/scenarios.hpp"
#include "fairmix/theory.hpp"

namespace {

fairmix::Scenario gaussian_scn(Eigen::Index n) {
    fairmix::Scenario s;
    s.name = "gaussian-uni";
    s.params["mu_min"] = 4.0;
    s.n = n;
    s.seed = 11;
    return s;
}

void bm_gaussian_em(benchmark::State& state) {
    const auto d = fairmix::gen_gaussian_uni(gaussian_scn(state.range(0)));
    Eigen::MatrixXd x = d.x;
    fairmix::EmConfig cfg;
    cfg.seed = 7;
    cfg.n_restarts = 3;
    for (auto _ : state) {
        auto fit = fairmix::fit_gaussian_em(x, 3, cfg);
        benchmark::DoNotOptimize(fit.loglik);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_gaussian_em)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void bm_categorical_em(benchmark::State& state) {
    fairmix::Scenario s;
    s.name = "categorical";
    s.params["p"] = 0.3;
    s.params["config"] = 1;
    s.n = state.range(0);
    s.seed = 12;
    const auto d = fairmix::gen_categorical(s);
    fairmix::EmConfig cfg;
    cfg.seed = 7;
    cfg.n_restarts = 3;
    for (auto _ : state) {
        auto fit = fairmix::fit_categorical_em(d.levels, d.arities, 2, cfg);
        benchmark::DoNotOptimize(fit.loglik);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_categorical_em)->Arg(2000)->Unit(benchmark::kMillisecond);

struct LsData {
    Eigen::VectorXd y;
    fairmix::GroupPosterior post;
    Eigen::MatrixXd U;
};

LsData ls_data(Eigen::Index n) {
    fairmix::Scenario s;
    s.name = "ls";
    s.params["mu"] = 2.0;
    s.n = n;
    s.seed = 13;
    const auto d = fairmix::gen_ls_scenario(s);
    fairmix::EmConfig cfg;
    cfg.seed = 5;
    cfg.n_restarts = 2;
    const auto mix = fairmix::fit_gaussian_em(d.Z.col(0), 2, cfg);
    Eigen::MatrixXd X(n, 4);
    X << d.Z.col(0), d.Z.col(1), d.Z.col(4), d.Z.col(5);
    const auto rd = fairmix::residualize(X, mix.posterior);
    return {d.y, mix.posterior, rd.residuals};
}

void bm_fair_ls(benchmark::State& state) {
    const LsData d = ls_data(state.range(0));
    for (auto _ : state) {
        auto fit = fairmix::fit_fair_ls(d.y, d.post, d.U, 0.3);
        benchmark::DoNotOptimize(fit.sse);
    }
}
BENCHMARK(bm_fair_ls)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);

void bm_fair_logistic(benchmark::State& state) {
    fairmix::Scenario s;
    s.name = "logistic";
    s.params["mu"] = 6.0;
    s.n = 500;
    s.seed = 14;
    const auto d = fairmix::gen_logistic_scenario(s);
    fairmix::EmConfig cfg;
    cfg.seed = 5;
    cfg.n_restarts = 2;
    const auto mix = fairmix::fit_gaussian_em(d.Z.col(0), 2, cfg);
    Eigen::MatrixXd X(s.n, 5);
    X << d.Z.col(0), d.Z.col(1), d.Z.col(4), d.Z.col(5), d.Z.col(6);
    const auto rd = fairmix::residualize(X, mix.posterior);
    for (auto _ : state) {
        auto fit = fairmix::fit_fair_logistic(d.y, mix.posterior, rd.residuals,
                                              state.range(0) / 10.0);
        benchmark::DoNotOptimize(fit.objective);
    }
}
BENCHMARK(bm_fair_logistic)->Arg(0)->Arg(30)->Unit(benchmark::kMillisecond);

void bm_separation_threshold(benchmark::State& state) {
    Eigen::VectorXd mix(3);
    mix << 0.2, 0.3, 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fairmix::separation_threshold(mix, 0.05));
    }
}
BENCHMARK(bm_separation_threshold);

void bm_categorical_accuracy(benchmark::State& state) {
    fairmix::CategoricalMixtureParams p;
    p.mixing = Eigen::Vector2d(0.4, 0.6);
    p.probs.resize(2);
    for (int k = 0; k < 2; ++k) {
        p.probs[k].resize(6);
        for (int d = 0; d < 6; ++d) {
            Eigen::VectorXd levels(3);
            levels << 0.2 + 0.1 * k, 0.5 - 0.05 * d * k, 0.3 - 0.1 * k + 0.05 * d * k;
            p.probs[k][d] = levels / levels.sum();
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fairmix::categorical_accuracy(p));
    }
}
BENCHMARK(bm_categorical_accuracy)->Unit(benchmark::kMicrosecond);

void bm_residualize(benchmark::State& state) {
    const LsData d = ls_data(2000);
    Eigen::MatrixXd X(2000, 4);
    X.setRandom();
    for (auto _ : state) {
        auto rd = fairmix::residualize(X, d.post);
        benchmark::DoNotOptimize(rd.residuals(0, 0));
    }
}
BENCHMARK(bm_residualize)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

#include "fairmix/screening.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairmix/errors.hpp"
#include "fairmix/fair_linear.hpp"
#include "fairmix/metrics.hpp"
#include "fairmix/residualize.hpp"
#include "fairmix/rng.hpp"

namespace fairmix {

namespace {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::ArrayXd ac = a.array() - a.mean();
    const Eigen::ArrayXd bc = b.array() - b.mean();
    const double denom = std::sqrt(ac.square().sum() * bc.square().sum());
    return denom > 0.0 ? (ac * bc).sum() / denom : 0.0;
}

}  // namespace

std::vector<ScreeningResult> screen_predictors(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                               const std::vector<std::vector<int>>& candidates,
                                               TradeoffTask task, int K, const ScreenConfig& cfg) {
    const auto n = X.rows();
    if (y.size() != n) throw std::invalid_argument("screen_predictors: row counts differ");
    if (candidates.empty()) throw std::invalid_argument("screen_predictors: no candidates");
    for (const auto& cand : candidates) {
        if (cand.empty()) throw std::invalid_argument("screen_predictors: empty candidate set");
        for (int c : cand) {
            if (c < 0 || c >= X.cols()) {
                throw std::invalid_argument("screen_predictors: candidate column out of range");
            }
        }
    }

    const bool maximize = task == TradeoffTask::regression ? true : cfg.maximize_criterion;
    const double worst =
        maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();

    Rng root(cfg.seed);
    std::vector<ScreeningResult> results;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        ScreeningResult res;
        res.candidate_id = static_cast<int>(j);
        res.columns = candidates[j];
        try {
            Eigen::MatrixXd block(n, static_cast<Eigen::Index>(candidates[j].size()));
            for (std::size_t c = 0; c < candidates[j].size(); ++c) {
                block.col(static_cast<Eigen::Index>(c)) = X.col(candidates[j][c]);
            }
            EmConfig em = cfg.em;
            em.seed = root.split(static_cast<std::uint64_t>(j)).next_u64();
            const auto mix = fit_gaussian_em(block, K, em);

            const ResidualizedDesign rd = residualize(X, mix.posterior);
            if (task == TradeoffTask::regression) {
                const FairLinearFit fit = fit_fair_ls(y, mix.posterior, rd.residuals, cfg.epsilon);
                const Eigen::VectorXd pred = predict_linear_batch(fit, mix.posterior, rd.residuals);
                res.criterion = pearson(pred, y);
            } else {
                const FairLogisticFit fit =
                    fit_fair_logistic(y, mix.posterior, rd.residuals, cfg.lambda, cfg.delta, cfg.opt);
                const Eigen::VectorXd pi = predict_logistic_batch(fit, mix.posterior, rd.residuals);
                Eigen::VectorXd cls(n);
                for (Eigen::Index i = 0; i < n; ++i) cls(i) = pi(i) >= 0.5 ? 1.0 : 0.0;
                res.error_rate = (cls.array() != y.array()).cast<double>().mean();
                res.criterion = mean_distance(mix.posterior, cls, &res.warnings);
            }
            if (!std::isfinite(res.criterion)) {
                throw NumericError("screen_predictors: criterion not finite");
            }
        } catch (const std::exception& e) {
            res.failed = true;
            res.criterion = worst;
            res.warnings.push_back(std::string("candidate failed: ") + e.what());
        }
        results.push_back(std::move(res));
    }

    // optional error floor before ranking on the fairness criterion
    std::vector<bool> eligible(results.size(), true);
    if (task == TradeoffTask::classification && cfg.use_accuracy_floor) {
        double best_err = std::numeric_limits<double>::infinity();
        for (const auto& r : results) {
            if (!r.failed && r.error_rate < best_err) best_err = r.error_rate;
        }
        for (std::size_t j = 0; j < results.size(); ++j) {
            if (!results[j].failed && results[j].error_rate > best_err + cfg.accuracy_floor_tau) {
                eligible[j] = false;
                results[j].warnings.push_back("rejected by accuracy floor");
            }
        }
    }

    std::size_t pick = 0;
    bool found = false;
    for (std::size_t j = 0; j < results.size(); ++j) {
        if (results[j].failed || !eligible[j]) continue;
        if (!found || (maximize ? results[j].criterion > results[pick].criterion
                                : results[j].criterion < results[pick].criterion)) {
            pick = j;
            found = true;
        }
    }
    results[pick].chosen = true;  // all-failed degenerate case keeps the first
    if (!found) {
        results[pick].warnings.push_back("every candidate failed; kept the first by convention");
    }
    return results;
}

}  // namespace fairmix

#include "fairmix/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairmix/errors.hpp"
#include "fairmix/metrics.hpp"

namespace fairmix {

TradeoffCurve tradeoff_curve(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                             const Eigen::MatrixXd& U, const std::vector<double>& grid,
                             TradeoffTask task, double delta, const OptimizerConfig& opt) {
    if (grid.empty()) throw std::invalid_argument("tradeoff_curve: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("tradeoff_curve: grid must be sorted ascending");
    }

    TradeoffCurve curve;
    curve.task = task;
    const auto n = y.size();
    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();

    for (const double tune : grid) {
        TradeoffPoint pt;
        pt.tuning = tune;
        try {
            if (task == TradeoffTask::regression) {
                const FairLinearFit fit = fit_fair_ls(y, A_hat, U, tune);
                pt.sse = fit.sse;
                pt.accuracy = sst > 0.0 ? fit.sse / sst : 0.0;
                pt.r2_given_A = fit.r2_given_A;
                pt.fairness = fit.r2_given_A;
                pt.converged = true;
                pt.warnings = fit.warnings;
                const Eigen::VectorXd pred = predict_linear_batch(fit, A_hat, U);
                try {
                    pt.md = mean_distance(A_hat, pred, &pt.warnings);
                } catch (const UndefinedMetricError& e) {
                    pt.warnings.push_back(e.what());
                }
            } else {
                const FairLogisticFit fit = fit_fair_logistic(y, A_hat, U, tune, delta, opt);
                const Eigen::VectorXd pi = predict_logistic_batch(fit, A_hat, U);
                Eigen::VectorXd cls(n);
                for (Eigen::Index i = 0; i < n; ++i) cls(i) = pi(i) >= 0.5 ? 1.0 : 0.0;
                pt.accuracy = (cls.array() != y.array()).cast<double>().mean();
                pt.penalty_value = fit.penalty_value;
                pt.converged = fit.converged;
                pt.n_iter = fit.n_iter;
                pt.warnings = fit.warnings;
                try {
                    pt.md = mean_distance(A_hat, cls, &pt.warnings);
                    pt.fairness = pt.md;
                } catch (const UndefinedMetricError& e) {
                    pt.warnings.push_back(e.what());
                }
            }
        } catch (const std::exception& e) {
            pt.failed = true;
            pt.error = e.what();
        }
        curve.points.push_back(std::move(pt));
    }

    // exact minimizers keep the penalty nonincreasing along the lambda grid
    if (task == TradeoffTask::classification) {
        const TradeoffPoint* prev = nullptr;
        for (const TradeoffPoint& pt : curve.points) {
            if (pt.failed || !pt.converged) continue;
            if (prev && pt.penalty_value > prev->penalty_value + 1e-6) {
                curve.warnings.push_back("penalty value increased between lambda=" +
                                         std::to_string(prev->tuning) + " and lambda=" +
                                         std::to_string(pt.tuning));
            }
            prev = &pt;
        }
    }
    return curve;
}

}  // namespace fairmix

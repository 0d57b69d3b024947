#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "fairmix/fair_linear.hpp"
#include "fairmix/fair_logistic.hpp"
#include "fairmix/mixture.hpp"

namespace fairmix {

enum class TradeoffTask { regression, classification };

// one grid evaluation; inapplicable fields stay NaN
struct TradeoffPoint {
    double tuning = 0.0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();  // sse/sst or error rate
    double fairness = std::numeric_limits<double>::quiet_NaN();  // r2_given_A or md
    double sse = std::numeric_limits<double>::quiet_NaN();
    double r2_given_A = std::numeric_limits<double>::quiet_NaN();
    double penalty_value = std::numeric_limits<double>::quiet_NaN();
    double md = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    int n_iter = 0;
    bool failed = false;
    std::string error;
    std::vector<std::string> warnings;
};

struct TradeoffCurve {
    TradeoffTask task = TradeoffTask::regression;
    std::vector<TradeoffPoint> points;
    std::vector<std::string> warnings;
};

TradeoffCurve tradeoff_curve(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                             const Eigen::MatrixXd& U, const std::vector<double>& grid,
                             TradeoffTask task, double delta = 1e-8,
                             const OptimizerConfig& opt = OptimizerConfig{});

}  // namespace fairmix

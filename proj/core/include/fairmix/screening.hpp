#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fairmix/fair_logistic.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/tradeoff.hpp"

namespace fairmix {

struct ScreenConfig {
    double epsilon = 1.0;  // downstream regression constraint level
    double lambda = 0.0;   // downstream classification penalty weight
    double delta = 1e-8;
    bool maximize_criterion = false;  // classification only; regression always maximizes
    bool use_accuracy_floor = false;  // drop candidates whose error exceeds best + tau
    double accuracy_floor_tau = 0.05;
    std::uint64_t seed = 0;
    EmConfig em;
    OptimizerConfig opt;
};

struct ScreeningResult {
    int candidate_id = 0;             // position in the candidates list
    std::vector<int> columns;         // column indices of this candidate
    double criterion = 0.0;           // cor(y_hat, y) or md
    double error_rate = std::numeric_limits<double>::quiet_NaN();  // classification only
    bool chosen = false;
    bool failed = false;
    std::vector<std::string> warnings;
};

// fits a mixture per candidate block and scores the downstream fair model;
// exactly one result comes back chosen
std::vector<ScreeningResult> screen_predictors(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                               const std::vector<std::vector<int>>& candidates,
                                               TradeoffTask task, int K,
                                               const ScreenConfig& cfg = ScreenConfig{});

}  // namespace fairmix

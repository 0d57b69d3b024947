#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fairmix/mixture.hpp"

namespace fairmix {

struct MetricsReport {
    double acc = 0.0;
    double delta_eo = 0.0;
    double delta_dp = 0.0;
    double md = 0.0;
    double auc = 0.0;
    std::vector<std::string> warnings;
};

// max pairwise gap of posterior-weighted group means; weights max_k a_ik - 1/K
double mean_distance(const GroupPosterior& A_hat, const Eigen::VectorXd& y,
                     std::vector<std::string>* warnings = nullptr);

// max over group pairs of max(|tpr gap|, |fpr gap|)
double delta_eo(const Eigen::VectorXi& y_pred, const Eigen::VectorXi& y,
                const Eigen::VectorXi& groups, std::vector<std::string>* warnings = nullptr);

// max pairwise positive-rate gap
double delta_dp(const Eigen::VectorXi& y_pred, const Eigen::VectorXi& groups,
                std::vector<std::string>* warnings = nullptr);

// Mann-Whitney statistic, ties by midrank
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels);

// bundles the metrics for a classifier scored on one evaluation split;
// predicted class = score >= 0.5, groups = posterior mode, md on classes
MetricsReport classification_report(const Eigen::VectorXd& scores, const Eigen::VectorXi& y,
                                    const GroupPosterior& A_hat);

}  // namespace fairmix

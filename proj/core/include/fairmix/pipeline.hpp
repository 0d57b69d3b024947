#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fairmix/dataset.hpp"
#include "fairmix/fair_logistic.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/residualize.hpp"

namespace fairmix {

struct PipelineConfig {
    int K = 2;
    std::string task = "auto";  // "auto" resolves to classification iff y is 0/1
    double epsilon = 1.0;
    std::vector<double> lambda_grid = {0.0};  // one report per grid value
    double delta = 1e-8;
    EmConfig em;
    OptimizerConfig opt;
    std::string out_dir = ".";
    std::string prefix = "report";
};

struct PipelineArtifact {
    double tuning = 0.0;
    std::string report_path;
    std::string predictions_path;
    std::string report_json;
    bool converged = true;
};

struct PipelineResult {
    std::string task;    // resolved task
    std::string family;  // mixture family chosen from the column roles
    std::vector<PipelineArtifact> artifacts;
    std::vector<std::string> warnings;
    bool all_converged = true;
};

// Shared front half of every schema-driven run: loaded splits, mixture
// posteriors on both, and the training residualization applied to both.
struct PreparedDesign {
    DesignPartition part;
    std::string task;
    std::string family;
    GroupPosterior post_train;
    GroupPosterior post_test;
    ResidualizedDesign rd;   // of the training predictor block
    Eigen::MatrixXd U_test;  // training decomposition applied to held-out rows
    bool mixture_converged = true;
    std::vector<std::string> warnings;
};

PreparedDesign prepare_design(const DatasetSchema& schema, const PipelineConfig& cfg);

// End-to-end run: load and split the file, fit the mixture on the
// sensitive-related block, residualize the predictors, fit the constrained
// model per tuning value, score the held-out split, write report JSON and
// prediction CSV files. Errors carry the failing stage in their message.
PipelineResult run_pipeline(const DatasetSchema& schema, const PipelineConfig& cfg);

}  // namespace fairmix

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fairmix {

// One simulation configuration: a named design plus numeric overrides.
// Generators validate the override keys against the named design's schema.
struct Scenario {
    std::string name;
    std::map<std::string, double> params;
    Eigen::Index n = 0;
    std::uint64_t seed = 0;
};

struct GaussianUniDraw {
    Eigen::VectorXi labels;  // component labels, 1-based
    Eigen::VectorXd x;
};

struct CategoricalDraw {
    Eigen::VectorXi labels;  // 1-based
    Eigen::MatrixXi levels;  // 1-based category codes
    std::vector<int> arities;
};

struct R2Draw {
    Eigen::VectorXi group;  // 0/1 sensitive indicator
    Eigen::VectorXd xa;
    Eigen::MatrixXd xz;
    Eigen::VectorXd y;
};

struct PredictorsDraw {
    Eigen::VectorXi group;  // 0/1 sensitive indicator
    Eigen::MatrixXd Z;
    Eigen::VectorXd y;  // continuous or 0/1 depending on the design
};

struct CatClassifyDraw {
    Eigen::VectorXi labels;  // 1-based
    Eigen::MatrixXi levels;  // 1-based
    std::vector<int> arities;
    Eigen::VectorXd y;  // 0/1
};

GaussianUniDraw gen_gaussian_uni(const Scenario& scn);
CategoricalDraw gen_categorical(const Scenario& scn);
R2Draw gen_r2_scenario(const Scenario& scn);
PredictorsDraw gen_ls_scenario(const Scenario& scn);
PredictorsDraw gen_logistic_scenario(const Scenario& scn);
CatClassifyDraw gen_cat_classify_scenario(const Scenario& scn);

struct ScenarioRow {
    double tuning = 0.0;
    double accuracy = 0.0;
    double fairness = 0.0;
    double accuracy_se = 0.0;
    double fairness_se = 0.0;
};

struct ScenarioTable {
    std::vector<ScenarioRow> rows;
    std::string csv;       // rendered with stable 17-digit formatting
    std::string manifest;  // JSON describing the run and column semantics
};

// Sweeps the scenario's tuning axis: generate, fit, residualize, fair fit,
// score. Same (scenario, grid) always renders the same bytes.
ScenarioTable run_scenario(const Scenario& scn, const std::vector<double>& grid);

// smallest label-permutation mismatch rate between two 1-based labelings
double permuted_misclassification(const Eigen::VectorXi& truth, const Eigen::VectorXi& pred, int K);

}  // namespace fairmix

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fairmix {

// Column roles for one CSV file. Roles must cover the header exactly: every
// column appears in exactly one of response / sensitive_continuous /
// sensitive_categorical / other.
struct DatasetSchema {
    std::string path;
    std::string response;
    std::vector<std::string> sensitive_continuous;
    std::vector<std::string> sensitive_categorical;
    std::vector<std::string> other;
    // per categorical column: raw level -> merged level, applied before coding
    std::map<std::string, std::map<std::string, std::string>> merge_levels;
    double split = 0.7;  // train fraction, must lie strictly inside (0,1)
    std::uint64_t seed = 0;
};

DatasetSchema schema_from_json(const std::string& json_text);
std::string schema_to_json(const DatasetSchema& schema);

struct SplitData {
    Eigen::VectorXd y;
    Eigen::MatrixXd xa_cont;  // sensitive-related continuous block
    Eigen::MatrixXi xa_cat;   // sensitive-related categorical block, 1-based codes
    Eigen::MatrixXd other;    // remaining predictors
};

struct DesignPartition {
    SplitData train;
    SplitData test;
    // per categorical column: sorted train levels; code = position + 1, and
    // one extra reserved code (= arity) absorbs unseen test levels
    std::vector<std::vector<std::string>> level_names;
    std::vector<int> arities;
    std::vector<std::pair<long, std::string>> rejected;  // 1-based data row, reason
    std::vector<std::string> warnings;
};

// Parses, label-encodes, rejects rows with unusable cells, then splits
// deterministically by the schema seed.
DesignPartition load_csv(const DatasetSchema& schema);

}  // namespace fairmix

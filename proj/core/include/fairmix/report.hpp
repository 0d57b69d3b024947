#pragma once

#include <string>
#include <vector>

#include "fairmix/fair_linear.hpp"
#include "fairmix/fair_logistic.hpp"
#include "fairmix/metrics.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/tradeoff.hpp"

namespace fairmix {

// Model reports rendered as JSON documents with a fixed shape; the shapes are
// published as JSON schema files shipped with the project.
std::string regression_report_json(const FairLinearFit& fit, const MetricsReport& test_metrics,
                                   const std::vector<std::string>& warnings);
std::string classification_report_json(const FairLogisticFit& fit, const MetricsReport& test_metrics,
                                       const std::vector<std::string>& warnings);
std::string mixture_report_json(const GaussianMixtureFit& fit);
std::string mixture_report_json(const CategoricalMixtureFit& fit);
std::string mixture_report_json(const HybridMixtureFit& fit);
std::string tradeoff_report_json(const TradeoffCurve& curve);

// Small structural validator covering the subset of JSON schema the published
// files use: type, properties, required, items, enum, additionalProperties.
bool matches_schema(const std::string& document_json, const std::string& schema_json,
                    std::string* error);

}  // namespace fairmix

#include "fairmix/report.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairmix {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vec_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

ordered_json mat_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
    return rows;
}

// JSON has no NaN; undefined diagnostics are rendered as null
ordered_json num_or_null(double v) {
    if (std::isfinite(v)) return ordered_json(v);
    return ordered_json(nullptr);
}

ordered_json metrics_json(const MetricsReport& m) {
    ordered_json j;
    j["acc"] = num_or_null(m.acc);
    j["delta_eo"] = num_or_null(m.delta_eo);
    j["delta_dp"] = num_or_null(m.delta_dp);
    j["md"] = num_or_null(m.md);
    j["auc"] = num_or_null(m.auc);
    return j;
}

ordered_json merge_warnings(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : a) arr.push_back(w);
    for (const auto& w : b) arr.push_back(w);
    return arr;
}

}  // namespace

std::string regression_report_json(const FairLinearFit& fit, const MetricsReport& test_metrics,
                                   const std::vector<std::string>& warnings) {
    ordered_json j;
    j["task"] = "regression";
    j["tuning"] = {{"epsilon", fit.epsilon}};
    j["coefficients"] = {{"intercept", fit.beta0},
                         {"posterior_block", vec_json(fit.alpha)},
                         {"predictor_block", vec_json(fit.beta)}};
    j["diagnostics"] = {{"sse", num_or_null(fit.sse)},
                        {"r2_given_A", num_or_null(fit.r2_given_A)},
                        {"multiplier", num_or_null(fit.multiplier)},
                        {"test", metrics_json(test_metrics)}};
    j["converged"] = true;
    j["n_iter"] = 0;
    j["warnings"] = merge_warnings(fit.warnings, warnings);
    return j.dump(2);
}

std::string classification_report_json(const FairLogisticFit& fit, const MetricsReport& test_metrics,
                                       const std::vector<std::string>& warnings) {
    ordered_json j;
    j["task"] = "classification";
    j["tuning"] = {{"lambda", fit.lambda}, {"delta", fit.delta}};
    j["coefficients"] = {{"intercept", fit.beta0},
                         {"posterior_block", vec_json(fit.alpha)},
                         {"predictor_block", vec_json(fit.beta)}};
    j["diagnostics"] = {{"objective", num_or_null(fit.objective)},
                        {"penalty_value", num_or_null(fit.penalty_value)},
                        {"grad_norm", num_or_null(fit.grad_norm)},
                        {"test", metrics_json(test_metrics)}};
    j["converged"] = fit.converged;
    j["n_iter"] = fit.n_iter;
    j["warnings"] = merge_warnings(fit.warnings, warnings);
    return j.dump(2);
}

namespace {

template <class Fit>
ordered_json mixture_common(const Fit& fit, const char* family) {
    ordered_json j;
    j["task"] = "mixture";
    j["family"] = family;
    j["mixing"] = vec_json(fit.params.mixing);
    j["loglik"] = fit.loglik;
    j["converged"] = fit.converged;
    j["n_iter"] = fit.n_iter;
    ordered_json warn = ordered_json::array();
    for (const auto& w : fit.warnings) warn.push_back(w);
    j["warnings"] = warn;
    return j;
}

ordered_json probs_json(const std::vector<std::vector<Eigen::VectorXd>>& probs) {
    ordered_json comps = ordered_json::array();
    for (const auto& comp : probs) {
        ordered_json preds = ordered_json::array();
        for (const auto& p : comp) preds.push_back(vec_json(p));
        comps.push_back(preds);
    }
    return comps;
}

}  // namespace

std::string mixture_report_json(const GaussianMixtureFit& fit) {
    ordered_json j = mixture_common(fit, "gaussian");
    j["means"] = mat_json(fit.params.means);
    j["cov"] = mat_json(fit.params.cov);
    return j.dump(2);
}

std::string mixture_report_json(const CategoricalMixtureFit& fit) {
    ordered_json j = mixture_common(fit, "categorical");
    j["level_probs"] = probs_json(fit.params.probs);
    return j.dump(2);
}

std::string mixture_report_json(const HybridMixtureFit& fit) {
    ordered_json j = mixture_common(fit, "hybrid");
    j["level_probs"] = probs_json(fit.params.cat_probs);
    j["means"] = mat_json(fit.params.means);
    j["vars"] = vec_json(fit.params.vars);
    return j.dump(2);
}

std::string tradeoff_report_json(const TradeoffCurve& curve) {
    ordered_json j;
    j["task"] = curve.task == TradeoffTask::regression ? "tradeoff-regression"
                                                       : "tradeoff-classification";
    ordered_json pts = ordered_json::array();
    for (const auto& p : curve.points) {
        ordered_json pj;
        pj["tuning"] = p.tuning;
        pj["accuracy"] = num_or_null(p.accuracy);
        pj["fairness"] = num_or_null(p.fairness);
        pj["sse"] = num_or_null(p.sse);
        pj["r2_given_A"] = num_or_null(p.r2_given_A);
        pj["penalty_value"] = num_or_null(p.penalty_value);
        pj["md"] = num_or_null(p.md);
        pj["converged"] = p.converged;
        pj["n_iter"] = p.n_iter;
        pj["failed"] = p.failed;
        pj["error"] = p.error;
        ordered_json warn = ordered_json::array();
        for (const auto& w : p.warnings) warn.push_back(w);
        pj["warnings"] = warn;
        pts.push_back(pj);
    }
    j["points"] = pts;
    ordered_json warn = ordered_json::array();
    for (const auto& w : curve.warnings) warn.push_back(w);
    j["warnings"] = warn;
    return j.dump(2);
}

namespace {

using nlohmann::json;

bool type_matches(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

bool validate_node(const json& doc, const json& schema, const std::string& path,
                   std::string* error) {
    if (!schema.is_object()) {
        if (error) *error = path + ": schema node is not an object";
        return false;
    }
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(doc, t.get<std::string>());
        } else if (t.is_array()) {
            for (const auto& alt : t)
                if (alt.is_string() && type_matches(doc, alt.get<std::string>())) ok = true;
        }
        if (!ok) {
            if (error) *error = path + ": type mismatch";
            return false;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& alt : schema["enum"])
            if (doc == alt) ok = true;
        if (!ok) {
            if (error) *error = path + ": value not in enum";
            return false;
        }
    }
    if (doc.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!doc.contains(key.get<std::string>())) {
                    if (error) *error = path + ": missing required key '" + key.get<std::string>() + "'";
                    return false;
                }
            }
        }
        const bool closed = schema.contains("additionalProperties") &&
                            schema["additionalProperties"].is_boolean() &&
                            !schema["additionalProperties"].get<bool>();
        const json props = schema.contains("properties") ? schema["properties"] : json::object();
        for (const auto& item : doc.items()) {
            auto it = props.find(item.key());
            if (it != props.end()) {
                if (!validate_node(item.value(), *it, path + "/" + item.key(), error)) return false;
            } else if (closed) {
                if (error) *error = path + ": unexpected key '" + item.key() + "'";
                return false;
            }
        }
    }
    if (doc.is_array() && schema.contains("items")) {
        int i = 0;
        for (const auto& item : doc) {
            if (!validate_node(item, schema["items"], path + "/" + std::to_string(i), error))
                return false;
            ++i;
        }
    }
    return true;
}

}  // namespace

bool matches_schema(const std::string& document_json, const std::string& schema_json,
                    std::string* error) {
    json doc, schema;
    try {
        doc = json::parse(document_json);
    } catch (const json::exception& e) {
        if (error) *error = std::string("document: ") + e.what();
        return false;
    }
    try {
        schema = json::parse(schema_json);
    } catch (const json::exception& e) {
        if (error) *error = std::string("schema: ") + e.what();
        return false;
    }
    return validate_node(doc, schema, "$", error);
}

}  // namespace fairmix

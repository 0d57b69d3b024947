#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fairmix/report.hpp"

using namespace fairmix;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string schema_file(const char* name) {
    return std::string(FAIRMIX_SCHEMA_DIR) + "/" + name;
}

FairLinearFit demo_linear() {
    FairLinearFit fit;
    fit.beta0 = 0.4;
    fit.alpha = Eigen::Vector2d(0.9, -0.2);
    fit.beta = Eigen::Vector3d(1.0, 0.0, -0.5);
    fit.epsilon = 0.3;
    fit.sse = 12.5;
    fit.r2_given_A = 0.21;
    fit.multiplier = 0.05;
    return fit;
}

FairLogisticFit demo_logistic() {
    FairLogisticFit fit;
    fit.beta0 = -0.1;
    fit.alpha = Eigen::Vector2d(0.7, 0.0);
    fit.beta = Eigen::Vector2d(0.3, 0.6);
    fit.lambda = 3.0;
    fit.delta = 1e-8;
    fit.objective = 205.0;
    fit.penalty_value = 0.4;
    fit.grad_norm = 5e-7;
    fit.converged = true;
    fit.n_iter = 17;
    return fit;
}

MetricsReport demo_metrics(bool classifier) {
    MetricsReport m;
    m.acc = 0.82;
    m.md = 0.3;
    if (classifier) {
        m.delta_eo = 0.12;
        m.delta_dp = 0.2;
        m.auc = 0.88;
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        m.delta_eo = nan;
        m.delta_dp = nan;
        m.auc = nan;
    }
    return m;
}

}  // namespace

TEST_CASE("regression report validates against its published shape") {
    const std::string doc = regression_report_json(demo_linear(), demo_metrics(false), {"note"});
    std::string err;
    CHECK(matches_schema(doc, slurp(schema_file("report-regression.schema.json")), &err));
    CHECK(err.empty());

    const json j = json::parse(doc);
    CHECK(j["task"] == "regression");
    CHECK(j["tuning"]["epsilon"] == 0.3);
    CHECK(j["coefficients"]["posterior_block"].size() == 2);
    // metrics without a defined value render as null, never as NaN text
    CHECK(j["diagnostics"]["test"]["auc"].is_null());
    CHECK(j["diagnostics"]["test"]["acc"] == 0.82);
    CHECK(doc.find("nan") == std::string::npos);
}

TEST_CASE("classification report validates against its published shape") {
    const std::string doc = classification_report_json(demo_logistic(), demo_metrics(true), {});
    std::string err;
    CHECK(matches_schema(doc, slurp(schema_file("report-classification.schema.json")), &err));
    CHECK(err.empty());

    const json j = json::parse(doc);
    CHECK(j["task"] == "classification");
    CHECK(j["tuning"]["lambda"] == 3.0);
    CHECK(j["diagnostics"]["penalty_value"] == 0.4);
    CHECK(j["diagnostics"]["test"]["delta_eo"] == 0.12);
    CHECK(j["converged"] == true);
}

TEST_CASE("mixture reports validate for each family") {
    const std::string sch = slurp(schema_file("report-mixture.schema.json"));
    std::string err;

    GaussianMixtureFit g;
    g.params.mixing = Eigen::Vector2d(0.4, 0.6);
    g.params.means = Eigen::MatrixXd(2, 1);
    g.params.means << 0.0, 3.0;
    g.params.cov = Eigen::MatrixXd::Identity(1, 1);
    g.loglik = -812.0;
    g.converged = true;
    g.n_iter = 14;
    CHECK(matches_schema(mixture_report_json(g), sch, &err));

    CategoricalMixtureFit c;
    c.params.mixing = Eigen::Vector2d(0.5, 0.5);
    c.params.probs = {{Eigen::Vector2d(0.2, 0.8)}, {Eigen::Vector2d(0.7, 0.3)}};
    c.loglik = -55.0;
    c.converged = true;
    c.n_iter = 6;
    CHECK(matches_schema(mixture_report_json(c), sch, &err));

    HybridMixtureFit h;
    h.params.mixing = Eigen::Vector2d(0.5, 0.5);
    h.params.cat_probs = {{Eigen::Vector2d(0.2, 0.8)}, {Eigen::Vector2d(0.7, 0.3)}};
    h.params.means = Eigen::MatrixXd(2, 1);
    h.params.means << -1.0, 1.0;
    h.params.vars = Eigen::VectorXd::Ones(1);
    h.loglik = -99.0;
    h.converged = false;
    h.n_iter = 500;
    const std::string doc = mixture_report_json(h);
    CHECK(matches_schema(doc, sch, &err));
    CHECK(json::parse(doc)["family"] == "hybrid");
    CHECK(json::parse(doc)["converged"] == false);
}

TEST_CASE("trade-off report validates including failed grid points") {
    TradeoffCurve curve;
    curve.task = TradeoffTask::classification;
    TradeoffPoint ok;
    ok.tuning = 0.0;
    ok.accuracy = 0.1;
    ok.fairness = 0.4;
    ok.penalty_value = 0.4;
    ok.md = 0.4;
    ok.converged = true;
    ok.n_iter = 12;
    TradeoffPoint bad;
    bad.tuning = 10.0;
    bad.failed = true;
    bad.error = "did not converge";
    curve.points = {ok, bad};

    const std::string doc = tradeoff_report_json(curve);
    std::string err;
    CHECK(matches_schema(doc, slurp(schema_file("report-tradeoff.schema.json")), &err));
    const json j = json::parse(doc);
    CHECK(j["points"].size() == 2);
    CHECK(j["points"][1]["failed"] == true);
    CHECK(j["points"][1]["accuracy"].is_null());
}

TEST_CASE("structural validator enforces the subset it advertises") {
    const std::string sch = R"({
        "type": "object",
        "required": ["name", "kind", "vals"],
        "additionalProperties": false,
        "properties": {
            "name": {"type": "string"},
            "kind": {"type": "string", "enum": ["a", "b"]},
            "vals": {"type": "array", "items": {"type": ["number", "null"]}},
            "extra": {"type": "boolean"}
        }
    })";
    std::string err;
    CHECK(matches_schema(R"({"name":"x","kind":"a","vals":[1,null,2.5]})", sch, &err));
    // missing required key
    CHECK_FALSE(matches_schema(R"({"name":"x","kind":"a"})", sch, &err));
    CHECK(!err.empty());
    // enum violation
    CHECK_FALSE(matches_schema(R"({"name":"x","kind":"c","vals":[]})", sch, &err));
    // wrong item type
    CHECK_FALSE(matches_schema(R"({"name":"x","kind":"a","vals":["s"]})", sch, &err));
    // closed object rejects unknown keys
    CHECK_FALSE(matches_schema(R"({"name":"x","kind":"a","vals":[],"zzz":1})", sch, &err));
    // wrong top-level type
    CHECK_FALSE(matches_schema(R"([1,2])", sch, &err));
}

TEST_CASE("a corrupted report no longer validates") {
    const std::string doc = regression_report_json(demo_linear(), demo_metrics(false), {});
    json j = json::parse(doc);
    j.erase("coefficients");
    std::string err;
    CHECK_FALSE(
        matches_schema(j.dump(), slurp(schema_file("report-regression.schema.json")), &err));
    CHECK(err.find("coefficients") != std::string::npos);
}

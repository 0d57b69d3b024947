#include "fairmix/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fairmix/errors.hpp"
#include "fairmix/fair_linear.hpp"
#include "fairmix/metrics.hpp"
#include "fairmix/report.hpp"

namespace fairmix {
namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const SchemaError& e) {
        throw SchemaError(std::string(name) + ": " + e.what());
    } catch (const UndefinedMetricError& e) {
        throw UndefinedMetricError(std::string(name) + ": " + e.what());
    } catch (const TooLargeError& e) {
        throw TooLargeError(std::string(name) + ": " + e.what());
    } catch (const NumericError& e) {
        // subclass detail folds into the category; the stage label matters more
        throw NumericError(std::string(name) + ": " + e.what());
    }
}

bool is_binary(const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0.0 && y(i) != 1.0) return false;
    return true;
}

std::string format_tag(const char* name, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%g", name, value);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw SchemaError("write failed for '" + path + "'");
}

std::string predictions_csv(const Eigen::VectorXd& y, const Eigen::VectorXd& pred,
                            const Eigen::VectorXi& groups) {
    std::string out = "index,y,prediction,group\n";
    char buf[128];
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%d\n",
                      static_cast<long long>(i), y(i), pred(i), groups(i));
        out += buf;
    }
    return out;
}

Eigen::MatrixXd predictors(const SplitData& s) {
    Eigen::MatrixXd X(s.y.size(), s.xa_cont.cols() + s.other.cols());
    X << s.xa_cont, s.other;
    return X;
}

}  // namespace

PreparedDesign prepare_design(const DatasetSchema& schema, const PipelineConfig& cfg) {
    if (cfg.K < 1) throw SchemaError("pipeline: K must be at least 1");
    if (cfg.task != "auto" && cfg.task != "regression" && cfg.task != "classification")
        throw SchemaError("pipeline: task must be auto, regression, or classification");

    PreparedDesign d;
    d.part = stage("load", [&] { return load_csv(schema); });
    for (const auto& w : d.part.warnings) d.warnings.push_back("load: " + w);

    d.task = cfg.task;
    if (d.task == "auto")
        d.task = (is_binary(d.part.train.y) && is_binary(d.part.test.y)) ? "classification"
                                                                         : "regression";
    if (d.task == "classification" && !(is_binary(d.part.train.y) && is_binary(d.part.test.y)))
        throw SchemaError("pipeline: classification requires a 0/1 response");

    const bool has_cat = d.part.train.xa_cat.cols() > 0;
    const bool has_cont = d.part.train.xa_cont.cols() > 0;
    std::vector<std::string> mix_warnings;
    if (has_cat && has_cont) {
        d.family = "hybrid";
        const HybridMixtureFit mix = stage("mixture", [&] {
            return fit_hybrid_em(d.part.train.xa_cat, d.part.arities, d.part.train.xa_cont, cfg.K,
                                 cfg.em);
        });
        mix_warnings = mix.warnings;
        d.mixture_converged = mix.converged;
        d.post_train = mix.posterior;
        d.post_test.probs = posterior_matrix(mix.params, d.part.test.xa_cat, d.part.test.xa_cont);
    } else if (has_cat) {
        d.family = "categorical";
        const CategoricalMixtureFit mix = stage("mixture", [&] {
            return fit_categorical_em(d.part.train.xa_cat, d.part.arities, cfg.K, cfg.em);
        });
        mix_warnings = mix.warnings;
        d.mixture_converged = mix.converged;
        d.post_train = mix.posterior;
        d.post_test.probs = posterior_matrix(mix.params, d.part.test.xa_cat);
    } else {
        d.family = "gaussian";
        const GaussianMixtureFit mix = stage("mixture", [&] {
            return fit_gaussian_em(d.part.train.xa_cont, cfg.K, cfg.em);
        });
        mix_warnings = mix.warnings;
        d.mixture_converged = mix.converged;
        d.post_train = mix.posterior;
        d.post_test.probs = posterior_matrix(mix.params, d.part.test.xa_cont);
    }
    for (const auto& w : mix_warnings) d.warnings.push_back("mixture: " + w);
    if (!d.mixture_converged) d.warnings.push_back("mixture: fit did not converge");

    const Eigen::MatrixXd X_train = predictors(d.part.train);
    const Eigen::MatrixXd X_test = predictors(d.part.test);
    d.rd = stage("residualize", [&] { return residualize(X_train, d.post_train); });
    for (const auto& w : d.rd.warnings) d.warnings.push_back("residualize: " + w);
    d.U_test = X_test - Eigen::VectorXd::Ones(X_test.rows()) * d.rd.intercept.transpose() -
               d.post_test.probs * d.rd.coefficients;
    return d;
}

PipelineResult run_pipeline(const DatasetSchema& schema, const PipelineConfig& cfg) {
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
        throw SchemaError("pipeline: epsilon must lie in [0,1]");
    for (double l : cfg.lambda_grid)
        if (!(l >= 0.0)) throw SchemaError("pipeline: lambda values must be nonnegative");
    if (cfg.lambda_grid.empty()) throw SchemaError("pipeline: lambda grid is empty");

    const PreparedDesign d = prepare_design(schema, cfg);
    PipelineResult res;
    res.task = d.task;
    res.family = d.family;
    res.warnings = d.warnings;
    res.all_converged = d.mixture_converged;

    std::filesystem::create_directories(cfg.out_dir);
    const std::string base = (std::filesystem::path(cfg.out_dir) / cfg.prefix).string();
    const Eigen::VectorXi test_groups = map_classify(d.post_test);

    if (res.task == "regression") {
        const FairLinearFit fit = stage("fit", [&] {
            return fit_fair_ls(d.part.train.y, d.post_train, d.rd.residuals, cfg.epsilon);
        });
        const Eigen::VectorXd pred = predict_linear_batch(fit, d.post_test, d.U_test);
        MetricsReport tm;
        tm.delta_eo = tm.delta_dp = tm.auc = std::numeric_limits<double>::quiet_NaN();
        const Eigen::VectorXd dev = d.part.test.y - pred;
        const double sst = (d.part.test.y.array() - d.part.test.y.mean()).matrix().squaredNorm();
        tm.acc = sst > 0.0 ? 1.0 - dev.squaredNorm() / sst
                           : std::numeric_limits<double>::quiet_NaN();
        tm.md = mean_distance(d.post_test, pred, &tm.warnings);
        PipelineArtifact art;
        art.tuning = cfg.epsilon;
        art.report_json = regression_report_json(fit, tm, res.warnings);
        const std::string tag = format_tag("eps", cfg.epsilon);
        art.report_path = base + "-" + tag + ".json";
        art.predictions_path = base + "-" + tag + "-predictions.csv";
        stage("write", [&] {
            write_file(art.report_path, art.report_json);
            write_file(art.predictions_path, predictions_csv(d.part.test.y, pred, test_groups));
            return 0;
        });
        res.artifacts.push_back(std::move(art));
        return res;
    }

    const Eigen::VectorXi y_test_int = d.part.test.y.cast<int>();
    for (double lambda : cfg.lambda_grid) {
        const FairLogisticFit fit = stage("fit", [&] {
            return fit_fair_logistic(d.part.train.y, d.post_train, d.rd.residuals, lambda,
                                     cfg.delta, cfg.opt);
        });
        const Eigen::VectorXd scores = predict_logistic_batch(fit, d.post_test, d.U_test);
        const MetricsReport tm = classification_report(scores, y_test_int, d.post_test);
        PipelineArtifact art;
        art.tuning = lambda;
        art.converged = fit.converged;
        res.all_converged = res.all_converged && fit.converged;
        art.report_json = classification_report_json(fit, tm, res.warnings);
        const std::string tag = format_tag("lambda", lambda);
        art.report_path = base + "-" + tag + ".json";
        art.predictions_path = base + "-" + tag + "-predictions.csv";
        stage("write", [&] {
            write_file(art.report_path, art.report_json);
            write_file(art.predictions_path, predictions_csv(d.part.test.y, scores, test_groups));
            return 0;
        });
        res.artifacts.push_back(std::move(art));
    }
    return res;
}

}  // namespace fairmix

// Command-line front end: schema-driven fits, simulation sweeps, closed-form
// calculators, and reference checks. Exit codes: 0 ok, 2 schema/config error,
// 3 numeric failure, 4 non-convergence (reports still written).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairmix/dataset.hpp"
#include "fairmix/errors.hpp"
#include "fairmix/fair_linear.hpp"
#include "fairmix/fair_logistic.hpp"
#include "fairmix/metrics.hpp"
#include "fairmix/mixture.hpp"
#include "fairmix/oracles.hpp"
#include "fairmix/pipeline.hpp"
#include "fairmix/report.hpp"
#include "fairmix/residualize.hpp"
#include "fairmix/scenarios.hpp"
#include "fairmix/screening.hpp"
#include "fairmix/theory.hpp"
#include "fairmix/tradeoff.hpp"

namespace {

using fairmix::SchemaError;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNoConverge = 4;

int g_exit = kExitOk;
json g_config = json::object();

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void load_config(const std::string& path) {
    if (path.empty()) return;
    try {
        g_config = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw SchemaError("config '" + path + "': " + e.what());
    }
    if (!g_config.is_object()) throw SchemaError("config '" + path + "' must be a JSON object");
    for (const auto& item : g_config.items()) {
        if (item.value().is_object())
            throw SchemaError("config key '" + item.key() + "': nested objects are not allowed");
    }
}

// command line wins over config file, config wins over built-in defaults
template <class T>
void cfg(CLI::Option* opt, const char* key, T& var) {
    if (opt != nullptr && opt->count() > 0) return;
    if (!g_config.contains(key)) return;
    try {
        var = g_config.at(key).get<T>();
    } catch (const json::exception&) {
        throw SchemaError(std::string("config key '") + key + "': wrong type");
    }
}

std::string write_out(const std::string& dir, const std::string& name,
                      const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot open '" + path + "' for writing");
    out << content;
    if (!out.good()) throw SchemaError("write failed for '" + path + "'");
    return path;
}

Eigen::VectorXd to_vec(const json& a, const std::string& what) {
    if (!a.is_array()) throw SchemaError(what + " must be an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (const auto& item : a) {
        if (!item.is_number()) throw SchemaError(what + " must be an array of numbers");
        v(i++) = item.get<double>();
    }
    return v;
}

Eigen::MatrixXd to_mat(const json& a, const std::string& what) {
    if (!a.is_array() || a.empty()) throw SchemaError(what + " must be a nonempty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd m;
    Eigen::Index r = 0;
    for (const auto& row : a) {
        const Eigen::VectorXd v = to_vec(row, what + " row");
        if (r == 0) m.resize(rows, v.size());
        if (v.size() != m.cols()) throw SchemaError(what + " rows differ in length");
        m.row(r++) = v.transpose();
    }
    return m;
}

std::vector<std::vector<Eigen::VectorXd>> to_probs(const json& a, const std::string& what) {
    if (!a.is_array() || a.empty()) throw SchemaError(what + " must be a nonempty array");
    std::vector<std::vector<Eigen::VectorXd>> probs;
    for (const auto& comp : a) {
        if (!comp.is_array() || comp.empty())
            throw SchemaError(what + " components must be nonempty arrays");
        std::vector<Eigen::VectorXd> preds;
        for (const auto& p : comp) preds.push_back(to_vec(p, what + " levels"));
        probs.push_back(std::move(preds));
    }
    return probs;
}

ordered_json num_or_null(double v) {
    if (std::isfinite(v)) return ordered_json(v);
    return ordered_json(nullptr);
}

json params_json(const std::string& path) {
    if (path.empty()) throw SchemaError("--params file is required");
    try {
        json j = json::parse(read_file(path));
        if (!j.is_object()) throw SchemaError("params '" + path + "' must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw SchemaError("params '" + path + "': " + e.what());
    }
}

fairmix::GaussianMixtureParams gaussian_params(const json& j) {
    fairmix::GaussianMixtureParams p;
    if (!j.contains("mixing") || !j.contains("means") || !j.contains("cov"))
        throw SchemaError("gaussian params need mixing, means, cov");
    p.mixing = to_vec(j["mixing"], "mixing");
    p.means = to_mat(j["means"], "means");
    p.cov = to_mat(j["cov"], "cov");
    return p;
}

fairmix::CategoricalMixtureParams categorical_params(const json& j) {
    fairmix::CategoricalMixtureParams p;
    if (!j.contains("mixing") || !j.contains("probs"))
        throw SchemaError("categorical params need mixing, probs");
    p.mixing = to_vec(j["mixing"], "mixing");
    p.probs = to_probs(j["probs"], "probs");
    return p;
}

void emit_theory(const std::string& out_dir, const std::string& name,
                 const ordered_json& inputs, const ordered_json& values) {
    ordered_json j;
    j["calculator"] = name;
    j["inputs"] = inputs;
    j["values"] = values;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    write_out(out_dir, "theory-" + name + ".json", text);
}

void emit_oracle(const std::string& out_dir, const fairmix::OracleReport& rep) {
    ordered_json j;
    j["name"] = rep.name;
    j["value"] = rep.value;
    j["se"] = rep.se;
    j["inputs_hash"] = rep.inputs_hash;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    write_out(out_dir, "oracle-" + rep.name + ".json", text);
}

std::string posterior_csv(const Eigen::MatrixXd& probs) {
    std::string out;
    for (Eigen::Index k = 0; k < probs.cols(); ++k)
        out += (k == 0 ? "g" : ",g") + std::to_string(k + 1);
    out += "\n";
    char buf[48];
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        for (Eigen::Index k = 0; k < probs.cols(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", probs(i, k));
            if (k > 0) out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::vector<double> flat(std::initializer_list<double> xs) { return std::vector<double>(xs); }

// shared state filled by global flags
struct Globals {
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string config_path;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void finish_globals(Globals& g) {
    load_config(g.config_path);
    cfg(g.seed_opt, "seed", g.seed);
    cfg(g.out_opt, "out", g.out_dir);
}

std::vector<std::vector<int>> parse_candidates(const std::string& text) {
    std::vector<std::vector<int>> out;
    std::stringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        std::vector<int> cols;
        std::stringstream cs(group);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                cols.push_back(v);
            } catch (const std::exception&) {
                throw SchemaError("candidates: '" + cell + "' is not a column index");
            }
        }
        if (!cols.empty()) out.push_back(std::move(cols));
    }
    if (out.empty()) throw SchemaError("candidates: no column sets given");
    return out;
}

Eigen::MatrixXd numeric_predictors(const fairmix::SplitData& s) {
    Eigen::MatrixXd X(s.y.size(), s.xa_cont.cols() + s.other.cols());
    X << s.xa_cont, s.other;
    return X;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-mixture toolkit for group-blind fair fitting"};
    app.require_subcommand(1);
    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "root seed for all randomness");
    g.out_opt = app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--config", g.config_path, "flat key-value JSON with flag defaults");

    // ---- fit-mixture ----
    struct MixOpts {
        std::string schema_path, family = "auto";
        int K = 2;
        fairmix::EmConfig em;
        CLI::Option *schema_opt, *k_opt, *family_opt, *iter_opt, *tol_opt, *restart_opt;
    };
    auto mo = std::make_shared<MixOpts>();
    CLI::App* mix_cmd = app.add_subcommand("fit-mixture", "fit the latent-group mixture only");
    mix_cmd->fallthrough();
    mo->schema_opt = mix_cmd->add_option("--schema", mo->schema_path, "dataset schema JSON file");
    mo->k_opt = mix_cmd->add_option("--K", mo->K, "number of latent groups");
    mo->family_opt = mix_cmd->add_option("--family", mo->family,
                                         "auto|gaussian|categorical|hybrid");
    mo->iter_opt = mix_cmd->add_option("--em-max-iter", mo->em.max_iter, "EM iteration cap");
    mo->tol_opt = mix_cmd->add_option("--em-tol", mo->em.rel_tol, "relative loglik tolerance");
    mo->restart_opt = mix_cmd->add_option("--restarts", mo->em.n_restarts, "EM restarts");
    mix_cmd->callback([&g, mo] {
        finish_globals(g);
        cfg(mo->schema_opt, "schema", mo->schema_path);
        cfg(mo->k_opt, "K", mo->K);
        cfg(mo->family_opt, "family", mo->family);
        cfg(mo->iter_opt, "em-max-iter", mo->em.max_iter);
        cfg(mo->tol_opt, "em-tol", mo->em.rel_tol);
        cfg(mo->restart_opt, "restarts", mo->em.n_restarts);
        if (mo->schema_path.empty()) throw SchemaError("fit-mixture: --schema is required");
        mo->em.seed = g.seed;

        const fairmix::DatasetSchema schema = fairmix::schema_from_json(read_file(mo->schema_path));
        const fairmix::DesignPartition part = fairmix::load_csv(schema);
        std::string family = mo->family;
        if (family == "auto") {
            const bool has_cat = part.train.xa_cat.cols() > 0;
            const bool has_cont = part.train.xa_cont.cols() > 0;
            family = has_cat && has_cont ? "hybrid" : (has_cat ? "categorical" : "gaussian");
        }
        std::string report;
        Eigen::MatrixXd post_train, post_test;
        bool converged = false;
        if (family == "gaussian") {
            if (part.train.xa_cont.cols() == 0)
                throw SchemaError("fit-mixture: no sensitive-related continuous columns");
            const auto fit = fairmix::fit_gaussian_em(part.train.xa_cont, mo->K, mo->em);
            report = fairmix::mixture_report_json(fit);
            post_train = fit.posterior.probs;
            post_test = fairmix::posterior_matrix(fit.params, part.test.xa_cont);
            converged = fit.converged;
        } else if (family == "categorical") {
            if (part.train.xa_cat.cols() == 0)
                throw SchemaError("fit-mixture: no sensitive-related categorical columns");
            const auto fit = fairmix::fit_categorical_em(part.train.xa_cat, part.arities, mo->K,
                                                         mo->em);
            report = fairmix::mixture_report_json(fit);
            post_train = fit.posterior.probs;
            post_test = fairmix::posterior_matrix(fit.params, part.test.xa_cat);
            converged = fit.converged;
        } else if (family == "hybrid") {
            if (part.train.xa_cat.cols() == 0 || part.train.xa_cont.cols() == 0)
                throw SchemaError("fit-mixture: hybrid needs both sensitive-related blocks");
            const auto fit = fairmix::fit_hybrid_em(part.train.xa_cat, part.arities,
                                                    part.train.xa_cont, mo->K, mo->em);
            report = fairmix::mixture_report_json(fit);
            post_train = fit.posterior.probs;
            post_test = fairmix::posterior_matrix(fit.params, part.test.xa_cat, part.test.xa_cont);
            converged = fit.converged;
        } else {
            throw SchemaError("fit-mixture: unknown family '" + family + "'");
        }
        const std::string rp = write_out(g.out_dir, "mixture.json", report + "\n");
        const std::string tp = write_out(g.out_dir, "posterior-train.csv", posterior_csv(post_train));
        const std::string sp = write_out(g.out_dir, "posterior-test.csv", posterior_csv(post_test));
        std::cout << "family " << family << (converged ? "" : " (not converged)") << "\n"
                  << "report: " << rp << "\nposterior-train: " << tp << "\nposterior-test: " << sp
                  << "\n";
        if (!converged) g_exit = kExitNoConverge;
    });

    // ---- fit-regression ----
    struct RegOpts {
        std::string schema_path;
        int K = 2;
        double epsilon = 1.0;
        fairmix::EmConfig em;
        CLI::Option *schema_opt, *k_opt, *eps_opt, *iter_opt, *tol_opt, *restart_opt;
    };
    auto ro = std::make_shared<RegOpts>();
    CLI::App* reg_cmd = app.add_subcommand("fit-regression",
                                           "constrained least squares on a dataset");
    reg_cmd->fallthrough();
    ro->schema_opt = reg_cmd->add_option("--schema", ro->schema_path, "dataset schema JSON file");
    ro->k_opt = reg_cmd->add_option("--K", ro->K, "number of latent groups");
    ro->eps_opt = reg_cmd->add_option("--epsilon", ro->epsilon, "variance-share cap in [0,1]");
    ro->iter_opt = reg_cmd->add_option("--em-max-iter", ro->em.max_iter, "EM iteration cap");
    ro->tol_opt = reg_cmd->add_option("--em-tol", ro->em.rel_tol, "relative loglik tolerance");
    ro->restart_opt = reg_cmd->add_option("--restarts", ro->em.n_restarts, "EM restarts");
    reg_cmd->callback([&g, ro] {
        finish_globals(g);
        cfg(ro->schema_opt, "schema", ro->schema_path);
        cfg(ro->k_opt, "K", ro->K);
        cfg(ro->eps_opt, "epsilon", ro->epsilon);
        cfg(ro->iter_opt, "em-max-iter", ro->em.max_iter);
        cfg(ro->tol_opt, "em-tol", ro->em.rel_tol);
        cfg(ro->restart_opt, "restarts", ro->em.n_restarts);
        if (ro->schema_path.empty()) throw SchemaError("fit-regression: --schema is required");

        fairmix::PipelineConfig cfg_pipe;
        cfg_pipe.K = ro->K;
        cfg_pipe.task = "regression";
        cfg_pipe.epsilon = ro->epsilon;
        cfg_pipe.em = ro->em;
        cfg_pipe.em.seed = g.seed;
        cfg_pipe.out_dir = g.out_dir;
        const fairmix::DatasetSchema schema = fairmix::schema_from_json(read_file(ro->schema_path));
        const fairmix::PipelineResult res = fairmix::run_pipeline(schema, cfg_pipe);
        std::cout << "task " << res.task << " family " << res.family << "\n";
        for (const auto& a : res.artifacts)
            std::cout << "report: " << a.report_path << "\npredictions: " << a.predictions_path
                      << "\n";
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        if (!res.all_converged) g_exit = kExitNoConverge;
    });

    // ---- fit-classifier ----
    struct ClsOpts {
        std::string schema_path;
        int K = 2;
        std::vector<double> lambdas = {0.0};
        double delta = 1e-8;
        fairmix::EmConfig em;
        fairmix::OptimizerConfig opt;
        CLI::Option *schema_opt, *k_opt, *lam_opt, *delta_opt, *iter_opt, *tol_opt, *restart_opt,
            *step_opt, *gtol_opt, *oiter_opt, *newton_opt;
    };
    auto co = std::make_shared<ClsOpts>();
    CLI::App* cls_cmd = app.add_subcommand("fit-classifier",
                                           "penalized logistic regression on a dataset");
    cls_cmd->fallthrough();
    co->schema_opt = cls_cmd->add_option("--schema", co->schema_path, "dataset schema JSON file");
    co->k_opt = cls_cmd->add_option("--K", co->K, "number of latent groups");
    co->lam_opt = cls_cmd->add_option("--lambda", co->lambdas, "penalty weights, one report each")
                      ->delimiter(',');
    co->delta_opt = cls_cmd->add_option("--delta", co->delta, "penalty smoothing constant");
    co->iter_opt = cls_cmd->add_option("--em-max-iter", co->em.max_iter, "EM iteration cap");
    co->tol_opt = cls_cmd->add_option("--em-tol", co->em.rel_tol, "relative loglik tolerance");
    co->restart_opt = cls_cmd->add_option("--restarts", co->em.n_restarts, "EM restarts");
    co->step_opt = cls_cmd->add_option("--step", co->opt.step, "optimizer step size");
    co->gtol_opt = cls_cmd->add_option("--grad-tol", co->opt.grad_tol, "gradient max-norm target");
    co->oiter_opt = cls_cmd->add_option("--opt-max-iter", co->opt.max_iter,
                                        "optimizer iteration cap");
    co->newton_opt = cls_cmd->add_flag("--newton", co->opt.use_newton,
                                       "second-order steps where the Hessian is usable");
    cls_cmd->callback([&g, co] {
        finish_globals(g);
        cfg(co->schema_opt, "schema", co->schema_path);
        cfg(co->k_opt, "K", co->K);
        cfg(co->lam_opt, "lambda", co->lambdas);
        cfg(co->delta_opt, "delta", co->delta);
        cfg(co->iter_opt, "em-max-iter", co->em.max_iter);
        cfg(co->tol_opt, "em-tol", co->em.rel_tol);
        cfg(co->restart_opt, "restarts", co->em.n_restarts);
        cfg(co->step_opt, "step", co->opt.step);
        cfg(co->gtol_opt, "grad-tol", co->opt.grad_tol);
        cfg(co->oiter_opt, "opt-max-iter", co->opt.max_iter);
        cfg(co->newton_opt, "newton", co->opt.use_newton);
        if (co->schema_path.empty()) throw SchemaError("fit-classifier: --schema is required");

        fairmix::PipelineConfig cfg_pipe;
        cfg_pipe.K = co->K;
        cfg_pipe.task = "classification";
        cfg_pipe.lambda_grid = co->lambdas;
        cfg_pipe.delta = co->delta;
        cfg_pipe.em = co->em;
        cfg_pipe.em.seed = g.seed;
        cfg_pipe.opt = co->opt;
        cfg_pipe.out_dir = g.out_dir;
        const fairmix::DatasetSchema schema = fairmix::schema_from_json(read_file(co->schema_path));
        const fairmix::PipelineResult res = fairmix::run_pipeline(schema, cfg_pipe);
        std::cout << "task " << res.task << " family " << res.family << "\n";
        for (const auto& a : res.artifacts)
            std::cout << "lambda " << a.tuning << (a.converged ? "" : " (not converged)")
                      << " report: " << a.report_path << "\n";
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        if (!res.all_converged) g_exit = kExitNoConverge;
    });

    // ---- tradeoff ----
    struct TradeOpts {
        std::string schema_path, task = "auto";
        int K = 2;
        std::vector<double> grid;
        double delta = 1e-8;
        fairmix::EmConfig em;
        fairmix::OptimizerConfig opt;
        CLI::Option *schema_opt, *task_opt, *k_opt, *grid_opt, *delta_opt, *iter_opt, *tol_opt,
            *restart_opt;
    };
    auto to = std::make_shared<TradeOpts>();
    CLI::App* trade_cmd = app.add_subcommand("tradeoff",
                                             "sweep the tuning grid and report both axes");
    trade_cmd->fallthrough();
    to->schema_opt = trade_cmd->add_option("--schema", to->schema_path, "dataset schema JSON file");
    to->task_opt = trade_cmd->add_option("--task", to->task, "auto|regression|classification");
    to->k_opt = trade_cmd->add_option("--K", to->K, "number of latent groups");
    to->grid_opt = trade_cmd->add_option("--grid", to->grid, "tuning values")->delimiter(',');
    to->delta_opt = trade_cmd->add_option("--delta", to->delta, "penalty smoothing constant");
    to->iter_opt = trade_cmd->add_option("--em-max-iter", to->em.max_iter, "EM iteration cap");
    to->tol_opt = trade_cmd->add_option("--em-tol", to->em.rel_tol, "relative loglik tolerance");
    to->restart_opt = trade_cmd->add_option("--restarts", to->em.n_restarts, "EM restarts");
    trade_cmd->callback([&g, to] {
        finish_globals(g);
        cfg(to->schema_opt, "schema", to->schema_path);
        cfg(to->task_opt, "task", to->task);
        cfg(to->k_opt, "K", to->K);
        cfg(to->grid_opt, "grid", to->grid);
        cfg(to->delta_opt, "delta", to->delta);
        cfg(to->iter_opt, "em-max-iter", to->em.max_iter);
        cfg(to->tol_opt, "em-tol", to->em.rel_tol);
        cfg(to->restart_opt, "restarts", to->em.n_restarts);
        if (to->schema_path.empty()) throw SchemaError("tradeoff: --schema is required");

        fairmix::PipelineConfig cfg_pipe;
        cfg_pipe.K = to->K;
        cfg_pipe.task = to->task;
        cfg_pipe.em = to->em;
        cfg_pipe.em.seed = g.seed;
        const fairmix::DatasetSchema schema = fairmix::schema_from_json(read_file(to->schema_path));
        const fairmix::PreparedDesign d = fairmix::prepare_design(schema, cfg_pipe);
        const fairmix::TradeoffTask task = d.task == "regression"
                                               ? fairmix::TradeoffTask::regression
                                               : fairmix::TradeoffTask::classification;
        std::vector<double> grid = to->grid;
        if (grid.empty())
            grid = task == fairmix::TradeoffTask::regression
                       ? flat({0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0})
                       : flat({0.0, 0.1, 1.0, 3.0, 5.0, 10.0});
        const fairmix::TradeoffCurve curve = fairmix::tradeoff_curve(
            d.part.train.y, d.post_train, d.rd.residuals, grid, task, to->delta, to->opt);
        const std::string rp =
            write_out(g.out_dir, "tradeoff.json", fairmix::tradeoff_report_json(curve) + "\n");
        std::string csv = "tuning,accuracy,fairness\n";
        char buf[96];
        bool all_failed = true, any_unconverged = false;
        for (const auto& p : curve.points) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.tuning, p.accuracy,
                          p.fairness);
            csv += buf;
            all_failed = all_failed && p.failed;
            if (!p.failed && !p.converged && task == fairmix::TradeoffTask::classification)
                any_unconverged = true;
        }
        const std::string cp = write_out(g.out_dir, "tradeoff.csv", csv);
        std::cout << "task " << d.task << " family " << d.family << "\nreport: " << rp
                  << "\ncurve: " << cp << "\n";
        for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
        if (all_failed) throw fairmix::NumericError("tradeoff: every grid point failed");
        if (any_unconverged || !d.mixture_converged) g_exit = kExitNoConverge;
    });

    // ---- simulate ----
    struct SimOpts {
        std::string scenario;
        std::vector<std::string> overrides;
        std::vector<double> grid;
        long long n = 0;
        CLI::Option *grid_opt, *n_opt;
    };
    auto so = std::make_shared<SimOpts>();
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run a named simulation sweep");
    sim_cmd->fallthrough();
    sim_cmd->add_option("scenario", so->scenario,
                        "gaussian-uni|categorical|r2|ls|logistic|cat-classify")
        ->required();
    sim_cmd->add_option("overrides", so->overrides, "scenario parameters as key=value");
    so->grid_opt = sim_cmd->add_option("--grid", so->grid, "tuning axis values")->delimiter(',');
    so->n_opt = sim_cmd->add_option("--n", so->n, "observations per replicate");
    sim_cmd->callback([&g, so] {
        finish_globals(g);
        cfg(so->grid_opt, "grid", so->grid);
        cfg(so->n_opt, "n", so->n);
        fairmix::Scenario scn;
        scn.name = so->scenario;
        scn.seed = g.seed;
        scn.n = static_cast<Eigen::Index>(so->n);
        for (const auto& kv : so->overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw SchemaError("simulate: override '" + kv + "' is not key=value");
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            try {
                std::size_t used = 0;
                const double x = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument(val);
                if (key == "n")
                    scn.n = static_cast<Eigen::Index>(std::llround(x));
                else
                    scn.params[key] = x;
            } catch (const std::exception&) {
                throw SchemaError("simulate: override '" + kv + "' has a non-numeric value");
            }
        }
        std::vector<double> grid = so->grid;
        if (grid.empty()) {
            if (scn.name == "gaussian-uni") grid = flat({1, 2, 3, 4, 5});
            else if (scn.name == "categorical")
                grid = flat({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
            else if (scn.name == "r2") grid = flat({100, 1000, 10000});
            else if (scn.name == "ls") grid = flat({0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
            else if (scn.name == "logistic") grid = flat({0.0, 0.1, 1.0, 3.0, 5.0, 10.0});
            else if (scn.name == "cat-classify") grid = flat({0.0, 0.6, 1.2, 1.8, 2.4, 3.0});
            else throw SchemaError("simulate: unknown scenario '" + scn.name + "'");
        }
        const fairmix::ScenarioTable table = fairmix::run_scenario(scn, grid);
        const std::string cp = write_out(g.out_dir, scn.name + "-curve.csv", table.csv);
        const std::string mp =
            write_out(g.out_dir, scn.name + "-manifest.json", table.manifest + "\n");
        std::cout << "curve: " << cp << "\nmanifest: " << mp << "\n";
    });

    // ---- theory ----
    CLI::App* theory_cmd = app.add_subcommand("theory", "closed-form calculators");
    theory_cmd->require_subcommand(1);
    theory_cmd->fallthrough();
    {
        struct IdOpts {
            int K = 2;
            std::vector<int> arities;
        };
        auto o = std::make_shared<IdOpts>();
        CLI::App* c = theory_cmd->add_subcommand("identifiability",
                                                 "parameter-counting check for level mixtures");
        c->fallthrough();
        c->add_option("--K", o->K, "number of components")->required();
        c->add_option("--arities", o->arities, "levels per predictor")->delimiter(',')->required();
        c->callback([&g, o] {
            finish_globals(g);
            const auto v = fairmix::identifiability_check(o->K, o->arities);
            ordered_json in{{"K", o->K}, {"arities", o->arities}};
            ordered_json out{{"n_mix", v.n_mix}, {"n_joint", v.n_joint},
                             {"identifiable", v.identifiable}};
            emit_theory(g.out_dir, "identifiability", in, out);
        });
    }
    {
        struct SepOpts {
            std::vector<double> mixing;
            double alpha = 0.05;
        };
        auto o = std::make_shared<SepOpts>();
        CLI::App* c = theory_cmd->add_subcommand("separation-threshold",
                                                 "minimum standardized mean separation");
        c->fallthrough();
        c->add_option("--mixing", o->mixing, "component priors")->delimiter(',')->required();
        c->add_option("--alpha", o->alpha, "target misclassification bound");
        c->callback([&g, o] {
            finish_globals(g);
            const Eigen::VectorXd mix = Eigen::Map<Eigen::VectorXd>(o->mixing.data(),
                                                                    static_cast<Eigen::Index>(o->mixing.size()));
            const double v = fairmix::separation_threshold(mix, o->alpha);
            ordered_json in{{"mixing", o->mixing}, {"alpha", o->alpha}};
            emit_theory(g.out_dir, "separation-threshold", in, ordered_json{{"delta_star", v}});
        });
    }
    {
        struct UniOpts {
            std::vector<double> means, mixing;
            double sd = 1.0;
        };
        auto o = std::make_shared<UniOpts>();
        CLI::App* c = theory_cmd->add_subcommand("gaussian-accuracy-uni",
                                                 "univariate mixture classifier accuracy");
        c->fallthrough();
        c->add_option("--means", o->means, "component means")->delimiter(',')->required();
        c->add_option("--mixing", o->mixing, "component priors")->delimiter(',')->required();
        c->add_option("--sd", o->sd, "shared standard deviation");
        c->callback([&g, o] {
            finish_globals(g);
            const Eigen::VectorXd mus = Eigen::Map<Eigen::VectorXd>(o->means.data(),
                                                                    static_cast<Eigen::Index>(o->means.size()));
            const Eigen::VectorXd mix = Eigen::Map<Eigen::VectorXd>(o->mixing.data(),
                                                                    static_cast<Eigen::Index>(o->mixing.size()));
            const double v = fairmix::gaussian_accuracy_uni(mus, o->sd, mix);
            ordered_json in{{"means", o->means}, {"sd", o->sd}, {"mixing", o->mixing}};
            emit_theory(g.out_dir, "gaussian-accuracy-uni", in, ordered_json{{"accuracy", v}});
        });
    }
    {
        auto path = std::make_shared<std::string>();
        CLI::App* c = theory_cmd->add_subcommand("gaussian-accuracy",
                                                 "multivariate mixture classifier accuracy");
        c->fallthrough();
        c->add_option("--params", *path, "JSON file with mixing, means, cov")->required();
        c->callback([&g, path] {
            finish_globals(g);
            const json j = params_json(*path);
            const auto p = gaussian_params(j);
            const double v = fairmix::gaussian_accuracy_multi(p.means, p.cov, p.mixing);
            emit_theory(g.out_dir, "gaussian-accuracy", ordered_json{{"params", *path}},
                        ordered_json{{"accuracy", v}});
        });
    }
    {
        struct CatOpts {
            std::string path;
            std::uint64_t cap = 1ull << 20;
        };
        auto o = std::make_shared<CatOpts>();
        CLI::App* c = theory_cmd->add_subcommand("categorical-accuracy",
                                                 "level-mixture classifier accuracy");
        c->fallthrough();
        c->add_option("--params", o->path, "JSON file with mixing, probs")->required();
        c->add_option("--cap", o->cap, "cell enumeration budget");
        c->callback([&g, o] {
            finish_globals(g);
            const auto p = categorical_params(params_json(o->path));
            const double v = fairmix::categorical_accuracy(p, o->cap);
            emit_theory(g.out_dir, "categorical-accuracy", ordered_json{{"params", o->path}},
                        ordered_json{{"accuracy", v}});
        });
    }
    {
        struct BinOpts {
            double p = 0.5, theta1 = 0.5, theta2 = 0.5;
        };
        auto o = std::make_shared<BinOpts>();
        CLI::App* c = theory_cmd->add_subcommand("categorical-accuracy-binary",
                                                 "two-component single-coin accuracy");
        c->fallthrough();
        c->add_option("--p", o->p, "prior of component 1")->required();
        c->add_option("--theta1", o->theta1, "success probability, component 1")->required();
        c->add_option("--theta2", o->theta2, "success probability, component 2")->required();
        c->callback([&g, o] {
            finish_globals(g);
            const double v = fairmix::categorical_accuracy_binary(o->p, o->theta1, o->theta2);
            ordered_json in{{"p", o->p}, {"theta1", o->theta1}, {"theta2", o->theta2}};
            emit_theory(g.out_dir, "categorical-accuracy-binary", in,
                        ordered_json{{"accuracy", v}});
        });
    }
    {
        auto path = std::make_shared<std::string>();
        CLI::App* c = theory_cmd->add_subcommand("r2", "population R^2 with and without the "
                                                       "group block");
        c->fallthrough();
        c->add_option("--params", *path,
                      "JSON file with beta_a, beta_z, mu, sigma_A, sigma_e, sigma_xz, sigma_12, "
                      "sigma_eps2")
            ->required();
        c->callback([&g, path] {
            finish_globals(g);
            const json j = params_json(*path);
            fairmix::R2Inputs inp;
            for (const char* key : {"beta_a", "mu", "sigma_A", "sigma_e", "sigma_eps2"})
                if (!j.contains(key)) throw SchemaError(std::string("r2 params need ") + key);
            inp.beta_a = to_vec(j["beta_a"], "beta_a");
            if (j.contains("beta_z")) inp.beta_z = to_vec(j["beta_z"], "beta_z");
            inp.mu = to_mat(j["mu"], "mu");
            inp.sigma_A = to_mat(j["sigma_A"], "sigma_A");
            inp.sigma_e = to_mat(j["sigma_e"], "sigma_e");
            if (j.contains("sigma_xz")) inp.sigma_xz = to_mat(j["sigma_xz"], "sigma_xz");
            if (j.contains("sigma_12")) inp.sigma_12 = to_mat(j["sigma_12"], "sigma_12");
            if (!j["sigma_eps2"].is_number()) throw SchemaError("sigma_eps2 must be a number");
            inp.sigma_eps2 = j["sigma_eps2"].get<double>();
            const auto [rx, ra] = fairmix::r2_general(inp);
            emit_theory(g.out_dir, "r2", ordered_json{{"params", *path}},
                        ordered_json{{"r2_x", rx}, {"r2_a", ra}});
        });
    }
    {
        struct R2uOpts {
            double beta1 = 1.0, mu = 0.0, p = 0.5, sigma_e = 1.0, sigma_eps = 1.0;
        };
        auto o = std::make_shared<R2uOpts>();
        CLI::App* c = theory_cmd->add_subcommand("r2-univariate",
                                                 "binary-group single-predictor R^2 pair");
        c->fallthrough();
        c->add_option("--beta1", o->beta1, "slope on the mixed predictor")->required();
        c->add_option("--mu", o->mu, "group mean shift")->required();
        c->add_option("--p", o->p, "group prior")->required();
        c->add_option("--sigma-e", o->sigma_e, "predictor noise sd");
        c->add_option("--sigma-eps", o->sigma_eps, "response noise sd");
        c->callback([&g, o] {
            finish_globals(g);
            const auto [rx, ra] =
                fairmix::r2_univariate(o->beta1, o->mu, o->p, o->sigma_e, o->sigma_eps);
            ordered_json in{{"beta1", o->beta1}, {"mu", o->mu}, {"p", o->p},
                            {"sigma_e", o->sigma_e}, {"sigma_eps", o->sigma_eps}};
            emit_theory(g.out_dir, "r2-univariate", in,
                        ordered_json{{"r2_x", rx}, {"r2_a", ra}});
        });
    }

    // ---- verify ----
    CLI::App* verify_cmd = app.add_subcommand("verify", "reference computations for spot checks");
    verify_cmd->require_subcommand(1);
    verify_cmd->fallthrough();
    {
        struct McOpts {
            std::string path;
            long long n = 100000;
        };
        auto o = std::make_shared<McOpts>();
        CLI::App* c = verify_cmd->add_subcommand("mc-gaussian-accuracy",
                                                 "simulate the mixture and classify");
        c->fallthrough();
        c->add_option("--params", o->path, "JSON file with mixing, means, cov")->required();
        c->add_option("--n", o->n, "Monte Carlo draws");
        c->callback([&g, o] {
            finish_globals(g);
            const auto p = gaussian_params(params_json(o->path));
            const auto [v, se] = fairmix::mc_classification_accuracy(
                p, static_cast<Eigen::Index>(o->n), g.seed);
            std::vector<double> flat_in{static_cast<double>(o->n), static_cast<double>(g.seed)};
            for (Eigen::Index i = 0; i < p.mixing.size(); ++i) flat_in.push_back(p.mixing(i));
            fairmix::OracleReport rep{"mc-gaussian-accuracy", v, se,
                                      fairmix::hash_inputs(flat_in)};
            emit_oracle(g.out_dir, rep);
        });
    }
    {
        struct McOpts {
            std::string path;
            long long n = 100000;
        };
        auto o = std::make_shared<McOpts>();
        CLI::App* c = verify_cmd->add_subcommand("mc-categorical-accuracy",
                                                 "simulate the level mixture and classify");
        c->fallthrough();
        c->add_option("--params", o->path, "JSON file with mixing, probs")->required();
        c->add_option("--n", o->n, "Monte Carlo draws");
        c->callback([&g, o] {
            finish_globals(g);
            const auto p = categorical_params(params_json(o->path));
            const auto [v, se] = fairmix::mc_classification_accuracy(
                p, static_cast<Eigen::Index>(o->n), g.seed);
            std::vector<double> flat_in{static_cast<double>(o->n), static_cast<double>(g.seed)};
            for (Eigen::Index i = 0; i < p.mixing.size(); ++i) flat_in.push_back(p.mixing(i));
            fairmix::OracleReport rep{"mc-categorical-accuracy", v, se,
                                      fairmix::hash_inputs(flat_in)};
            emit_oracle(g.out_dir, rep);
        });
    }
    {
        struct EnOpts {
            std::string path;
            std::uint64_t cap = 1ull << 20;
        };
        auto o = std::make_shared<EnOpts>();
        CLI::App* c = verify_cmd->add_subcommand("enumerate-categorical",
                                                 "exact cell-by-cell accuracy");
        c->fallthrough();
        c->add_option("--params", o->path, "JSON file with mixing, probs")->required();
        c->add_option("--cap", o->cap, "cell enumeration budget");
        c->callback([&g, o] {
            finish_globals(g);
            const auto p = categorical_params(params_json(o->path));
            const double v = fairmix::enumerate_categorical_accuracy(p, o->cap);
            std::vector<double> flat_in;
            for (Eigen::Index i = 0; i < p.mixing.size(); ++i) flat_in.push_back(p.mixing(i));
            fairmix::OracleReport rep{"enumerate-categorical", v, 0.0,
                                      fairmix::hash_inputs(flat_in)};
            emit_oracle(g.out_dir, rep);
        });
    }
    {
        struct ThrOpts {
            std::vector<double> means, mixing;
            double sd = 1.0;
        };
        auto o = std::make_shared<ThrOpts>();
        CLI::App* c = verify_cmd->add_subcommand("threshold-accuracy",
                                                 "two-component accuracy via the cut point");
        c->fallthrough();
        c->add_option("--means", o->means, "two component means")->delimiter(',')->required();
        c->add_option("--mixing", o->mixing, "two component priors")->delimiter(',')->required();
        c->add_option("--sd", o->sd, "shared standard deviation");
        c->callback([&g, o] {
            finish_globals(g);
            if (o->means.size() != 2 || o->mixing.size() != 2)
                throw SchemaError("threshold-accuracy needs exactly two means and two priors");
            const double v = fairmix::gaussian_threshold_accuracy(
                Eigen::Vector2d(o->means[0], o->means[1]), o->sd,
                Eigen::Vector2d(o->mixing[0], o->mixing[1]));
            fairmix::OracleReport rep{"threshold-accuracy", v, 0.0,
                                      fairmix::hash_inputs({o->means[0], o->means[1], o->sd,
                                                            o->mixing[0], o->mixing[1]})};
            emit_oracle(g.out_dir, rep);
        });
    }
    {
        struct ScanOpts {
            std::string schema_path;
            int K = 2;
            double epsilon = 0.5;
            int grid_size = 1000;
        };
        auto o = std::make_shared<ScanOpts>();
        CLI::App* c = verify_cmd->add_subcommand(
            "dual-scan", "constrained least squares by multiplier scan on a dataset");
        c->fallthrough();
        c->add_option("--schema", o->schema_path, "dataset schema JSON file")->required();
        c->add_option("--K", o->K, "number of latent groups");
        c->add_option("--epsilon", o->epsilon, "variance-share cap");
        c->add_option("--grid-size", o->grid_size, "scan resolution");
        c->callback([&g, o] {
            finish_globals(g);
            fairmix::PipelineConfig cfg_pipe;
            cfg_pipe.K = o->K;
            cfg_pipe.task = "regression";
            cfg_pipe.em.seed = g.seed;
            const fairmix::DatasetSchema schema =
                fairmix::schema_from_json(read_file(o->schema_path));
            const fairmix::PreparedDesign d = fairmix::prepare_design(schema, cfg_pipe);
            const auto fit = fairmix::fit_fair_ls(d.part.train.y, d.post_train, d.rd.residuals,
                                                  o->epsilon);
            const auto scan = fairmix::dual_scan_fair_ls(d.part.train.y, d.post_train,
                                                         d.rd.residuals, o->epsilon, o->grid_size);
            std::cout << "fit sse " << fit.sse << "\nscan sse " << scan.sse << "\n";
            fairmix::OracleReport rep{"dual-scan", std::abs(fit.sse - scan.sse), 0.0,
                                      fairmix::hash_inputs({o->epsilon,
                                                            static_cast<double>(d.part.train.y.size()),
                                                            static_cast<double>(o->grid_size)})};
            emit_oracle(g.out_dir, rep);
        });
    }
    {
        struct IrlsOpts {
            std::string schema_path;
            int K = 2;
        };
        auto o = std::make_shared<IrlsOpts>();
        CLI::App* c = verify_cmd->add_subcommand(
            "irls", "unpenalized logistic fit by reweighted least squares on a dataset");
        c->fallthrough();
        c->add_option("--schema", o->schema_path, "dataset schema JSON file")->required();
        c->add_option("--K", o->K, "number of latent groups");
        c->callback([&g, o] {
            finish_globals(g);
            fairmix::PipelineConfig cfg_pipe;
            cfg_pipe.K = o->K;
            cfg_pipe.task = "classification";
            cfg_pipe.em.seed = g.seed;
            const fairmix::DatasetSchema schema =
                fairmix::schema_from_json(read_file(o->schema_path));
            const fairmix::PreparedDesign d = fairmix::prepare_design(schema, cfg_pipe);
            const auto fit = fairmix::fit_fair_logistic(d.part.train.y, d.post_train,
                                                        d.rd.residuals, 0.0);
            const int K = d.post_train.k();
            const Eigen::Index n = d.post_train.probs.rows();
            Eigen::MatrixXd X(n, 1 + (K - 1) + d.rd.residuals.cols());
            X.col(0).setOnes();
            X.middleCols(1, K - 1) = d.post_train.probs.leftCols(K - 1);
            X.rightCols(d.rd.residuals.cols()) = d.rd.residuals;
            const Eigen::VectorXd ref = fairmix::irls_logistic(d.part.train.y, X);
            Eigen::VectorXd ours(X.cols());
            ours(0) = fit.beta0;
            ours.segment(1, K - 1) = fit.alpha.head(K - 1);
            ours.tail(fit.beta.size()) = fit.beta;
            const double gap = (ours - ref).cwiseAbs().maxCoeff();
            std::cout << "coefficient gap " << gap << "\n";
            fairmix::OracleReport rep{"irls", gap, 0.0,
                                      fairmix::hash_inputs({static_cast<double>(n),
                                                            static_cast<double>(X.cols())})};
            emit_oracle(g.out_dir, rep);
        });
    }

    // ---- screen ----
    struct ScreenOpts {
        std::string schema_path, task = "auto", candidates;
        int K = 2;
        double epsilon = 1.0, lambda = 0.0, delta = 1e-8, tau = 0.05;
        bool maximize = false, floor = false;
        fairmix::EmConfig em;
        CLI::Option *schema_opt, *task_opt, *k_opt, *cand_opt, *eps_opt, *lam_opt, *delta_opt,
            *tau_opt, *max_opt, *floor_opt;
    };
    auto sc = std::make_shared<ScreenOpts>();
    CLI::App* screen_cmd = app.add_subcommand("screen",
                                              "rank candidate column sets for the mixture block");
    screen_cmd->fallthrough();
    sc->schema_opt = screen_cmd->add_option("--schema", sc->schema_path, "dataset schema JSON file");
    sc->task_opt = screen_cmd->add_option("--task", sc->task, "auto|regression|classification");
    sc->k_opt = screen_cmd->add_option("--K", sc->K, "number of latent groups");
    sc->cand_opt = screen_cmd->add_option(
        "--candidates", sc->candidates,
        "semicolon-separated column sets, e.g. 0,1;2;3,4 (indices into the numeric predictor "
        "block: sensitive-continuous then other)");
    sc->eps_opt = screen_cmd->add_option("--epsilon", sc->epsilon, "regression constraint level");
    sc->lam_opt = screen_cmd->add_option("--lambda", sc->lambda, "classification penalty weight");
    sc->delta_opt = screen_cmd->add_option("--delta", sc->delta, "penalty smoothing constant");
    sc->max_opt = screen_cmd->add_flag("--maximize", sc->maximize,
                                       "maximize the classification criterion instead");
    sc->floor_opt = screen_cmd->add_flag("--accuracy-floor", sc->floor,
                                         "reject candidates whose error exceeds best + tau");
    sc->tau_opt = screen_cmd->add_option("--tau", sc->tau, "accuracy floor slack");
    screen_cmd->callback([&g, sc] {
        finish_globals(g);
        cfg(sc->schema_opt, "schema", sc->schema_path);
        cfg(sc->task_opt, "task", sc->task);
        cfg(sc->k_opt, "K", sc->K);
        cfg(sc->cand_opt, "candidates", sc->candidates);
        cfg(sc->eps_opt, "epsilon", sc->epsilon);
        cfg(sc->lam_opt, "lambda", sc->lambda);
        cfg(sc->delta_opt, "delta", sc->delta);
        cfg(sc->max_opt, "maximize", sc->maximize);
        cfg(sc->floor_opt, "accuracy-floor", sc->floor);
        cfg(sc->tau_opt, "tau", sc->tau);
        if (sc->schema_path.empty()) throw SchemaError("screen: --schema is required");
        if (sc->candidates.empty()) throw SchemaError("screen: --candidates is required");

        const fairmix::DatasetSchema schema = fairmix::schema_from_json(read_file(sc->schema_path));
        const fairmix::DesignPartition part = fairmix::load_csv(schema);
        const Eigen::MatrixXd X = numeric_predictors(part.train);
        const Eigen::VectorXd& y = part.train.y;
        std::string task = sc->task;
        if (task == "auto") {
            bool binary = true;
            for (Eigen::Index i = 0; i < y.size(); ++i)
                if (y(i) != 0.0 && y(i) != 1.0) binary = false;
            task = binary ? "classification" : "regression";
        }
        fairmix::ScreenConfig cfgs;
        cfgs.epsilon = sc->epsilon;
        cfgs.lambda = sc->lambda;
        cfgs.delta = sc->delta;
        cfgs.maximize_criterion = sc->maximize;
        cfgs.use_accuracy_floor = sc->floor;
        cfgs.accuracy_floor_tau = sc->tau;
        cfgs.seed = g.seed;
        cfgs.em = sc->em;
        const auto results = fairmix::screen_predictors(
            X, y, parse_candidates(sc->candidates),
            task == "regression" ? fairmix::TradeoffTask::regression
                                 : fairmix::TradeoffTask::classification,
            sc->K, cfgs);

        // ranked table: chosen first, then by criterion in scoring order, failures last
        std::vector<fairmix::ScreeningResult> ranked = results;
        const bool descending = task == "regression" || sc->maximize;
        std::sort(ranked.begin(), ranked.end(),
                  [descending](const fairmix::ScreeningResult& a,
                               const fairmix::ScreeningResult& b) {
                      if (a.failed != b.failed) return !a.failed;
                      if (a.chosen != b.chosen) return a.chosen;
                      return descending ? a.criterion > b.criterion : a.criterion < b.criterion;
                  });
        ordered_json j;
        j["task"] = task;
        ordered_json arr = ordered_json::array();
        for (const auto& r : ranked) {
            ordered_json rj;
            rj["candidate_id"] = r.candidate_id;
            rj["columns"] = r.columns;
            rj["criterion"] = num_or_null(r.criterion);
            rj["error_rate"] = num_or_null(r.error_rate);
            rj["chosen"] = r.chosen;
            rj["failed"] = r.failed;
            rj["warnings"] = r.warnings;
            arr.push_back(rj);
        }
        j["results"] = arr;
        const std::string path = write_out(g.out_dir, "screening.json", j.dump(2) + "\n");
        for (const auto& r : ranked)
            if (r.chosen) {
                std::cout << "chosen candidate " << r.candidate_id << " criterion " << r.criterion
                          << "\n";
            }
        std::cout << "report: " << path << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitSchema;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const fairmix::TooLargeError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const fairmix::UndefinedMetricError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const fairmix::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return g_exit;
}

#include "fairmix/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fairmix/errors.hpp"
#include "fairmix/fair_linear.hpp"
#include "fairmix/fair_logistic.hpp"
#include "fairmix/metrics.hpp"
#include "fairmix/residualize.hpp"
#include "fairmix/rng.hpp"
#include "fairmix/theory.hpp"

namespace fairmix {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_keys(const Scenario& scn, const std::set<std::string>& allowed) {
    for (const auto& [key, val] : scn.params) {
        (void)val;
        if (!allowed.count(key)) {
            throw SchemaError("scenario '" + scn.name + "': unknown parameter '" + key + "'");
        }
    }
}

double param(const Scenario& scn, const std::string& key, double fallback) {
    const auto it = scn.params.find(key);
    return it == scn.params.end() ? fallback : it->second;
}

Eigen::Index scenario_n(const Scenario& scn, Eigen::Index fallback) {
    const Eigen::Index n = scn.n > 0 ? scn.n : fallback;
    if (n < 2) throw SchemaError("scenario '" + scn.name + "': n must be at least 2");
    return n;
}

int replicate_count(const Scenario& scn, int fallback) {
    const double r = param(scn, "replicates", fallback);
    if (r < 1.0 || r != std::floor(r)) {
        throw SchemaError("scenario '" + scn.name + "': replicates must be a positive integer");
    }
    return static_cast<int>(r);
}

// lower Cholesky factor of [[1,.5],[.5,1]]
void draw_bivariate(Rng& rng, double mx, double my, double* zx, double* zy) {
    const double n1 = rng.next_normal();
    const double n2 = rng.next_normal();
    *zx = mx + n1;
    *zy = my + 0.5 * n1 + std::sqrt(0.75) * n2;
}

struct SharedPredictorConfig {
    Eigen::Index n_uniform;
    bool logistic_response;
};

// common §-style four-predictor block: two bivariate mixtures tied to one
// binary attribute, then independent uniforms, then the response
PredictorsDraw draw_predictors(const Scenario& scn, double mu, double kfac,
                               const SharedPredictorConfig& cfg) {
    const Eigen::Index n = scenario_n(scn, cfg.logistic_response ? 1000 : 100);
    Rng rng = Rng(scn.seed).split(scn.name);
    PredictorsDraw out;
    out.group.resize(n);
    out.Z.resize(n, 4 + cfg.n_uniform);
    out.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int a = rng.next_double() < 0.7 ? 1 : 0;
        out.group(i) = a;
        double z1, z2, z3, z4;
        draw_bivariate(rng, a == 1 ? mu : 0.0, 0.0, &z1, &z2);
        draw_bivariate(rng, a == 1 ? kfac * mu : 0.0, 0.0, &z3, &z4);
        out.Z(i, 0) = z1;
        out.Z(i, 1) = z2;
        out.Z(i, 2) = z3;
        out.Z(i, 3) = z4;
        for (Eigen::Index j = 0; j < cfg.n_uniform; ++j) {
            out.Z(i, 4 + j) = rng.next_uniform(-2.0, 2.0);
        }
        if (cfg.logistic_response) {
            const double eta =
                1.0 + out.Z(i, 0) + out.Z(i, 1) + out.Z(i, 4) + out.Z(i, 5) + out.Z(i, 6);
            const double pi = 1.0 / (1.0 + std::exp(-eta));
            out.y(i) = rng.next_double() < pi ? 1.0 : 0.0;
        } else {
            out.y(i) = out.Z(i, 0) + out.Z(i, 1) + out.Z(i, 4) + out.Z(i, 5) +
                       0.5 * rng.next_normal();
        }
    }
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_csv(const std::vector<ScenarioRow>& rows) {
    std::string out = "tuning,accuracy,fairness,accuracy_se,fairness_se\n";
    for (const ScenarioRow& r : rows) {
        out += fmt17(r.tuning) + "," + fmt17(r.accuracy) + "," + fmt17(r.fairness) + "," +
               fmt17(r.accuracy_se) + "," + fmt17(r.fairness_se) + "\n";
    }
    return out;
}

struct Welford {
    double sum = 0.0;
    double sumsq = 0.0;
    long count = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++count;
    }
    double mean() const {
        return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
    }
    double se() const {
        if (count < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - count * m * m) / (count - 1));
        return std::sqrt(var / count);
    }
};

CategoricalMixtureParams binary_cat_params(double p, const Eigen::Vector3d& th1,
                                           const Eigen::Vector3d& th2) {
    CategoricalMixtureParams params;
    params.mixing = Eigen::Vector2d(p, 1.0 - p);
    params.probs.resize(2);
    for (int d = 0; d < 3; ++d) {
        params.probs[0].push_back(Eigen::Vector2d(1.0 - th1(d), th1(d)));
        params.probs[1].push_back(Eigen::Vector2d(1.0 - th2(d), th2(d)));
    }
    return params;
}

void theta_config(int config, Eigen::Vector3d* th1, Eigen::Vector3d* th2) {
    if (config == 1) {
        *th1 = Eigen::Vector3d(0.2, 0.6, 0.2);
        *th2 = Eigen::Vector3d(0.4, 0.3, 0.5);
    } else if (config == 2) {
        *th1 = Eigen::Vector3d(0.5, 0.6, 0.4);
        *th2 = *th1;
    } else {
        throw SchemaError("categorical scenario: config must be 1 or 2");
    }
}

}  // namespace

GaussianUniDraw gen_gaussian_uni(const Scenario& scn) {
    check_keys(scn, {"mu_min", "replicates"});
    const double mu_min = param(scn, "mu_min", -1.0);
    if (!(mu_min >= 0.0)) throw SchemaError("gaussian-uni: mu_min must be nonnegative");
    const Eigen::Index n = scenario_n(scn, 1000);
    const std::vector<double> mixing = {0.2, 0.3, 0.5};
    const double means[3] = {0.0, mu_min, 2.0 * mu_min + 1.0};
    Rng rng = Rng(scn.seed).split(scn.name);
    GaussianUniDraw out;
    out.labels.resize(n);
    out.x.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int k = rng.next_categorical(mixing);
        out.labels(i) = k + 1;
        out.x(i) = means[k] + rng.next_normal();
    }
    return out;
}

CategoricalDraw gen_categorical(const Scenario& scn) {
    check_keys(scn, {"p", "config", "replicates"});
    const double p = param(scn, "p", 0.5);
    if (!(p > 0.0 && p < 1.0)) throw SchemaError("categorical: p must lie in (0,1)");
    const int config = static_cast<int>(param(scn, "config", 1.0));
    Eigen::Vector3d th1, th2;
    theta_config(config, &th1, &th2);
    const Eigen::Index n = scenario_n(scn, 10000);
    Rng rng = Rng(scn.seed).split(scn.name);
    CategoricalDraw out;
    out.labels.resize(n);
    out.levels.resize(n, 3);
    out.arities = {2, 2, 2};
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool first = rng.next_double() < p;
        out.labels(i) = first ? 1 : 2;
        const Eigen::Vector3d& th = first ? th1 : th2;
        for (int d = 0; d < 3; ++d) {
            out.levels(i, d) = rng.next_double() < th(d) ? 2 : 1;
        }
    }
    return out;
}

R2Draw gen_r2_scenario(const Scenario& scn) {
    check_keys(scn, {"mu", "replicates"});
    const double mu = param(scn, "mu", 6.0);
    const Eigen::Index n = scenario_n(scn, 100000);
    const double sigma_e = std::sqrt(2.0);
    Rng rng = Rng(scn.seed).split(scn.name);
    R2Draw out;
    out.group.resize(n);
    out.xa.resize(n);
    out.xz.resize(n, 2);
    out.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int a = rng.next_double() < 0.7 ? 1 : 0;
        out.group(i) = a;
        out.xa(i) = mu * a + sigma_e * rng.next_normal();
        out.xz(i, 0) = rng.next_double();
        out.xz(i, 1) = rng.next_double();
        out.y(i) = 1.0 + out.xa(i) + out.xz(i, 0) + out.xz(i, 1) + 0.5 * rng.next_normal();
    }
    return out;
}

PredictorsDraw gen_ls_scenario(const Scenario& scn) {
    check_keys(scn, {"mu", "k", "replicates"});
    return draw_predictors(scn, param(scn, "mu", 2.0), param(scn, "k", 2.0),
                           {100, false});
}

PredictorsDraw gen_logistic_scenario(const Scenario& scn) {
    check_keys(scn, {"mu", "k", "replicates"});
    return draw_predictors(scn, param(scn, "mu", 6.0), param(scn, "k", 2.0),
                           {96, true});
}

CatClassifyDraw gen_cat_classify_scenario(const Scenario& scn) {
    check_keys(scn, {"setting", "replicates"});
    const int setting = static_cast<int>(param(scn, "setting", 1.0));
    if (setting != 1 && setting != 2) {
        throw SchemaError("cat-classify: setting must be 1 or 2");
    }
    const Eigen::Index n = scenario_n(scn, 1000);
    const Eigen::Vector3d th1(0.1, 0.9, 0.5);
    const Eigen::Vector3d th2(0.4, 0.7, 0.5);
    const double b0 = setting == 1 ? -1.0 : -4.0;
    const Eigen::Vector3d bx = setting == 1 ? Eigen::Vector3d(4.0, -1.0, -1.0)
                                            : Eigen::Vector3d(1.0, -1.0, 4.0);
    Rng rng = Rng(scn.seed).split(scn.name);
    CatClassifyDraw out;
    out.labels.resize(n);
    out.levels.resize(n, 3);
    out.arities = {2, 2, 2};
    out.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool first = rng.next_double() < 0.5;
        out.labels(i) = first ? 1 : 2;
        const Eigen::Vector3d& th = first ? th1 : th2;
        double eta = b0;
        for (int d = 0; d < 3; ++d) {
            const int x = rng.next_double() < th(d) ? 1 : 0;
            out.levels(i, d) = x + 1;
            eta += bx(d) * x;
        }
        const double pi = 1.0 / (1.0 + std::exp(-eta));
        out.y(i) = rng.next_double() < pi ? 1.0 : 0.0;
    }
    return out;
}

double permuted_misclassification(const Eigen::VectorXi& truth, const Eigen::VectorXi& pred,
                                  int K) {
    if (truth.size() != pred.size()) {
        throw std::invalid_argument("permuted_misclassification: length mismatch");
    }
    if (K < 1 || K > 8) throw std::invalid_argument("permuted_misclassification: K out of range");
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 1);
    double best = 1.0;
    do {
        long wrong = 0;
        for (Eigen::Index i = 0; i < truth.size(); ++i) {
            if (perm[static_cast<std::size_t>(pred(i) - 1)] != truth(i)) ++wrong;
        }
        best = std::min(best, static_cast<double>(wrong) / truth.size());
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

ScenarioTable run_scenario(const Scenario& scn, const std::vector<double>& grid) {
    ScenarioTable table;
    ordered_json manifest;
    manifest["scenario"] = scn.name;
    manifest["seed"] = scn.seed;
    manifest["grid"] = grid;
    std::vector<std::string> notes;

    Rng root = Rng(scn.seed).split(scn.name).split("run");

    auto em_seed = [&](Eigen::Index r) { return root.split("em").split(r).next_u64(); };
    auto data_seed = [&](Eigen::Index r) { return root.split("data").split(r).next_u64(); };

    if (scn.name == "gaussian-uni") {
        check_keys(scn, {"replicates"});
        const int R = replicate_count(scn, 10);
        const Eigen::Index n = scenario_n(scn, 1000);
        manifest["n"] = n;
        manifest["replicates"] = R;
        manifest["tuning_axis"] = "mu_min";
        manifest["accuracy_column"] = "mean posterior-mode misclassification after EM";
        manifest["fairness_column"] = "population misclassification of the formula classifier";
        for (const double mu_min : grid) {
            Welford acc;
            for (int r = 0; r < R; ++r) {
                Scenario sub = scn;
                sub.n = n;
                sub.seed = data_seed(r);
                sub.params["mu_min"] = mu_min;
                const GaussianUniDraw d = gen_gaussian_uni(sub);
                EmConfig em;
                em.seed = em_seed(r);
                const auto fit = fit_gaussian_em(d.x, 3, em);
                acc.add(permuted_misclassification(d.labels, map_classify(fit.posterior), 3));
            }
            const Eigen::Vector3d mus(0.0, mu_min, 2.0 * mu_min + 1.0);
            const double theory =
                1.0 - gaussian_accuracy_uni(mus, 1.0, Eigen::Vector3d(0.2, 0.3, 0.5));
            table.rows.push_back({mu_min, acc.mean(), theory, acc.se(), 0.0});
        }
    } else if (scn.name == "categorical") {
        check_keys(scn, {"config", "replicates"});
        const int R = replicate_count(scn, 1);
        const Eigen::Index n = scenario_n(scn, 10000);
        const int config = static_cast<int>(param(scn, "config", 1.0));
        Eigen::Vector3d th1, th2;
        theta_config(config, &th1, &th2);
        manifest["n"] = n;
        manifest["replicates"] = R;
        manifest["config"] = config;
        manifest["tuning_axis"] = "p";
        manifest["accuracy_column"] = "empirical accuracy of the known-parameter posterior mode";
        manifest["fairness_column"] = "population accuracy formula";
        for (const double p : grid) {
            const CategoricalMixtureParams params = binary_cat_params(p, th1, th2);
            Welford acc;
            for (int r = 0; r < R; ++r) {
                Scenario sub = scn;
                sub.n = n;
                sub.seed = data_seed(r);
                sub.params["p"] = p;
                const CategoricalDraw d = gen_categorical(sub);
                const Eigen::MatrixXd post = posterior_matrix(params, d.levels);
                const Eigen::VectorXi hat = map_classify(GroupPosterior{post});
                acc.add((hat.array() == d.labels.array()).cast<double>().mean());
            }
            table.rows.push_back({p, acc.mean(), categorical_accuracy(params), acc.se(), 0.0});
        }
    } else if (scn.name == "r2") {
        check_keys(scn, {"mu", "replicates"});
        const int R = replicate_count(scn, 20);
        const double mu = param(scn, "mu", 6.0);
        manifest["replicates"] = R;
        manifest["mu"] = mu;
        manifest["tuning_axis"] = "n";
        manifest["accuracy_column"] = "mean empirical R_a^2 from residual regression";
        manifest["fairness_column"] = "population R_a^2";
        R2Inputs inp;
        inp.beta_a = Eigen::VectorXd::Constant(1, 1.0);
        inp.beta_z = Eigen::VectorXd::Constant(2, 1.0);
        inp.mu = Eigen::MatrixXd(2, 1);
        inp.mu << 0.0, mu;
        const Eigen::Vector2d mix(0.3, 0.7);
        inp.sigma_A = mix.asDiagonal().toDenseMatrix() - mix * mix.transpose();
        inp.sigma_e = Eigen::MatrixXd::Constant(1, 1, 2.0);
        inp.sigma_xz = Eigen::Vector2d::Constant(1.0 / 12.0).asDiagonal();
        inp.sigma_12 = Eigen::MatrixXd::Zero(1, 2);
        inp.sigma_eps2 = 0.25;
        const double theory = r2_general(inp).second;
        for (const double nval : grid) {
            if (nval < 10 || nval != std::floor(nval)) {
                throw SchemaError("r2 scenario: grid entries are sample sizes >= 10");
            }
            Welford r2emp;
            for (int r = 0; r < R; ++r) {
                Scenario sub = scn;
                sub.n = static_cast<Eigen::Index>(nval);
                sub.seed = data_seed(r);
                const R2Draw d = gen_r2_scenario(sub);
                const Eigen::Index n = d.y.size();
                Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, 2);
                for (Eigen::Index i = 0; i < n; ++i) onehot(i, d.group(i)) = 1.0;
                Eigen::MatrixXd X(n, 3);
                X.col(0) = d.xa;
                X.rightCols(2) = d.xz;
                const ResidualizedDesign rd = residualize(X, GroupPosterior{onehot});
                Eigen::MatrixXd design(n, 4);
                design.col(0).setOnes();
                design.rightCols(3) = rd.residuals;
                const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(d.y);
                const double sse = (d.y - design * coef).squaredNorm();
                const double sst = (d.y.array() - d.y.mean()).square().sum();
                r2emp.add(sst > 0.0 ? 1.0 - sse / sst : 0.0);
            }
            table.rows.push_back({nval, r2emp.mean(), theory, r2emp.se(), 0.0});
        }
    } else if (scn.name == "ls" || scn.name == "logistic") {
        const bool is_ls = scn.name == "ls";
        check_keys(scn, {"mu", "k", "replicates"});
        const int R = replicate_count(scn, 10);
        const double mu = param(scn, "mu", is_ls ? 2.0 : 6.0);
        const double kfac = param(scn, "k", 2.0);
        const Eigen::Index n = scenario_n(scn, is_ls ? 100 : 1000);
        manifest["n"] = n;
        manifest["replicates"] = R;
        manifest["mu"] = mu;
        manifest["k"] = kfac;
        manifest["tuning_axis"] = is_ls ? "epsilon" : "lambda";
        manifest["accuracy_column"] = is_ls ? "mean SSE/SST" : "mean misclassification rate";
        manifest["fairness_column"] =
            is_ls ? "mean R^2 of predictions given the posterior block" : "mean MD over predicted classes";
        notes.push_back("design uses the response-relevant predictor columns; the mixture is "
                        "fitted on the first predictor with K=2");
        if (!is_ls) notes.push_back("md is computed on predicted classes");
        std::vector<Welford> acc(grid.size());
        std::vector<Welford> fair(grid.size());
        for (int r = 0; r < R; ++r) {
            Scenario sub = scn;
            sub.n = n;
            sub.seed = data_seed(r);
            const PredictorsDraw d =
                is_ls ? gen_ls_scenario(sub) : gen_logistic_scenario(sub);
            EmConfig em;
            em.seed = em_seed(r);
            GaussianMixtureFit mix;
            try {
                mix = fit_gaussian_em(d.Z.col(0), 2, em);
            } catch (const std::exception& e) {
                notes.push_back("replicate " + std::to_string(r) +
                                " mixture fit failed: " + e.what());
                continue;
            }
            const std::vector<Eigen::Index> cols =
                is_ls ? std::vector<Eigen::Index>{0, 1, 4, 5}
                      : std::vector<Eigen::Index>{0, 1, 4, 5, 6};
            Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c) {
                X.col(static_cast<Eigen::Index>(c)) = d.Z.col(cols[c]);
            }
            const ResidualizedDesign rd = residualize(X, mix.posterior);
            const double sst = (d.y.array() - d.y.mean()).square().sum();
            for (std::size_t g = 0; g < grid.size(); ++g) {
                try {
                    if (is_ls) {
                        const FairLinearFit fit =
                            fit_fair_ls(d.y, mix.posterior, rd.residuals, grid[g]);
                        acc[g].add(sst > 0.0 ? fit.sse / sst : 0.0);
                        fair[g].add(fit.r2_given_A);
                    } else {
                        const FairLogisticFit fit =
                            fit_fair_logistic(d.y, mix.posterior, rd.residuals, grid[g]);
                        const Eigen::VectorXd pi =
                            predict_logistic_batch(fit, mix.posterior, rd.residuals);
                        Eigen::VectorXd cls(n);
                        for (Eigen::Index i = 0; i < n; ++i) cls(i) = pi(i) >= 0.5 ? 1.0 : 0.0;
                        acc[g].add((cls.array() != d.y.array()).cast<double>().mean());
                        fair[g].add(mean_distance(mix.posterior, cls));
                    }
                } catch (const std::exception& e) {
                    notes.push_back("replicate " + std::to_string(r) + " tuning " +
                                    fmt17(grid[g]) + " failed: " + e.what());
                }
            }
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            table.rows.push_back({grid[g], acc[g].mean(), fair[g].mean(), acc[g].se(), fair[g].se()});
        }
    } else if (scn.name == "cat-classify") {
        check_keys(scn, {"setting", "replicates"});
        const int R = replicate_count(scn, 20);
        const int setting = static_cast<int>(param(scn, "setting", 1.0));
        const Eigen::Index n = scenario_n(scn, 1000);
        manifest["n"] = n;
        manifest["replicates"] = R;
        manifest["setting"] = setting;
        manifest["tuning_axis"] = "lambda";
        manifest["accuracy_column"] = "mean misclassification rate";
        manifest["fairness_column"] = "mean MD over predicted classes";
        notes.push_back("md is computed on predicted classes");
        std::vector<Welford> acc(grid.size());
        std::vector<Welford> fair(grid.size());
        for (int r = 0; r < R; ++r) {
            Scenario sub = scn;
            sub.n = n;
            sub.seed = data_seed(r);
            sub.params["setting"] = setting;
            const CatClassifyDraw d = gen_cat_classify_scenario(sub);
            EmConfig em;
            em.seed = em_seed(r);
            CategoricalMixtureFit mix;
            try {
                mix = fit_categorical_em(d.levels, d.arities, 2, em);
            } catch (const std::exception& e) {
                notes.push_back("replicate " + std::to_string(r) +
                                " mixture fit failed: " + e.what());
                continue;
            }
            const Eigen::MatrixXd X = (d.levels.cast<double>().array() - 1.0).matrix();
            const ResidualizedDesign rd = residualize(X, mix.posterior);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                try {
                    const FairLogisticFit fit =
                        fit_fair_logistic(d.y, mix.posterior, rd.residuals, grid[g]);
                    const Eigen::VectorXd pi =
                        predict_logistic_batch(fit, mix.posterior, rd.residuals);
                    Eigen::VectorXd cls(n);
                    for (Eigen::Index i = 0; i < n; ++i) cls(i) = pi(i) >= 0.5 ? 1.0 : 0.0;
                    acc[g].add((cls.array() != d.y.array()).cast<double>().mean());
                    fair[g].add(mean_distance(mix.posterior, cls));
                } catch (const std::exception& e) {
                    notes.push_back("replicate " + std::to_string(r) + " tuning " +
                                    fmt17(grid[g]) + " failed: " + e.what());
                }
            }
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            table.rows.push_back({grid[g], acc[g].mean(), fair[g].mean(), acc[g].se(), fair[g].se()});
        }
    } else {
        throw SchemaError("unknown scenario '" + scn.name + "'");
    }

    manifest["params"] = ordered_json::object();
    for (const auto& [key, val] : scn.params) manifest["params"][key] = val;
    manifest["notes"] = notes;
    manifest["columns"] = {"tuning", "accuracy", "fairness", "accuracy_se", "fairness_se"};
    table.csv = render_csv(table.rows);
    table.manifest = manifest.dump(2) + "\n";
    return table;
}

}  // namespace fairmix

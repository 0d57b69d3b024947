#include "fairmix/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "fairmix/errors.hpp"
#include "fairmix/normal.hpp"
#include "fairmix/rng.hpp"

namespace fairmix {

namespace {

void require_mc_size(Eigen::Index n) {
    if (n < 10000) {
        throw std::invalid_argument("mc_classification_accuracy: need at least 1e4 draws");
    }
}

std::pair<double, double> hit_rate(long hits, Eigen::Index n) {
    const double est = static_cast<double>(hits) / static_cast<double>(n);
    const double shrunk = (static_cast<double>(hits) + 0.5) / (static_cast<double>(n) + 1.0);
    return {est, std::sqrt(shrunk * (1.0 - shrunk) / static_cast<double>(n))};
}

int draw_component(Rng& rng, const Eigen::VectorXd& mixing) {
    const double u = rng.next_double() * mixing.sum();
    double acc = 0.0;
    for (int k = 0; k < mixing.size(); ++k) {
        acc += mixing(k);
        if (u < acc) return k;
    }
    return static_cast<int>(mixing.size()) - 1;
}

}  // namespace

std::string hash_inputs(const std::vector<double>& inputs) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix_byte = [&](unsigned char b) {
        h ^= b;
        h *= 0x100000001b3ull;
    };
    char buf[40];
    for (const double v : inputs) {
        const int len = std::snprintf(buf, sizeof buf, "%.17g;", v);
        for (int i = 0; i < len; ++i) mix_byte(static_cast<unsigned char>(buf[i]));
    }
    const int len = std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, buf + len);
}

std::pair<double, double> mc_classification_accuracy(const GaussianMixtureParams& params,
                                                     Eigen::Index n, std::uint64_t seed) {
    require_mc_size(n);
    const int K = static_cast<int>(params.mixing.size());
    const auto p = params.means.cols();
    Eigen::LLT<Eigen::MatrixXd> llt(params.cov);
    if (llt.info() != Eigen::Success) {
        throw NumericError("mc_classification_accuracy: covariance not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    Rng rng = Rng(seed).split("mc-gaussian");
    long hits = 0;
    Eigen::VectorXd z(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int k = draw_component(rng, params.mixing);
        for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.next_normal();
        const Eigen::VectorXd x = params.means.row(k).transpose() + L * z;
        // discriminant log p_k - 0.5 * (x-mu_k)' Sigma^{-1} (x-mu_k)
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < K; ++c) {
            const Eigen::VectorXd diff = x - params.means.row(c).transpose();
            const double quad = llt.solve(diff).dot(diff);
            const double score = std::log(params.mixing(c)) - 0.5 * quad;
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        if (best == k) ++hits;
    }
    return hit_rate(hits, n);
}

std::pair<double, double> mc_classification_accuracy(const CategoricalMixtureParams& params,
                                                     Eigen::Index n, std::uint64_t seed) {
    require_mc_size(n);
    const int K = static_cast<int>(params.mixing.size());
    const std::size_t D = params.probs.empty() ? 0 : params.probs[0].size();
    Rng rng = Rng(seed).split("mc-categorical");
    long hits = 0;
    std::vector<int> cell(D);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int k = draw_component(rng, params.mixing);
        for (std::size_t d = 0; d < D; ++d) {
            const Eigen::VectorXd& pr = params.probs[static_cast<std::size_t>(k)][d];
            const double u = rng.next_double();
            double acc = 0.0;
            int lev = static_cast<int>(pr.size()) - 1;
            for (int l = 0; l < pr.size(); ++l) {
                acc += pr(l);
                if (u < acc) {
                    lev = l;
                    break;
                }
            }
            cell[d] = lev;
        }
        int best = 0;
        double best_mass = -1.0;
        for (int c = 0; c < K; ++c) {
            double mass = params.mixing(c);
            for (std::size_t d = 0; d < D; ++d) {
                mass *= params.probs[static_cast<std::size_t>(c)][d](cell[d]);
            }
            if (mass > best_mass) {
                best_mass = mass;
                best = c;
            }
        }
        if (best == k) ++hits;
    }
    return hit_rate(hits, n);
}

namespace {

// depth-first over predictors; joint carries p_k * prod theta over the prefix
double dfs_cells(const CategoricalMixtureParams& params, std::size_t d,
                 std::vector<double>& joint) {
    const std::size_t D = params.probs[0].size();
    const int K = static_cast<int>(params.mixing.size());
    if (d == D) {
        int winner = 0;
        for (int c = 1; c < K; ++c) {
            if (joint[static_cast<std::size_t>(c)] > joint[static_cast<std::size_t>(winner)]) {
                winner = c;
            }
        }
        return joint[static_cast<std::size_t>(winner)];
    }
    const int m = static_cast<int>(params.probs[0][d].size());
    double total = 0.0;
    for (int lev = 0; lev < m; ++lev) {
        std::vector<double> next(joint);
        for (int c = 0; c < K; ++c) {
            next[static_cast<std::size_t>(c)] *= params.probs[static_cast<std::size_t>(c)][d](lev);
        }
        total += dfs_cells(params, d + 1, next);
    }
    return total;
}

}  // namespace

double enumerate_categorical_accuracy(const CategoricalMixtureParams& params, std::uint64_t cap) {
    const int K = static_cast<int>(params.mixing.size());
    if (K < 1 || params.probs.size() != static_cast<std::size_t>(K)) {
        throw std::invalid_argument("enumerate_categorical_accuracy: malformed parameters");
    }
    const std::size_t D = params.probs[0].size();
    std::uint64_t cells = 1;
    for (std::size_t d = 0; d < D; ++d) {
        const std::uint64_t m = static_cast<std::uint64_t>(params.probs[0][d].size());
        if (m == 0 || cells > cap / m) {
            throw TooLargeError("enumerate_categorical_accuracy: cell count exceeds cap");
        }
        cells *= m;
    }
    std::vector<double> joint(static_cast<std::size_t>(K));
    for (int c = 0; c < K; ++c) joint[static_cast<std::size_t>(c)] = params.mixing(c);
    return dfs_cells(params, 0, joint);
}

double gaussian_threshold_accuracy(const Eigen::Vector2d& mus, double sigma,
                                   const Eigen::Vector2d& mixing) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_threshold_accuracy: sigma <= 0");
    if (!(mixing(0) > 0.0 && mixing(1) > 0.0 &&
          std::abs(mixing.sum() - 1.0) < 1e-8)) {
        throw std::invalid_argument("gaussian_threshold_accuracy: mixing must be a 2-simplex point");
    }
    if (mus(0) == mus(1)) return mixing.maxCoeff();
    const double mid = 0.5 * (mus(0) + mus(1));
    const double thr = mid + sigma * sigma * std::log(mixing(1) / mixing(0)) / (mus(0) - mus(1));
    const double lo_side = norm_cdf((thr - mus(0)) / sigma);
    const double hi_side = 1.0 - norm_cdf((thr - mus(1)) / sigma);
    // the smaller-mean component wins below the threshold
    if (mus(0) < mus(1)) return mixing(0) * lo_side + mixing(1) * hi_side;
    return mixing(0) * (1.0 - lo_side) + mixing(1) * (1.0 - hi_side);
}

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be positive");
    Eigen::VectorXd g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Eigen::VectorXd hi = x;
        Eigen::VectorXd lo = x;
        hi(j) += h;
        lo(j) -= h;
        g(j) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

namespace {

struct ScanContext {
    Eigen::MatrixXd Ared;  // centered posterior block, last column dropped
    Eigen::MatrixXd Uc;
    Eigen::VectorXd yc;
    Eigen::MatrixXd GA;
    Eigen::MatrixXd GU;
    Eigen::VectorXd cA;
    Eigen::VectorXd cU;
    double epsilon = 0.0;
};

struct ScanPoint {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    double slack = 0.0;  // constraint value; feasible when <= tolerance
    double sse = 0.0;
};

ScanPoint solve_at(const ScanContext& ctx, double t) {
    const double sa = 1.0 + t * (1.0 - ctx.epsilon);
    const double su = 1.0 - t * ctx.epsilon;
    ScanPoint pt;
    pt.a = (ctx.GA * sa).ldlt().solve(ctx.cA);
    pt.b = ctx.GU.rows() > 0 ? (ctx.GU * su).ldlt().solve(ctx.cU).eval()
                             : Eigen::VectorXd(0).eval();
    const double qa = pt.a.dot(ctx.GA * pt.a);
    const double qu = ctx.GU.rows() > 0 ? pt.b.dot(ctx.GU * pt.b) : 0.0;
    pt.slack = (1.0 - ctx.epsilon) * qa - ctx.epsilon * qu;
    Eigen::VectorXd resid = ctx.yc - ctx.Ared * pt.a;
    if (ctx.Uc.cols() > 0) resid -= ctx.Uc * pt.b;
    pt.sse = resid.squaredNorm();
    return pt;
}

}  // namespace

DualScanResult dual_scan_fair_ls(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                                 const Eigen::MatrixXd& U, double epsilon, int grid_size) {
    const auto n = y.size();
    const int K = A_hat.k();
    if (A_hat.probs.rows() != n || U.rows() != n) {
        throw std::invalid_argument("dual_scan_fair_ls: row counts differ");
    }
    if (grid_size < 1000) throw std::invalid_argument("dual_scan_fair_ls: grid_size below 1e3");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("dual_scan_fair_ls: epsilon outside [0,1]");
    }

    ScanContext ctx;
    ctx.epsilon = epsilon;
    ctx.yc = y.array() - y.mean();
    const Eigen::MatrixXd Acfull =
        A_hat.probs.rowwise() - A_hat.probs.colwise().mean().eval();
    ctx.Ared = Acfull.leftCols(K - 1);
    ctx.Uc = U.rowwise() - U.colwise().mean().eval();
    ctx.GA = ctx.Ared.transpose() * ctx.Ared / static_cast<double>(n);
    ctx.GU = ctx.Uc.transpose() * ctx.Uc / static_cast<double>(n);
    ctx.cA = ctx.Ared.transpose() * ctx.yc / static_cast<double>(n);
    ctx.cU = ctx.Uc.transpose() * ctx.yc / static_cast<double>(n);

    DualScanResult out;

    if (epsilon == 0.0) {
        out.alpha_reduced = Eigen::VectorXd::Zero(K - 1);
        out.beta = ctx.GU.rows() > 0 ? ctx.GU.ldlt().solve(ctx.cU).eval()
                                     : Eigen::VectorXd(0).eval();
        Eigen::VectorXd resid = ctx.yc;
        if (ctx.Uc.cols() > 0) resid -= ctx.Uc * out.beta;
        out.sse = resid.squaredNorm();
        out.multiplier = 0.0;
        return out;
    }

    const double feas_tol = 1e-11 * (1.0 + ctx.yc.squaredNorm() / static_cast<double>(n));
    const ScanPoint at0 = solve_at(ctx, 0.0);
    if (epsilon == 1.0 || at0.slack <= feas_tol) {
        out.alpha_reduced = at0.a;
        out.beta = at0.b;
        out.sse = at0.sse;
        out.multiplier = 0.0;
        return out;
    }

    // scan toward 1/eps, keep the best feasible point and the sign bracket
    const double tmax = (1.0 - 1e-9) / epsilon;
    bool have_best = false;
    double best_sse = 0.0;
    ScanPoint best;
    double best_t = 0.0;
    double lo = 0.0;
    double hi = -1.0;
    for (int gidx = 1; gidx <= grid_size; ++gidx) {
        const double t = tmax * gidx / grid_size;
        const ScanPoint pt = solve_at(ctx, t);
        if (pt.slack <= feas_tol) {
            if (!have_best || pt.sse < best_sse) {
                have_best = true;
                best_sse = pt.sse;
                best = pt;
                best_t = t;
            }
            if (hi < 0.0) hi = t;
        } else {
            lo = t;
        }
    }
    if (hi > 0.0) {
        // tighten the multiplier at the feasibility boundary
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (solve_at(ctx, mid).slack <= feas_tol) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        const ScanPoint refined = solve_at(ctx, hi);
        if (!have_best || refined.sse < best_sse) {
            best = refined;
            best_sse = refined.sse;
            best_t = hi;
            have_best = true;
        }
    }
    if (!have_best) {
        // no stationarity point is feasible; fall back to the zeroed block
        out.alpha_reduced = Eigen::VectorXd::Zero(K - 1);
        out.beta = ctx.GU.rows() > 0 ? ctx.GU.ldlt().solve(ctx.cU).eval()
                                     : Eigen::VectorXd(0).eval();
        Eigen::VectorXd resid = ctx.yc;
        if (ctx.Uc.cols() > 0) resid -= ctx.Uc * out.beta;
        out.sse = resid.squaredNorm();
        out.multiplier = 0.0;
        return out;
    }
    out.alpha_reduced = best.a;
    out.beta = best.b;
    out.sse = best_sse;
    out.multiplier = best_t;
    return out;
}

Eigen::VectorXd irls_logistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int max_iter,
                              double tol) {
    const auto n = y.size();
    if (X.rows() != n) throw std::invalid_argument("irls_logistic: row counts differ");
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd eta = X * beta;
        const Eigen::ArrayXd pi = 1.0 / (1.0 + (-eta.array()).exp());
        const Eigen::ArrayXd w = (pi * (1.0 - pi)).max(1e-12);
        const Eigen::MatrixXd XtWX = X.transpose() * (X.array().colwise() * w).matrix();
        const Eigen::VectorXd score = X.transpose() * (y.array() - pi).matrix();
        const Eigen::VectorXd step = XtWX.ldlt().solve(score);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < tol) break;
    }
    return beta;
}

}  // namespace fairmix

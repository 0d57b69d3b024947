#include "fairmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairmix/errors.hpp"
#include "fairmix/rng.hpp"

namespace fairmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr double kRespClamp = 1e-10;
constexpr double kProbFloor = 1.1e-10;   // floor-then-renormalize keeps entries >= 1e-10
constexpr double kEmptyMass = 1e-12;

void check_mixing_k(int K, int n) {
    if (K < 1 || K > n) {
        throw std::invalid_argument("mixture fit: K must satisfy 1 <= K <= n, got K=" +
                                    std::to_string(K) + ", n=" + std::to_string(n));
    }
}

void check_finite(const Eigen::MatrixXd& x, const char* what) {
    if (!x.allFinite()) {
        throw std::invalid_argument(std::string("mixture fit: non-finite entry in ") + what);
    }
}

void check_levels(const Eigen::MatrixXi& levels, const std::vector<int>& arities) {
    if (static_cast<int>(arities.size()) != levels.cols()) {
        throw std::invalid_argument("mixture fit: arity list length must match level columns");
    }
    for (int d = 0; d < levels.cols(); ++d) {
        if (arities[d] < 2) {
            throw std::invalid_argument("mixture fit: arity of column " + std::to_string(d) +
                                        " must be >= 2, got " + std::to_string(arities[d]));
        }
        for (int i = 0; i < levels.rows(); ++i) {
            const int v = levels(i, d);
            if (v < 1 || v > arities[d]) {
                throw std::invalid_argument("mixture fit: level " + std::to_string(v) +
                                            " out of range 1.." + std::to_string(arities[d]) +
                                            " in column " + std::to_string(d));
            }
        }
    }
}

// Clamp one level-probability vector into [1e-10, 1-1e-10] and renormalize.
void clamp_simplex(Eigen::VectorXd& v) {
    v = v.cwiseMax(kProbFloor);
    v /= v.sum();
}

// ---- component families -------------------------------------------------
// A family owns its data view and component parameters (not the mixing
// weights); the EM driver owns mixing, responsibilities, and control flow.
// Families are copyable so the driver can keep the best restart.

class GaussianFamily {
public:
    GaussianFamily(const Eigen::MatrixXd& x, int K)
        : x_(&x), K_(K), means_(K, x.cols()), cov_(x.cols(), x.cols()) {}

    int n() const { return static_cast<int>(x_->rows()); }
    int n_components() const { return K_; }

    void mstep(const Eigen::MatrixXd& resp) {
        const int p = static_cast<int>(x_->cols());
        const int nn = n();
        Eigen::VectorXd mass = resp.colwise().sum().transpose();
        for (int k = 0; k < K_; ++k) {
            means_.row(k) = (resp.col(k).transpose() * (*x_)) / mass(k);
        }
        cov_.setZero();
        Eigen::MatrixXd centered(nn, p);
        for (int k = 0; k < K_; ++k) {
            centered = x_->rowwise() - means_.row(k);
            cov_.noalias() += centered.transpose() * resp.col(k).asDiagonal() * centered;
        }
        cov_ /= static_cast<double>(nn);
        refactor();
    }

    void log_density(Eigen::MatrixXd& out) const {
        const int p = static_cast<int>(x_->cols());
        const double base = -0.5 * (p * kLog2Pi + logdet_);
        for (int k = 0; k < K_; ++k) {
            Eigen::MatrixXd centered = (x_->rowwise() - means_.row(k)).transpose();  // p x n
            Eigen::MatrixXd w = llt_.matrixL().solve(centered);
            out.col(k) =
                (-0.5 * w.colwise().squaredNorm().array() + base).matrix().transpose();
        }
    }

    void reseed(int k, int row) { means_.row(k) = x_->row(row); }

    double dissimilarity(int a, int b) const {
        return (x_->row(a) - x_->row(b)).squaredNorm();
    }

    double order_key(int k) const { return means_(k, 0); }

    void apply_perm(const std::vector<int>& perm) {
        Eigen::MatrixXd m = means_;
        for (int k = 0; k < K_; ++k) means_.row(k) = m.row(perm[k]);
    }

    bool jittered() const { return jittered_; }
    void set_iteration(int it) { iter_ = it; }

    GaussianMixtureParams extract(const Eigen::VectorXd& mixing) const {
        return {mixing, means_, cov_};
    }

private:
    // Cholesky of the shared covariance; one jitter retry before giving up.
    void refactor() {
        llt_.compute(cov_);
        if (llt_.info() != Eigen::Success) {
            const double scale = cov_.trace() / static_cast<double>(cov_.rows());
            cov_ += 1e-8 * scale * Eigen::MatrixXd::Identity(cov_.rows(), cov_.cols());
            jittered_ = true;
            llt_.compute(cov_);
            if (llt_.info() != Eigen::Success) {
                throw DegenerateFitError(
                    "gaussian EM: shared covariance not positive definite after jitter", iter_);
            }
        }
        logdet_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
        if (!std::isfinite(logdet_)) {
            throw DegenerateFitError("gaussian EM: covariance log-determinant not finite", iter_);
        }
    }

    const Eigen::MatrixXd* x_;
    int K_;
    Eigen::MatrixXd means_;
    Eigen::MatrixXd cov_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double logdet_ = 0.0;
    bool jittered_ = false;
    int iter_ = 0;
};

class CategoricalFamily {
public:
    CategoricalFamily(const Eigen::MatrixXi& levels, const std::vector<int>& arities, int K)
        : levels_(&levels), arities_(arities), K_(K) {
        probs_.assign(K, {});
        for (int k = 0; k < K_; ++k) {
            probs_[k].reserve(arities.size());
            for (int a : arities) probs_[k].push_back(Eigen::VectorXd::Constant(a, 1.0 / a));
        }
    }

    int n() const { return static_cast<int>(levels_->rows()); }
    int n_components() const { return K_; }

    void mstep(const Eigen::MatrixXd& resp) {
        const int D = static_cast<int>(arities_.size());
        Eigen::VectorXd mass = resp.colwise().sum().transpose();
        for (int k = 0; k < K_; ++k) {
            for (int d = 0; d < D; ++d) {
                Eigen::VectorXd counts = Eigen::VectorXd::Zero(arities_[d]);
                for (int i = 0; i < levels_->rows(); ++i) {
                    counts((*levels_)(i, d) - 1) += resp(i, k);
                }
                probs_[k][d] = counts / mass(k);
                clamp_simplex(probs_[k][d]);
            }
        }
    }

    void log_density(Eigen::MatrixXd& out) const {
        const int D = static_cast<int>(arities_.size());
        out.setZero();
        for (int k = 0; k < K_; ++k) {
            for (int d = 0; d < D; ++d) {
                const Eigen::VectorXd logp = probs_[k][d].array().log().matrix();
                for (int i = 0; i < levels_->rows(); ++i) {
                    out(i, k) += logp((*levels_)(i, d) - 1);
                }
            }
        }
    }

    void reseed(int k, int row) {
        for (std::size_t d = 0; d < arities_.size(); ++d) {
            const int m = arities_[d];
            Eigen::VectorXd v = Eigen::VectorXd::Constant(m, m > 1 ? 0.1 / (m - 1) : 1.0);
            v((*levels_)(row, static_cast<int>(d)) - 1) = 0.9;
            clamp_simplex(v);
            probs_[k][d] = v;
        }
    }

    // Hamming distance between rows; duplicates come back 0 so seeding avoids them.
    double dissimilarity(int a, int b) const {
        double d = 0;
        for (int j = 0; j < levels_->cols(); ++j) {
            if ((*levels_)(a, j) != (*levels_)(b, j)) d += 1.0;
        }
        return d;
    }

    double order_key(int k) const { return probs_[k][0](0); }

    void apply_perm(const std::vector<int>& perm) {
        auto p = probs_;
        for (int k = 0; k < K_; ++k) probs_[k] = p[perm[k]];
    }

    void set_iteration(int) {}

    CategoricalMixtureParams extract(const Eigen::VectorXd& mixing) const {
        return {mixing, probs_};
    }

    const std::vector<std::vector<Eigen::VectorXd>>& probs() const { return probs_; }

private:
    const Eigen::MatrixXi* levels_;
    std::vector<int> arities_;
    int K_;
    std::vector<std::vector<Eigen::VectorXd>> probs_;
};

// Diagonal-Gaussian block with variances shared across components.
class DiagGaussianFamily {
public:
    DiagGaussianFamily(const Eigen::MatrixXd& x, int K)
        : x_(&x), K_(K), means_(K, x.cols()), vars_(x.cols()) {
        vars_.setOnes();
    }

    int n() const { return static_cast<int>(x_->rows()); }
    int n_components() const { return K_; }

    void mstep(const Eigen::MatrixXd& resp) {
        const int nn = n();
        Eigen::VectorXd mass = resp.colwise().sum().transpose();
        for (int k = 0; k < K_; ++k) {
            means_.row(k) = (resp.col(k).transpose() * (*x_)) / mass(k);
        }
        vars_.setZero();
        for (int k = 0; k < K_; ++k) {
            Eigen::MatrixXd centered = x_->rowwise() - means_.row(k);
            vars_ += (centered.array().square().colwise() * resp.col(k).array())
                         .colwise()
                         .sum()
                         .matrix()
                         .transpose();
        }
        vars_ /= static_cast<double>(nn);
        const double scale = vars_.sum() / static_cast<double>(vars_.size());
        if (scale <= 0.0 || !std::isfinite(scale)) {
            throw DegenerateFitError("hybrid EM: continuous variances collapsed", iter_);
        }
        vars_ = vars_.cwiseMax(1e-8 * scale);
    }

    void log_density(Eigen::MatrixXd& out) const {
        const double base = -0.5 * (x_->cols() * kLog2Pi + vars_.array().log().sum());
        const Eigen::ArrayXd inv2v = 0.5 * vars_.array().inverse();
        for (int k = 0; k < K_; ++k) {
            Eigen::MatrixXd centered = x_->rowwise() - means_.row(k);
            out.col(k) = (-(centered.array().square().rowwise() * inv2v.transpose())
                               .rowwise()
                               .sum() +
                          base)
                             .matrix();
        }
    }

    void reseed(int k, int row) { means_.row(k) = x_->row(row); }

    double dissimilarity(int a, int b) const {
        return (x_->row(a) - x_->row(b)).squaredNorm();
    }

    double order_key(int k) const { return means_(k, 0); }

    void apply_perm(const std::vector<int>& perm) {
        Eigen::MatrixXd m = means_;
        for (int k = 0; k < K_; ++k) means_.row(k) = m.row(perm[k]);
    }

    void set_iteration(int it) { iter_ = it; }

    const Eigen::MatrixXd& means() const { return means_; }
    const Eigen::VectorXd& vars() const { return vars_; }

private:
    const Eigen::MatrixXd* x_;
    int K_;
    Eigen::MatrixXd means_;
    Eigen::VectorXd vars_;
    int iter_ = 0;
};

// Product density over a categorical block (possibly D=0) and a continuous
// block (possibly M=0). With one block empty this is exactly the pure family:
// the categorical path runs the same code as fit_categorical_em.
class HybridFamily {
public:
    HybridFamily(const Eigen::MatrixXi& levels, const std::vector<int>& arities,
                 const Eigen::MatrixXd& xc, int K)
        : cat_(levels, arities, K), cont_(xc, K), has_cat_(levels.cols() > 0),
          has_cont_(xc.cols() > 0), n_(has_cat_ ? levels.rows() : xc.rows()), K_(K) {}

    int n() const { return static_cast<int>(n_); }
    int n_components() const { return K_; }

    void mstep(const Eigen::MatrixXd& resp) {
        if (has_cat_) cat_.mstep(resp);
        if (has_cont_) cont_.mstep(resp);
    }

    void log_density(Eigen::MatrixXd& out) const {
        if (has_cat_) {
            cat_.log_density(out);
            if (has_cont_) {
                Eigen::MatrixXd g(out.rows(), out.cols());
                cont_.log_density(g);
                out += g;
            }
        } else {
            cont_.log_density(out);
        }
    }

    void reseed(int k, int row) {
        if (has_cat_) cat_.reseed(k, row);
        if (has_cont_) cont_.reseed(k, row);
    }

    double dissimilarity(int a, int b) const {
        double d = 0;
        if (has_cat_) d += cat_.dissimilarity(a, b);
        if (has_cont_) d += cont_.dissimilarity(a, b);
        return d;
    }

    double order_key(int k) const {
        return has_cont_ ? cont_.order_key(k) : cat_.order_key(k);
    }

    void apply_perm(const std::vector<int>& perm) {
        if (has_cat_) cat_.apply_perm(perm);
        if (has_cont_) cont_.apply_perm(perm);
    }

    void set_iteration(int it) {
        cat_.set_iteration(it);
        cont_.set_iteration(it);
    }

    HybridMixtureParams extract(const Eigen::VectorXd& mixing) const {
        HybridMixtureParams p;
        p.mixing = mixing;
        p.cat_probs = cat_.probs();
        p.means = cont_.means();
        p.vars = cont_.vars();
        if (!has_cont_) {
            p.means.resize(K_, 0);
            p.vars.resize(0);
        }
        return p;
    }

private:
    CategoricalFamily cat_;
    DiagGaussianFamily cont_;
    bool has_cat_;
    bool has_cont_;
    Eigen::Index n_;
    int K_;
};

// ---- EM driver ----------------------------------------------------------

struct EmState {
    Eigen::VectorXd mixing;
    Eigen::MatrixXd resp;
    double loglik = -std::numeric_limits<double>::infinity();
    int n_iter = 0;
    bool converged = false;
    std::vector<double> trace;
    std::vector<std::string> warnings;
};

// E-step at current (mixing, family params): fills resp, returns loglik.
template <class Family>
double estep(const Family& fam, const Eigen::VectorXd& mixing, Eigen::MatrixXd& logd,
             Eigen::MatrixXd& resp) {
    const int nn = fam.n();
    fam.log_density(logd);
    const Eigen::ArrayXd logmix = mixing.array().max(1e-300).log();
    double ll = 0.0;
    for (int i = 0; i < nn; ++i) {
        Eigen::ArrayXd row = logd.row(i).transpose().array() + logmix;
        const double m = row.maxCoeff();
        if (!std::isfinite(m)) {
            throw NumericError("EM E-step: non-finite log-density at row " + std::to_string(i));
        }
        Eigen::ArrayXd w = (row - m).exp();
        const double s = w.sum();
        ll += m + std::log(s);
        w /= s;
        // clamp away exact 0/1 before renormalizing
        w = w.max(kRespClamp).min(1.0 - kRespClamp);
        resp.row(i) = (w / w.sum()).matrix().transpose();
    }
    return ll;
}

// Rows uniform on the simplex: normalized exponentials.
void init_responsibilities(Eigen::MatrixXd& resp, Rng& rng) {
    for (int i = 0; i < resp.rows(); ++i) {
        double s = 0.0;
        for (int k = 0; k < resp.cols(); ++k) {
            const double e = -std::log(rng.next_open());
            resp(i, k) = e;
            s += e;
        }
        resp.row(i) /= s;
    }
}

// Location init. Random responsibilities put every component at the data
// centroid, a fixed point the relative-tolerance stop mistakes for convergence,
// so locations come from data rows picked greedily far apart instead
// (squared-distance sampling; Hamming on level columns).
template <class Family>
void seed_components(Family& fam, Rng& rng) {
    const int nn = fam.n();
    const int K = fam.n_components();
    std::vector<int> picks;
    picks.reserve(K);
    picks.push_back(static_cast<int>(rng.next_index(static_cast<std::uint64_t>(nn))));
    Eigen::VectorXd d2(nn);
    for (int i = 0; i < nn; ++i) d2(i) = fam.dissimilarity(i, picks[0]);
    while (static_cast<int>(picks.size()) < K) {
        const double total = d2.sum();
        int next;
        if (total > 0.0) {
            double u = rng.next_open() * total;
            next = nn - 1;
            for (int i = 0; i < nn; ++i) {
                u -= d2(i);
                if (u <= 0.0) {
                    next = i;
                    break;
                }
            }
        } else {
            // every remaining row duplicates a pick; any row keeps EM defined
            next = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(nn)));
        }
        picks.push_back(next);
        for (int i = 0; i < nn; ++i) d2(i) = std::min(d2(i), fam.dissimilarity(i, next));
    }
    for (int k = 0; k < K; ++k) fam.reseed(k, picks[k]);
}

template <class Family, class Fit>
void run_em(Family& fam, const EmConfig& cfg, Fit& out) {
    const int nn = fam.n();
    const int K = fam.n_components();
    if (cfg.max_iter < 1 || cfg.rel_tol <= 0.0 || cfg.n_restarts < 1) {
        throw std::invalid_argument("EmConfig: max_iter/n_restarts must be >= 1 and rel_tol > 0");
    }

    Rng root(cfg.seed);
    double best_ll = -std::numeric_limits<double>::infinity();
    double min_step = std::numeric_limits<double>::infinity();
    bool have_best = false;
    EmState best;
    Family best_fam = fam;

    for (int r = 0; r < cfg.n_restarts; ++r) {
        Rng stream = root.split(static_cast<std::uint64_t>(r));
        EmState st;
        st.resp.resize(nn, K);
        // random responsibilities fix the shared scale, seeding fixes locations
        init_responsibilities(st.resp, stream);
        fam.set_iteration(0);
        fam.mstep(st.resp);
        seed_components(fam, stream);
        st.mixing = Eigen::VectorXd::Constant(K, 1.0 / K);

        Eigen::MatrixXd logd(nn, K);
        double prev_ll = -std::numeric_limits<double>::infinity();
        bool skip_audit = false;   // true right after a reseed
        for (int it = 0; it < cfg.max_iter; ++it) {
            fam.set_iteration(it);
            const double ll = estep(fam, st.mixing, logd, st.resp);
            if (!std::isfinite(ll)) {
                throw DegenerateFitError("EM: log-likelihood not finite", it);
            }
            st.trace.push_back(ll);
            st.n_iter = it + 1;
            if (std::isfinite(prev_ll)) {
                if (!skip_audit) min_step = std::min(min_step, ll - prev_ll);
                if (std::abs(ll - prev_ll) / (1.0 + std::abs(ll)) < cfg.rel_tol) {
                    st.loglik = ll;
                    st.converged = true;
                    break;
                }
            }
            skip_audit = false;
            prev_ll = ll;
            st.loglik = ll;

            // empty-component guard, then M-step
            Eigen::VectorXd mass = st.resp.colwise().sum().transpose();
            for (int k = 0; k < K; ++k) {
                if (mass(k) < kEmptyMass) {
                    const int row =
                        static_cast<int>(stream.next_index(static_cast<std::uint64_t>(nn)));
                    fam.reseed(k, row);
                    st.mixing(k) = 1.0 / nn;
                    st.mixing /= st.mixing.sum();
                    st.warnings.push_back("component " + std::to_string(k) +
                                          " reseeded from data row " + std::to_string(row) +
                                          " at iteration " + std::to_string(it));
                    skip_audit = true;
                }
            }
            if (!skip_audit) {
                fam.mstep(st.resp);
                st.mixing = st.resp.colwise().mean().transpose();
            }
        }
        // posterior and log-likelihood at the final parameters
        const double final_ll = estep(fam, st.mixing, logd, st.resp);
        if (!st.trace.empty() && !skip_audit) {
            min_step = std::min(min_step, final_ll - st.trace.back());
        }
        st.trace.push_back(final_ll);
        st.loglik = final_ll;

        if (!have_best || st.loglik > best_ll) {
            have_best = true;
            best_ll = st.loglik;
            best = std::move(st);
            best_fam = fam;
        }
    }

    // canonical component order
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return best_fam.order_key(a) < best_fam.order_key(b);
    });
    best_fam.apply_perm(perm);
    Eigen::VectorXd mixing(K);
    Eigen::MatrixXd post(nn, K);
    for (int k = 0; k < K; ++k) {
        mixing(k) = best.mixing(perm[k]);
        post.col(k) = best.resp.col(perm[k]);
    }

    out.params = best_fam.extract(mixing);
    out.posterior = GroupPosterior{post};
    out.loglik = best.loglik;
    out.n_iter = best.n_iter;
    out.converged = best.converged;
    out.min_loglik_step = min_step;
    out.loglik_trace = best.trace;
    out.warnings = best.warnings;
}

// ---- posterior / likelihood at fixed parameters -------------------------

Eigen::MatrixXd posterior_from_logd(const Eigen::MatrixXd& logd, const Eigen::VectorXd& mixing) {
    const int nn = static_cast<int>(logd.rows());
    const int K = static_cast<int>(logd.cols());
    Eigen::MatrixXd post(nn, K);
    const Eigen::ArrayXd logmix = mixing.array().max(1e-300).log();
    for (int i = 0; i < nn; ++i) {
        Eigen::ArrayXd row = logd.row(i).transpose().array() + logmix;
        const double m = row.maxCoeff();
        if (!std::isfinite(m)) {
            int k_bad = 0;
            for (int k = 0; k < K; ++k) {
                if (!std::isfinite(row(k))) k_bad = k;
            }
            throw NumericError("posterior: non-finite density at row " + std::to_string(i) +
                               ", component " + std::to_string(k_bad));
        }
        Eigen::ArrayXd w = (row - m).exp();
        post.row(i) = (w / w.sum()).matrix().transpose();
    }
    return post;
}

Eigen::MatrixXd gaussian_log_density(const GaussianMixtureParams& p, const Eigen::MatrixXd& x) {
    const int K = static_cast<int>(p.mixing.size());
    Eigen::LLT<Eigen::MatrixXd> llt(p.cov);
    if (llt.info() != Eigen::Success) {
        throw NumericError("posterior: shared covariance not positive definite");
    }
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double base = -0.5 * (x.cols() * kLog2Pi + logdet);
    Eigen::MatrixXd logd(x.rows(), K);
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd centered = (x.rowwise() - p.means.row(k)).transpose();
        Eigen::MatrixXd w = llt.matrixL().solve(centered);
        logd.col(k) = (-0.5 * w.colwise().squaredNorm().array() + base).matrix().transpose();
    }
    return logd;
}

Eigen::MatrixXd categorical_log_density(const CategoricalMixtureParams& p,
                                        const Eigen::MatrixXi& levels) {
    const int K = static_cast<int>(p.mixing.size());
    const int D = static_cast<int>(levels.cols());
    Eigen::MatrixXd logd = Eigen::MatrixXd::Zero(levels.rows(), K);
    for (int k = 0; k < K; ++k) {
        if (static_cast<int>(p.probs[k].size()) != D) {
            throw std::invalid_argument("posterior: level columns do not match parameter blocks");
        }
        for (int d = 0; d < D; ++d) {
            const Eigen::VectorXd logp = p.probs[k][d].array().max(1e-300).log().matrix();
            for (int i = 0; i < levels.rows(); ++i) {
                const int v = levels(i, d);
                if (v < 1 || v > logp.size()) {
                    throw std::invalid_argument("posterior: level out of range in column " +
                                                std::to_string(d));
                }
                logd(i, k) += logp(v - 1);
            }
        }
    }
    return logd;
}

Eigen::MatrixXd hybrid_log_density(const HybridMixtureParams& p, const Eigen::MatrixXi& levels,
                                   const Eigen::MatrixXd& xc) {
    const int K = static_cast<int>(p.mixing.size());
    const Eigen::Index nn = levels.cols() > 0 ? levels.rows() : xc.rows();
    Eigen::MatrixXd logd = Eigen::MatrixXd::Zero(nn, K);
    if (levels.cols() > 0) {
        CategoricalMixtureParams cat{p.mixing, p.cat_probs};
        logd = categorical_log_density(cat, levels);
    }
    if (xc.cols() > 0) {
        const double base = -0.5 * (xc.cols() * kLog2Pi + p.vars.array().log().sum());
        const Eigen::ArrayXd inv2v = 0.5 * p.vars.array().inverse();
        for (int k = 0; k < K; ++k) {
            Eigen::MatrixXd centered = xc.rowwise() - p.means.row(k);
            logd.col(k) += (-(centered.array().square().rowwise() * inv2v.transpose())
                                 .rowwise()
                                 .sum() +
                            base)
                               .matrix();
        }
    }
    return logd;
}

double loglik_from_logd(const Eigen::MatrixXd& logd, const Eigen::VectorXd& mixing) {
    const Eigen::ArrayXd logmix = mixing.array().max(1e-300).log();
    double ll = 0.0;
    for (int i = 0; i < logd.rows(); ++i) {
        Eigen::ArrayXd row = logd.row(i).transpose().array() + logmix;
        const double m = row.maxCoeff();
        if (!std::isfinite(m)) {
            throw NumericError("log_likelihood: zero marginal density at row " +
                               std::to_string(i));
        }
        ll += m + std::log((row - m).exp().sum());
    }
    return ll;
}

}  // namespace

GaussianMixtureFit fit_gaussian_em(const Eigen::MatrixXd& xa, int K, const EmConfig& cfg) {
    check_finite(xa, "xa");
    check_mixing_k(K, static_cast<int>(xa.rows()));
    if (xa.cols() < 1) throw std::invalid_argument("fit_gaussian_em: xa needs at least one column");
    GaussianFamily fam(xa, K);
    GaussianMixtureFit fit;
    run_em(fam, cfg, fit);
    return fit;
}

CategoricalMixtureFit fit_categorical_em(const Eigen::MatrixXi& levels,
                                         const std::vector<int>& arities, int K,
                                         const EmConfig& cfg) {
    check_levels(levels, arities);
    check_mixing_k(K, static_cast<int>(levels.rows()));
    if (levels.cols() < 1) {
        throw std::invalid_argument("fit_categorical_em: needs at least one level column");
    }
    CategoricalFamily fam(levels, arities, K);
    CategoricalMixtureFit fit;
    run_em(fam, cfg, fit);
    return fit;
}

HybridMixtureFit fit_hybrid_em(const Eigen::MatrixXi& levels, const std::vector<int>& arities,
                               const Eigen::MatrixXd& xa_cont, int K, const EmConfig& cfg) {
    if (levels.cols() > 0) check_levels(levels, arities);
    if (xa_cont.cols() > 0) check_finite(xa_cont, "xa_cont");
    if (levels.cols() == 0 && xa_cont.cols() == 0) {
        throw std::invalid_argument("fit_hybrid_em: both blocks empty");
    }
    if (levels.cols() > 0 && xa_cont.cols() > 0 && levels.rows() != xa_cont.rows()) {
        throw std::invalid_argument("fit_hybrid_em: block row counts differ");
    }
    const int nn = static_cast<int>(levels.cols() > 0 ? levels.rows() : xa_cont.rows());
    check_mixing_k(K, nn);
    HybridFamily fam(levels, arities, xa_cont, K);
    HybridMixtureFit fit;
    run_em(fam, cfg, fit);
    return fit;
}

Eigen::MatrixXd posterior_matrix(const GaussianMixtureParams& p, const Eigen::MatrixXd& x) {
    return posterior_from_logd(gaussian_log_density(p, x), p.mixing);
}

Eigen::MatrixXd posterior_matrix(const CategoricalMixtureParams& p, const Eigen::MatrixXi& levels) {
    return posterior_from_logd(categorical_log_density(p, levels), p.mixing);
}

Eigen::MatrixXd posterior_matrix(const HybridMixtureParams& p, const Eigen::MatrixXi& levels,
                                 const Eigen::MatrixXd& xc) {
    return posterior_from_logd(hybrid_log_density(p, levels, xc), p.mixing);
}

Eigen::VectorXd posterior(const GaussianMixtureParams& p, const Eigen::VectorXd& x) {
    return posterior_matrix(p, Eigen::MatrixXd(x.transpose())).row(0).transpose();
}

Eigen::VectorXd posterior(const CategoricalMixtureParams& p, const Eigen::VectorXi& levels) {
    return posterior_matrix(p, Eigen::MatrixXi(levels.transpose())).row(0).transpose();
}

Eigen::VectorXd posterior(const HybridMixtureParams& p, const Eigen::VectorXi& levels,
                          const Eigen::VectorXd& xc) {
    return posterior_matrix(p, Eigen::MatrixXi(levels.transpose()),
                            Eigen::MatrixXd(xc.transpose()))
        .row(0)
        .transpose();
}

Eigen::VectorXi map_classify(const GroupPosterior& post) {
    const int nn = post.n();
    if (nn == 0 || post.k() == 0) {
        throw std::invalid_argument("map_classify: empty posterior");
    }
    Eigen::VectorXi labels(nn);
    for (int i = 0; i < nn; ++i) {
        int arg = 0;
        double best = post.probs(i, 0);
        for (int k = 1; k < post.k(); ++k) {
            if (post.probs(i, k) > best) {   // strict: ties keep the smallest index
                best = post.probs(i, k);
                arg = k;
            }
        }
        labels(i) = arg + 1;
    }
    return labels;
}

namespace {

void check_resp(const Eigen::MatrixXd& resp, Eigen::Index n) {
    if (resp.rows() != n || resp.cols() < 1) {
        throw std::invalid_argument("m-step: responsibility shape does not match the data");
    }
    check_finite(resp, "responsibilities");
    if ((resp.colwise().sum().array() < kEmptyMass).any()) {
        throw std::invalid_argument("m-step: a responsibility column has no mass");
    }
}

}  // namespace

GaussianMixtureParams gaussian_m_step(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& resp) {
    check_finite(xa, "xa");
    check_resp(resp, xa.rows());
    GaussianFamily fam(xa, static_cast<int>(resp.cols()));
    fam.mstep(resp);
    return fam.extract(resp.colwise().mean().transpose());
}

CategoricalMixtureParams categorical_m_step(const Eigen::MatrixXi& levels,
                                            const std::vector<int>& arities,
                                            const Eigen::MatrixXd& resp) {
    check_levels(levels, arities);
    check_resp(resp, levels.rows());
    CategoricalFamily fam(levels, arities, static_cast<int>(resp.cols()));
    fam.mstep(resp);
    return fam.extract(resp.colwise().mean().transpose());
}

HybridMixtureParams hybrid_m_step(const Eigen::MatrixXi& levels, const std::vector<int>& arities,
                                  const Eigen::MatrixXd& xa_cont, const Eigen::MatrixXd& resp) {
    if (levels.cols() > 0) check_levels(levels, arities);
    if (xa_cont.cols() > 0) check_finite(xa_cont, "xa_cont");
    const Eigen::Index nn = levels.cols() > 0 ? levels.rows() : xa_cont.rows();
    check_resp(resp, nn);
    HybridFamily fam(levels, arities, xa_cont, static_cast<int>(resp.cols()));
    fam.mstep(resp);
    return fam.extract(resp.colwise().mean().transpose());
}

double log_likelihood(const GaussianMixtureParams& p, const Eigen::MatrixXd& x) {
    return loglik_from_logd(gaussian_log_density(p, x), p.mixing);
}

double log_likelihood(const CategoricalMixtureParams& p, const Eigen::MatrixXi& levels) {
    return loglik_from_logd(categorical_log_density(p, levels), p.mixing);
}

double log_likelihood(const HybridMixtureParams& p, const Eigen::MatrixXi& levels,
                      const Eigen::MatrixXd& xc) {
    return loglik_from_logd(hybrid_log_density(p, levels, xc), p.mixing);
}

}  // namespace fairmix

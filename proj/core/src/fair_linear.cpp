#include "fairmix/fair_linear.hpp"

#include <cmath>
#include <stdexcept>

#include "fairmix/errors.hpp"

namespace fairmix {

namespace {

// Min-norm solve of S x = c for symmetric PSD S (null directions dropped).
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& S, const Eigen::VectorXd& c) {
    if (S.rows() == 0) return Eigen::VectorXd(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double tol = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd proj = es.eigenvectors().transpose() * c;
    for (int i = 0; i < ev.size(); ++i) {
        proj(i) = ev(i) > tol ? proj(i) / ev(i) : 0.0;
    }
    return es.eigenvectors() * proj;
}

}  // namespace

FairLinearFit fit_fair_ls(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                          const Eigen::MatrixXd& U, double epsilon) {
    const auto n = y.size();
    const int K = A_hat.k();
    const auto p = U.cols();
    if (A_hat.probs.rows() != n || U.rows() != n) {
        throw std::invalid_argument("fit_fair_ls: row counts differ");
    }
    if (n < 2) throw std::invalid_argument("fit_fair_ls: need at least two rows");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("fit_fair_ls: epsilon must lie in [0,1]");
    }

    FairLinearFit fit;
    fit.epsilon = epsilon;

    const double ybar = y.mean();
    const Eigen::VectorXd yc = y.array() - ybar;
    const Eigen::RowVectorXd abar = A_hat.probs.colwise().mean();
    const Eigen::RowVectorXd ubar = U.colwise().mean();
    const Eigen::MatrixXd Ac = A_hat.probs.rowwise() - abar;
    const Eigen::MatrixXd Uc = U.rowwise() - ubar;

    const Eigen::MatrixXd S_A = Ac.transpose() * Ac / static_cast<double>(n);
    Eigen::MatrixXd S_U = Uc.transpose() * Uc / static_cast<double>(n);
    const Eigen::VectorXd c_A = Ac.transpose() * yc / static_cast<double>(n);
    const Eigen::VectorXd c_U = Uc.transpose() * yc / static_cast<double>(n);

    // unconstrained solutions; S_A is singular by construction (centered
    // posterior columns sum to zero), so use the min-norm solve there
    const Eigen::VectorXd alpha0 = pinv_solve(S_A, c_A);
    Eigen::VectorXd beta0v;
    if (p > 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(S_U);
        const Eigen::VectorXd cand = ldlt.solve(c_U);
        if (ldlt.info() != Eigen::Success || !cand.allFinite() ||
            (S_U * cand - c_U).cwiseAbs().maxCoeff() >
                1e-6 * (1.0 + c_U.cwiseAbs().maxCoeff())) {
            S_U.diagonal().array() += 1e-10 * S_U.trace();
            fit.warnings.push_back("S_U singular; applied ridge jitter 1e-10*trace");
            beta0v = S_U.ldlt().solve(c_U);
        } else {
            beta0v = cand;
        }
    } else {
        beta0v = Eigen::VectorXd(0);
    }

    const double a0 = c_A.dot(alpha0);
    const double b0 = p > 0 ? beta0v.dot(S_U * beta0v) : 0.0;
    const double scale = std::max({a0, b0, 1e-300});

    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    double t = 0.0;

    if (epsilon == 0.0) {
        alpha = Eigen::VectorXd::Zero(K);
        beta = beta0v;
        fit.warnings.push_back("epsilon=0: posterior block excluded from the fit");
    } else if (epsilon == 1.0) {
        alpha = alpha0;
        beta = beta0v;
    } else {
        const double g0 = (1.0 - epsilon) * a0 - epsilon * b0;
        if (g0 <= 1e-14 * scale) {
            alpha = alpha0;           // interior: unconstrained optimum feasible
            beta = beta0v;
        } else if (b0 <= 1e-14 * scale) {
            // response orthogonal to the residual block: the active-constraint
            // optimum is degenerate (any residual direction works); return the
            // conservative feasible point with the posterior block removed
            alpha = Eigen::VectorXd::Zero(K);
            beta = beta0v;
            fit.warnings.push_back(
                "residual block carries no signal; constraint forces the posterior block out");
        } else {
            // g is strictly decreasing on [0, 1/eps); bracket then bisect
            auto g = [&](double tt) {
                const double sa = 1.0 + tt * (1.0 - epsilon);
                const double su = 1.0 - tt * epsilon;
                return (1.0 - epsilon) * a0 / (sa * sa) - epsilon * b0 / (su * su);
            };
            double lo = 0.0;
            double hi = 0.0;
            for (int j = 1; j <= 62; ++j) {
                hi = (1.0 / epsilon) * (1.0 - std::pow(0.5, j));
                if (g(hi) < 0.0) break;
                lo = hi;
            }
            if (g(hi) >= 0.0) {
                throw NumericError("fit_fair_ls: dual bracket not found");
            }
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (g(mid) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            t = 0.5 * (lo + hi);
            alpha = alpha0 / (1.0 + t * (1.0 - epsilon));
            beta = beta0v / (1.0 - t * epsilon);
        }
    }

    fit.alpha = alpha;
    fit.beta = beta;
    fit.multiplier = t;
    fit.beta0 = ybar - abar.dot(alpha) - (p > 0 ? ubar.dot(beta) : 0.0);

    const Eigen::VectorXd pred = (Eigen::VectorXd::Constant(n, fit.beta0) + A_hat.probs * alpha +
                                  (p > 0 ? (U * beta).eval() : Eigen::VectorXd::Zero(n).eval()));
    fit.sse = (y - pred).squaredNorm();
    const double va = alpha.dot(S_A * alpha);
    const double vu = p > 0 ? beta.dot(S_U * beta) : 0.0;
    fit.r2_given_A = (va + vu) > 0.0 ? va / (va + vu) : 0.0;
    return fit;
}

double predict_linear(const FairLinearFit& fit, const Eigen::VectorXd& a_row,
                      const Eigen::VectorXd& u_row) {
    if (a_row.size() != fit.alpha.size() || u_row.size() != fit.beta.size()) {
        throw std::invalid_argument("predict_linear: dimension mismatch");
    }
    return fit.beta0 + a_row.dot(fit.alpha) + u_row.dot(fit.beta);
}

Eigen::VectorXd predict_linear_batch(const FairLinearFit& fit, const GroupPosterior& A_hat,
                                     const Eigen::MatrixXd& U) {
    if (A_hat.probs.cols() != fit.alpha.size() || U.cols() != fit.beta.size() ||
        A_hat.probs.rows() != U.rows()) {
        throw std::invalid_argument("predict_linear_batch: dimension mismatch");
    }
    return Eigen::VectorXd::Constant(A_hat.probs.rows(), fit.beta0) + A_hat.probs * fit.alpha +
           U * fit.beta;
}

}  // namespace fairmix

#include "fairmix/fair_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairmix/errors.hpp"

namespace fairmix {

namespace {

constexpr double kPiClamp = 1e-12;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& eta) {
    return (1.0 / (1.0 + (-eta.array()).exp())).matrix();
}

double nll(const Eigen::VectorXd& y, const Eigen::VectorXd& pi) {
    const Eigen::ArrayXd pc = pi.array().max(kPiClamp).min(1.0 - kPiClamp);
    return -(y.array() * pc.log() + (1.0 - y.array()) * (1.0 - pc).log()).sum();
}

// v_k = sum_i (a_ik - abar_k) pi_i
Eigen::VectorXd penalty_vec(const Eigen::MatrixXd& A, const Eigen::VectorXd& pi) {
    const Eigen::RowVectorXd abar = A.colwise().mean();
    return (A.rowwise() - abar).transpose() * pi;
}

struct PenaltyParts {
    double value;          // C_delta
    Eigen::VectorXd grad;  // wrt coefs of the supplied design
};

PenaltyParts penalty_parts(const Eigen::MatrixXd& A, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& pi, double delta) {
    const Eigen::VectorXd v = penalty_vec(A, pi);
    const double c = std::sqrt(v.squaredNorm() + delta);
    const Eigen::RowVectorXd abar = A.colwise().mean();
    // s_i = sum_k v_k (a_ik - abar_k), then dC = (1/C) sum_i s_i pi_i(1-pi_i) x_i
    const Eigen::VectorXd s = (A.rowwise() - abar) * v;
    const Eigen::VectorXd w = s.array() * pi.array() * (1.0 - pi.array());
    return {c, X.transpose() * w / c};
}

}  // namespace

double penalty_value(const GroupPosterior& A_hat, const Eigen::VectorXd& pi_hat, double delta) {
    if (pi_hat.size() != A_hat.probs.rows()) {
        throw std::invalid_argument("penalty_value: row counts differ");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("penalty_value: delta must be positive");
    return std::sqrt(penalty_vec(A_hat.probs, pi_hat).squaredNorm() + delta);
}

Eigen::VectorXd penalty_gradient(const GroupPosterior& A_hat, const Eigen::MatrixXd& X_aug,
                                 const Eigen::VectorXd& coefs, double delta) {
    if (X_aug.rows() != A_hat.probs.rows() || X_aug.cols() != coefs.size()) {
        throw std::invalid_argument("penalty_gradient: dimension mismatch");
    }
    if (!coefs.allFinite()) throw std::invalid_argument("penalty_gradient: coefs not finite");
    if (!(delta > 0.0)) throw std::invalid_argument("penalty_gradient: delta must be positive");
    const Eigen::VectorXd pi = sigmoid(X_aug * coefs);
    return penalty_parts(A_hat.probs, X_aug, pi, delta).grad;
}

FairLogisticFit fit_fair_logistic(const Eigen::VectorXd& y, const GroupPosterior& A_hat,
                                  const Eigen::MatrixXd& U, double lambda, double delta,
                                  const OptimizerConfig& opt) {
    const auto n = y.size();
    const int K = A_hat.k();
    const auto p = U.cols();
    if (A_hat.probs.rows() != n || U.rows() != n) {
        throw std::invalid_argument("fit_fair_logistic: row counts differ");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) {
            throw std::invalid_argument("fit_fair_logistic: y must be 0/1");
        }
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("fit_fair_logistic: lambda must be >= 0");
    if (!(delta > 0.0)) throw std::invalid_argument("fit_fair_logistic: delta must be positive");

    // design [1, A_hat without its last column, U], standardized; the dropped
    // column is determined by the rest plus the intercept (rows sum to one)
    const auto m = 1 + (K - 1) + p;
    Eigen::MatrixXd raw(n, m);
    raw.col(0).setOnes();
    raw.block(0, 1, n, K - 1) = A_hat.probs.leftCols(K - 1);
    if (p > 0) raw.block(0, K, n, p) = U;

    Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sd = Eigen::VectorXd::Ones(m);
    Eigen::MatrixXd X = raw;
    for (Eigen::Index j = 1; j < m; ++j) {
        mu(j) = raw.col(j).mean();
        const double var = (raw.col(j).array() - mu(j)).square().sum() / static_cast<double>(n);
        sd(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
        X.col(j) = (raw.col(j).array() - mu(j)) / sd(j);
    }

    const Eigen::MatrixXd& A = A_hat.probs;  // penalty always sees all K columns

    auto to_original = [&](const Eigen::VectorXd& th) {
        Eigen::VectorXd orig(m);
        double b0 = th(0);
        for (Eigen::Index j = 1; j < m; ++j) {
            orig(j) = th(j) / sd(j);
            b0 -= th(j) * mu(j) / sd(j);
        }
        orig(0) = b0;
        return orig;
    };

    auto objective_at = [&](const Eigen::VectorXd& th, Eigen::VectorXd* pi_out) {
        const Eigen::VectorXd pi = sigmoid(X * th);
        if (pi_out) *pi_out = pi;
        double obj = nll(y, pi);
        if (lambda > 0.0) obj += lambda * std::sqrt(penalty_vec(A, pi).squaredNorm() + delta);
        return obj;
    };

    FairLogisticFit fit;
    fit.lambda = lambda;
    fit.delta = delta;

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd madam = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd vadam = Eigen::VectorXd::Zero(m);
    double step = opt.step;
    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta = theta;
    int last_improve = 0;
    int it = 0;
    bool converged = false;
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
    constexpr int kStallWindow = 500;
    constexpr double kStepFloor = 1e-9;

    for (it = 0; it < opt.max_iter; ++it) {
        Eigen::VectorXd pi;
        const double obj = objective_at(theta, &pi);
        Eigen::VectorXd grad = X.transpose() * (pi - y);
        if (lambda > 0.0) grad += lambda * penalty_parts(A, X, pi, delta).grad;
        grad_norm = grad.cwiseAbs().maxCoeff();

        const Eigen::VectorXd orig = to_original(theta);
        if (m > 1 && orig.tail(m - 1).cwiseAbs().maxCoeff() > opt.coef_cap) {
            throw SeparationError("fit_fair_logistic: coefficients exceeded cap; data look separable");
        }

        // improvement test keeps infinity on the comparable side; the
        // subtracted form turns the first comparison into inf - inf = NaN
        if (best_obj - obj > 1e-10 * (1.0 + std::abs(obj))) {
            best_obj = obj;
            best_theta = theta;
            last_improve = it;
        }
        if (grad_norm < opt.grad_tol) {
            converged = true;
            best_theta = theta;
            break;
        }
        if (it - last_improve >= kStallWindow) {
            theta = best_theta;
            step *= 0.5;
            madam.setZero();
            vadam.setZero();
            last_improve = it;
            if (step < kStepFloor) break;
            continue;
        }

        bool stepped = false;
        if (opt.use_newton) {
            // logistic Hessian plus the derived penalty Hessian; indefinite
            // curvature falls back to the first-order step below
            const Eigen::ArrayXd w = pi.array() * (1.0 - pi.array());
            Eigen::MatrixXd H = X.transpose() * (X.array().colwise() * w).matrix();
            if (lambda > 0.0) {
                const Eigen::VectorXd v = penalty_vec(A, pi);
                const double c = std::sqrt(v.squaredNorm() + delta);
                const Eigen::RowVectorXd abar = A.colwise().mean();
                const Eigen::MatrixXd Ac = A.rowwise() - abar;
                Eigen::MatrixXd gk(m, K);
                for (int k = 0; k < K; ++k) {
                    gk.col(k) = X.transpose() * (Ac.col(k).array() * w).matrix();
                }
                const Eigen::VectorXd s = Ac * v;
                const Eigen::ArrayXd w2 = s.array() * w * (1.0 - 2.0 * pi.array());
                const Eigen::VectorXd G = gk * v;
                Eigen::MatrixXd Hp = gk * gk.transpose();
                Hp += X.transpose() * (X.array().colwise() * w2).matrix();
                Hp /= c;
                Hp -= G * G.transpose() / (c * c * c);
                H += lambda * Hp;
            }
            Eigen::LLT<Eigen::MatrixXd> llt(H);
            if (llt.info() == Eigen::Success) {
                const Eigen::VectorXd dir = llt.solve(-grad);
                double scl = 1.0;
                for (int bt = 0; bt < 30; ++bt) {
                    if (objective_at(theta + scl * dir, nullptr) < obj) break;
                    scl *= 0.5;
                }
                if (objective_at(theta + scl * dir, nullptr) < obj) {
                    theta += scl * dir;
                    stepped = true;
                }
            }
        }
        if (!stepped) {
            madam = 0.9 * madam + 0.1 * grad;
            vadam = 0.999 * vadam + 0.001 * grad.array().square().matrix();
            const double bc1 = 1.0 - std::pow(0.9, it + 1);
            const double bc2 = 1.0 - std::pow(0.999, it + 1);
            theta -= (step * (madam.array() / bc1) /
                      ((vadam.array() / bc2).sqrt() + 1e-8))
                         .matrix();
        }
    }

    theta = best_theta;
    Eigen::VectorXd pi;
    fit.objective = objective_at(theta, &pi);
    Eigen::VectorXd grad = X.transpose() * (pi - y);
    if (lambda > 0.0) grad += lambda * penalty_parts(A, X, pi, delta).grad;
    fit.grad_norm = grad.cwiseAbs().maxCoeff();
    fit.penalty_value = std::sqrt(penalty_vec(A, pi).squaredNorm() + delta);
    fit.converged = converged;
    fit.n_iter = it;
    if (!converged) {
        fit.warnings.push_back("optimizer stopped before reaching the gradient tolerance");
    }

    const Eigen::VectorXd orig = to_original(theta);
    fit.beta0 = orig(0);
    fit.alpha = Eigen::VectorXd::Zero(K);
    fit.alpha.head(K - 1) = orig.segment(1, K - 1);
    fit.beta = orig.tail(p);
    return fit;
}

Eigen::VectorXd predict_logistic_batch(const FairLogisticFit& fit, const GroupPosterior& A_hat,
                                       const Eigen::MatrixXd& U) {
    if (A_hat.probs.cols() != fit.alpha.size() || U.cols() != fit.beta.size() ||
        A_hat.probs.rows() != U.rows()) {
        throw std::invalid_argument("predict_logistic_batch: dimension mismatch");
    }
    const Eigen::VectorXd eta = Eigen::VectorXd::Constant(A_hat.probs.rows(), fit.beta0) +
                                A_hat.probs * fit.alpha + U * fit.beta;
    return sigmoid(eta);
}

}  // namespace fairmix

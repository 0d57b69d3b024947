#include "fairmix/residualize.hpp"

#include <stdexcept>

namespace fairmix {

ResidualizedDesign residualize(const Eigen::MatrixXd& X, const GroupPosterior& A_hat) {
    const auto n = X.rows();
    const int K = A_hat.k();
    if (A_hat.probs.rows() != n) {
        throw std::invalid_argument("residualize: X and A_hat row counts differ");
    }
    if (n <= K + 1) {
        throw std::invalid_argument("residualize: need n > K + 1 rows");
    }

    // [1, A_hat] has rank at most K (posterior rows sum to 1); drop the last
    // posterior column and solve the reduced least-squares problem.
    Eigen::MatrixXd Z(n, K);
    Z.col(0).setOnes();
    Z.rightCols(K - 1) = A_hat.probs.leftCols(K - 1);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    Eigen::MatrixXd gamma = qr.solve(X);   // K x p: intercept + K-1 slopes

    ResidualizedDesign out;
    out.intercept = gamma.row(0).transpose();
    out.coefficients = Eigen::MatrixXd::Zero(K, X.cols());
    if (K > 1) out.coefficients.topRows(K - 1) = gamma.bottomRows(K - 1);
    out.residuals = X - Z * gamma;
    out.warnings.push_back(
        "design [1, A_hat] is rank-deficient (posterior rows sum to 1); dropped posterior column " +
        std::to_string(K) + " and reported a zero coefficient row");
    return out;
}

SampleCov sample_covs(const GroupPosterior& A_hat, const Eigen::MatrixXd& U) {
    const auto n = A_hat.probs.rows();
    if (U.rows() != n) throw std::invalid_argument("sample_covs: row counts differ");
    if (n < 1) throw std::invalid_argument("sample_covs: empty input");
    SampleCov sc;
    Eigen::MatrixXd Ac = A_hat.probs.rowwise() - A_hat.probs.colwise().mean();
    Eigen::MatrixXd Uc = U.rowwise() - U.colwise().mean();
    sc.S_A = Ac.transpose() * Ac / static_cast<double>(n);
    sc.S_U = Uc.transpose() * Uc / static_cast<double>(n);
    return sc;
}

}  // namespace fairmix

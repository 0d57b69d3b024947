#include "fairmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fairmix/errors.hpp"

namespace fairmix {

namespace {

void note(std::vector<std::string>* sink, const std::string& msg) {
    if (sink) sink->push_back(msg);
}

void check_binary(const Eigen::VectorXi& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0 && v(i) != 1) {
            throw std::invalid_argument(std::string(what) + " must be 0/1");
        }
    }
}

double max_pairwise_gap(const std::vector<double>& vals) {
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    return *hi - *lo;
}

}  // namespace

double mean_distance(const GroupPosterior& A_hat, const Eigen::VectorXd& y,
                     std::vector<std::string>* warnings) {
    const auto n = y.size();
    const int K = A_hat.k();
    if (A_hat.probs.rows() != n) throw std::invalid_argument("mean_distance: row counts differ");
    if (n < 2) throw std::invalid_argument("mean_distance: need at least two rows");

    std::vector<double> wsum(K, 0.0);
    std::vector<double> wy(K, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        int mode = 0;
        const double top = A_hat.probs.row(i).maxCoeff(&mode);
        const double w = top - 1.0 / K;
        wsum[mode] += w;
        wy[mode] += w * y(i);
    }

    std::vector<double> means;
    for (int k = 0; k < K; ++k) {
        if (wsum[k] < 1e-12) {
            note(warnings, "mean_distance: group " + std::to_string(k + 1) +
                               " carries negligible weight; excluded");
            continue;
        }
        means.push_back(wy[k] / wsum[k]);
    }
    if (means.size() < 2) {
        throw UndefinedMetricError("mean_distance: fewer than two weighted groups");
    }
    return max_pairwise_gap(means);
}

double delta_eo(const Eigen::VectorXi& y_pred, const Eigen::VectorXi& y,
                const Eigen::VectorXi& groups, std::vector<std::string>* warnings) {
    const auto n = y.size();
    if (y_pred.size() != n || groups.size() != n) {
        throw std::invalid_argument("delta_eo: length mismatch");
    }
    if (n == 0) throw UndefinedMetricError("delta_eo: empty input");
    check_binary(y_pred, "delta_eo: y_pred");
    check_binary(y, "delta_eo: y");

    struct Counts {
        long tp = 0, fn = 0, fp = 0, tn = 0;
    };
    std::map<int, Counts> per_group;
    for (Eigen::Index i = 0; i < n; ++i) {
        Counts& c = per_group[groups(i)];
        if (y(i) == 1) {
            (y_pred(i) == 1 ? c.tp : c.fn)++;
        } else {
            (y_pred(i) == 1 ? c.fp : c.tn)++;
        }
    }
    if (per_group.size() < 2) throw UndefinedMetricError("delta_eo: fewer than two groups");

    std::vector<double> tprs;
    std::vector<double> fprs;
    for (const auto& [g, c] : per_group) {
        if (c.tp + c.fn > 0) {
            tprs.push_back(static_cast<double>(c.tp) / (c.tp + c.fn));
        } else {
            note(warnings, "delta_eo: group " + std::to_string(g) + " has no positives; tpr excluded");
        }
        if (c.fp + c.tn > 0) {
            fprs.push_back(static_cast<double>(c.fp) / (c.fp + c.tn));
        } else {
            note(warnings, "delta_eo: group " + std::to_string(g) + " has no negatives; fpr excluded");
        }
    }
    double gap = -1.0;
    if (tprs.size() >= 2) gap = std::max(gap, max_pairwise_gap(tprs));
    if (fprs.size() >= 2) gap = std::max(gap, max_pairwise_gap(fprs));
    if (gap < 0.0) throw UndefinedMetricError("delta_eo: no comparable rate across groups");
    return gap;
}

double delta_dp(const Eigen::VectorXi& y_pred, const Eigen::VectorXi& groups,
                std::vector<std::string>* warnings) {
    const auto n = y_pred.size();
    if (groups.size() != n) throw std::invalid_argument("delta_dp: length mismatch");
    check_binary(y_pred, "delta_dp: y_pred");

    std::map<int, std::pair<long, long>> pos_tot;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& [pos, tot] = pos_tot[groups(i)];
        pos += y_pred(i);
        tot += 1;
    }
    std::vector<double> rates;
    for (const auto& [g, pt] : pos_tot) {
        (void)g;
        rates.push_back(static_cast<double>(pt.first) / pt.second);
    }
    if (rates.size() < 2) throw UndefinedMetricError("delta_dp: fewer than two groups");
    (void)warnings;
    return max_pairwise_gap(rates);
}

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels) {
    const auto n = scores.size();
    if (labels.size() != n) throw std::invalid_argument("auc: length mismatch");
    check_binary(labels, "auc: labels");
    const long n1 = labels.cast<long>().sum();
    const long n0 = n - n1;
    if (n1 == 0 || n0 == 0) throw UndefinedMetricError("auc: one class only");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });

    // midranks over tie runs
    double rank_sum_pos = 0.0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index t = i; t <= j; ++t) {
            if (labels(order[t]) == 1) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    return (rank_sum_pos - 0.5 * static_cast<double>(n1) * (n1 + 1)) /
           (static_cast<double>(n1) * static_cast<double>(n0));
}

MetricsReport classification_report(const Eigen::VectorXd& scores, const Eigen::VectorXi& y,
                                    const GroupPosterior& A_hat) {
    const auto n = y.size();
    if (scores.size() != n || A_hat.probs.rows() != n) {
        throw std::invalid_argument("classification_report: length mismatch");
    }
    MetricsReport rep;
    Eigen::VectorXi pred(n);
    for (Eigen::Index i = 0; i < n; ++i) pred(i) = scores(i) >= 0.5 ? 1 : 0;
    rep.acc = (pred.array() == y.array()).cast<double>().mean();

    const Eigen::VectorXi groups = map_classify(A_hat);

    try {
        rep.delta_eo = delta_eo(pred, y, groups, &rep.warnings);
    } catch (const UndefinedMetricError& e) {
        rep.delta_eo = std::numeric_limits<double>::quiet_NaN();
        rep.warnings.push_back(e.what());
    }
    try {
        rep.delta_dp = delta_dp(pred, groups, &rep.warnings);
    } catch (const UndefinedMetricError& e) {
        rep.delta_dp = std::numeric_limits<double>::quiet_NaN();
        rep.warnings.push_back(e.what());
    }
    try {
        rep.md = mean_distance(A_hat, pred.cast<double>(), &rep.warnings);
    } catch (const UndefinedMetricError& e) {
        rep.md = std::numeric_limits<double>::quiet_NaN();
        rep.warnings.push_back(e.what());
    }
    try {
        rep.auc = auc(scores, y);
    } catch (const UndefinedMetricError& e) {
        rep.auc = std::numeric_limits<double>::quiet_NaN();
        rep.warnings.push_back(e.what());
    }
    return rep;
}

}  // namespace fairmix

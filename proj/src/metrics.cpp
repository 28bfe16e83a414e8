#include "goad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "goad/error.hpp"

namespace goad {

ThresholdResult select_threshold(std::span<const double> scores, std::size_t n_anomalies) {
    if (n_anomalies > scores.size()) {
        throw DimensionError("select_threshold: n_anomalies " + std::to_string(n_anomalies) +
                             " exceeds score count " + std::to_string(scores.size()));
    }
    ThresholdResult result;
    result.flagged.assign(scores.size(), 0);
    if (n_anomalies == 0) {
        result.threshold = std::numeric_limits<double>::infinity();
        return result;
    }

    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    // nth_element on (score desc, index asc) puts the cut exactly at n_anomalies;
    // index order inside equal scores implements the first-come tie rule.
    std::nth_element(idx.begin(), idx.begin() + (n_anomalies - 1), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (scores[a] != scores[b]) return scores[a] > scores[b];
                         return a < b;
                     });
    result.threshold = scores[idx[n_anomalies - 1]];
    for (std::size_t k = 0; k < n_anomalies; ++k) result.flagged[idx[k]] = 1;
    return result;
}

Confusion confusion_and_f1(std::span<const std::uint8_t> predicted,
                           std::span<const std::uint8_t> truth) {
    require_dim(predicted.size() == truth.size(), "confusion_and_f1: prediction count",
                truth.size(), predicted.size());
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    c.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    c.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    c.f1 = (c.precision + c.recall > 0.0)
               ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
               : 0.0;
    return c;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> truth) {
    require_dim(scores.size() == truth.size(), "roc_auc: score count", truth.size(),
                scores.size());
    std::size_t n_pos = 0;
    for (std::uint8_t t : truth) n_pos += (t != 0);
    const std::size_t n_neg = truth.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw Error("roc_auc: needs both classes present");

    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks over tied scores
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k) {
            if (truth[idx[k]]) pos_rank_sum += midrank;
        }
        i = j + 1;
    }
    const double n_pos_d = static_cast<double>(n_pos);
    return (pos_rank_sum - n_pos_d * (n_pos_d + 1.0) / 2.0) /
           (n_pos_d * static_cast<double>(n_neg));
}

MetricsReport summarize_runs(const std::vector<Confusion>& confusions,
                             const std::vector<double>& aucs, double threshold_last,
                             std::size_t n_anomalies) {
    MetricsReport report;
    report.n_runs = confusions.size();
    report.n_anomalies = n_anomalies;
    report.threshold_last = threshold_last;
    if (confusions.empty()) return report;

    for (const Confusion& c : confusions) {
        report.f1_runs.push_back(c.f1);
        report.f1_mean += c.f1;
        report.precision_mean += c.precision;
        report.recall_mean += c.recall;
    }
    const double n = static_cast<double>(confusions.size());
    report.f1_mean /= n;
    report.precision_mean /= n;
    report.recall_mean /= n;
    double var = 0.0;
    for (double f : report.f1_runs) var += (f - report.f1_mean) * (f - report.f1_mean);
    report.f1_std = std::sqrt(var / n);

    report.auc_runs = aucs;
    if (!aucs.empty()) {
        report.auc_mean = std::accumulate(aucs.begin(), aucs.end(), 0.0) /
                          static_cast<double>(aucs.size());
    }
    return report;
}

const std::vector<ReferenceEntry>& reference_table() {
    // Percent F1 per dataset (arrhythmia, thyroid, kdd, kddrev); stddev
    // absent where the original report left it blank.
    static const std::vector<ReferenceEntry> table = {
        {"OC-SVM", {45.8, 38.9, 79.5, 83.2}, {std::nullopt, std::nullopt, std::nullopt, std::nullopt}},
        {"E2E-AE", {45.9, 11.8, 0.3, 74.5}, {std::nullopt, std::nullopt, std::nullopt, std::nullopt}},
        {"LOF", {50.0, 52.7, 83.8, 81.6}, {0.0, 0.0, 5.2, 3.6}},
        {"DAGMM", {49.8, 47.8, 93.7, 93.8}, {std::nullopt, std::nullopt, std::nullopt, std::nullopt}},
        {"FB-AE", {51.5, 75.0, 92.7, 95.9}, {1.6, 0.8, 0.3, 0.4}},
        {"GOAD", {52.0, 74.5, 98.4, 98.9}, {2.3, 1.1, 0.2, 0.3}},
    };
    return table;
}

const ReferenceEntry* reference_lookup(const std::string& method) {
    for (const ReferenceEntry& e : reference_table()) {
        if (e.method == method) return &e;
    }
    return nullptr;
}

}  // namespace goad

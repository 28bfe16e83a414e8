#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goad/error.hpp"

namespace goad {

struct ThresholdResult {
    double threshold = 0.0;
    std::vector<std::uint8_t> flagged;  // exactly n_anomalies entries set
};

// Flags exactly the n_anomalies highest scores as anomalous. Ties at the
// boundary are broken by input order: earlier rows stay flagged.
ThresholdResult select_threshold(std::span<const double> scores, std::size_t n_anomalies);

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Confusion confusion_and_f1(std::span<const std::uint8_t> predicted,
                           std::span<const std::uint8_t> truth);

// Rank-based AUC with midrank tie handling.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> truth);

struct MetricsReport {
    std::vector<double> f1_runs;
    std::vector<double> auc_runs;
    double f1_mean = 0.0;
    double f1_std = 0.0;  // population std, so a single run reports 0
    double auc_mean = 0.0;
    double precision_mean = 0.0;
    double recall_mean = 0.0;
    double threshold_last = 0.0;
    std::size_t n_anomalies = 0;
    std::size_t n_runs = 0;
};

MetricsReport summarize_runs(const std::vector<Confusion>& confusions,
                             const std::vector<double>& aucs, double threshold_last,
                             std::size_t n_anomalies);

// Published comparison table (percent F1, optional std). Values for
// methods other than LOF and this one are citations from prior work, kept
// only for report rendering.
struct ReferenceEntry {
    std::string method;
    // order: arrhythmia, thyroid, kdd, kddrev
    double f1[4];
    std::optional<double> stddev[4];
};

const std::vector<ReferenceEntry>& reference_table();
const ReferenceEntry* reference_lookup(const std::string& method);

}  // namespace goad

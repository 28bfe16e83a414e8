#pragma once

#include <string>
#include <vector>

#include "goad/dataset.hpp"
#include "goad/metrics.hpp"
#include "goad/run_config.hpp"

namespace goad {

struct RunRecord {
    std::uint64_t seed = 0;
    Confusion confusion;
    double auc = 0.0;
    double train_seconds = 0.0;
    double score_seconds = 0.0;
};

struct EvalOutcome {
    MetricsReport report;
    std::vector<RunRecord> runs;
};

// One full protocol run: seeded split, optional standardization, training,
// scoring, threshold at the true anomaly count, metrics.
RunRecord run_once(const EncodedDataset& dataset, const RunConfig& config,
                   std::uint64_t root_seed);

// n_runs independent repetitions with seeds base_seed + k. Runs may execute
// in parallel (config.jobs); aggregation is by run index so the report does
// not depend on scheduling.
EvalOutcome run_repeated(const EncodedDataset& dataset, const RunConfig& config,
                         std::size_t n_runs, std::uint64_t base_seed);

struct SweepPoint {
    double axis_value = 0.0;
    MetricsReport report;
};

struct SweepResult {
    std::string axis;  // "tasks" or "contamination"
    std::vector<SweepPoint> points;
};

// Repeated evaluation while varying the number of tasks. Axis must be
// strictly increasing and non-empty.
SweepResult sweep_tasks(const EncodedDataset& dataset, const RunConfig& config,
                        const std::vector<std::size_t>& task_counts,
                        std::uint64_t base_seed);

// Repeated evaluation while varying the training contamination fraction.
SweepResult contamination_curve(const EncodedDataset& dataset, const RunConfig& config,
                                const std::vector<double>& fractions,
                                std::uint64_t base_seed);

// LOF under the same split/threshold protocol.
EvalOutcome run_repeated_lof(const EncodedDataset& dataset, const RunConfig& config,
                             std::size_t k, std::size_t n_runs, std::uint64_t base_seed);

// Report writers: line-delimited JSON records, a human-readable table with
// the published comparison column, and plain x/y columns for sweeps.
void write_report_jsonl(const std::string& path, const std::string& dataset,
                        const std::string& method, const EvalOutcome& outcome);
std::string render_report(const std::string& dataset, const std::string& method,
                          const EvalOutcome& outcome);
std::string render_reference_table();
void write_sweep_columns(const std::string& path, const SweepResult& sweep);

}  // namespace goad

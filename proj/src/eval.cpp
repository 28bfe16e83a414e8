#include "goad/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "goad/lof.hpp"
#include "goad/rng.hpp"

namespace goad {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix cap_rows(const Matrix& m, std::size_t cap) {
    if (cap == 0 || m.rows() <= cap) return m;
    return Matrix::from_rows(cap, m.cols(),
                             std::vector<double>(m.data(), m.data() + cap * m.cols()));
}

RunRecord evaluate_scores(const SplitResult& parts, const std::vector<double>& scores,
                          std::uint64_t seed) {
    RunRecord record;
    record.seed = seed;
    std::size_t n_anomalies = 0;
    for (std::uint8_t t : parts.test_labels) n_anomalies += t;
    const ThresholdResult threshold = select_threshold(scores, n_anomalies);
    record.confusion = confusion_and_f1(threshold.flagged, parts.test_labels);
    record.auc = roc_auc(scores, parts.test_labels);
    return record;
}

}  // namespace

RunRecord run_once(const EncodedDataset& dataset, const RunConfig& config,
                   std::uint64_t root_seed) {
    RunConfig local = config;
    local.apply_root_seed(root_seed);

    SplitResult parts = split(dataset, local.split);
    fit_normalization(parts.train, parts.test, dataset.continuous, local.normalization);
    parts.train = cap_rows(parts.train, local.max_train_rows);

    const auto t0 = std::chrono::steady_clock::now();
    const GoadModel model = train(parts.train, local.train, local.bank);
    const double train_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const std::vector<double> scores = score_batch(model, parts.test);
    RunRecord record = evaluate_scores(parts, scores, root_seed);
    record.train_seconds = train_seconds;
    record.score_seconds = seconds_since(t1);
    return record;
}

namespace {

EvalOutcome collect_runs(std::vector<RunRecord> records, std::size_t n_anomalies) {
    std::vector<Confusion> confusions;
    std::vector<double> aucs;
    confusions.reserve(records.size());
    for (const RunRecord& r : records) {
        confusions.push_back(r.confusion);
        aucs.push_back(r.auc);
    }
    EvalOutcome outcome;
    outcome.report = summarize_runs(confusions, aucs, 0.0, n_anomalies);
    outcome.runs = std::move(records);
    return outcome;
}

template <typename RunFn>
std::vector<RunRecord> parallel_runs(std::size_t n_runs, int jobs, RunFn&& fn) {
    std::vector<RunRecord> records(n_runs);
    if (jobs <= 1 || n_runs <= 1) {
        for (std::size_t k = 0; k < n_runs; ++k) records[k] = fn(k);
        return records;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n_runs) return;
            records[k] = fn(k);
        }
    };
    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), n_runs);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

}  // namespace

EvalOutcome run_repeated(const EncodedDataset& dataset, const RunConfig& config,
                         std::size_t n_runs, std::uint64_t base_seed) {
    if (n_runs == 0) throw Error("run_repeated: n_runs must be >= 1");
    std::vector<RunRecord> records = parallel_runs(
        n_runs, config.jobs,
        [&](std::size_t k) { return run_once(dataset, config, base_seed + k); });
    return collect_runs(std::move(records), dataset.n_anomalies());
}

SweepResult sweep_tasks(const EncodedDataset& dataset, const RunConfig& config,
                        const std::vector<std::size_t>& task_counts,
                        std::uint64_t base_seed) {
    if (task_counts.empty()) throw Error("sweep_tasks: empty axis");
    for (std::size_t i = 1; i < task_counts.size(); ++i) {
        if (task_counts[i] <= task_counts[i - 1])
            throw Error("sweep_tasks: axis must be strictly increasing");
    }
    SweepResult sweep;
    sweep.axis = "tasks";
    for (std::size_t m : task_counts) {
        RunConfig point = config;
        point.bank.num_tasks = m;
        EvalOutcome outcome = run_repeated(dataset, point, config.n_runs, base_seed);
        sweep.points.push_back({static_cast<double>(m), std::move(outcome.report)});
    }
    return sweep;
}

SweepResult contamination_curve(const EncodedDataset& dataset, const RunConfig& config,
                                const std::vector<double>& fractions,
                                std::uint64_t base_seed) {
    if (fractions.empty()) throw Error("contamination_curve: empty axis");
    for (std::size_t i = 1; i < fractions.size(); ++i) {
        if (fractions[i] <= fractions[i - 1])
            throw Error("contamination_curve: axis must be strictly increasing");
    }
    SweepResult sweep;
    sweep.axis = "contamination";
    for (double f : fractions) {
        RunConfig point = config;
        point.split.contamination_fraction = f;
        EvalOutcome outcome = run_repeated(dataset, point, config.n_runs, base_seed);
        sweep.points.push_back({f, std::move(outcome.report)});
    }
    return sweep;
}

EvalOutcome run_repeated_lof(const EncodedDataset& dataset, const RunConfig& config,
                             std::size_t k, std::size_t n_runs, std::uint64_t base_seed) {
    if (n_runs == 0) throw Error("run_repeated_lof: n_runs must be >= 1");
    std::vector<RunRecord> records =
        parallel_runs(n_runs, config.jobs, [&](std::size_t run) {
            const std::uint64_t root = base_seed + run;
            RunConfig local = config;
            local.apply_root_seed(root);
            SplitResult parts = split(dataset, local.split);
            fit_normalization(parts.train, parts.test, dataset.continuous,
                              local.normalization);
            parts.train = cap_rows(parts.train, local.max_train_rows);

            const auto t0 = std::chrono::steady_clock::now();
            const LofModel model = LofModel::fit(parts.train, k);
            const double fit_seconds = seconds_since(t0);

            const auto t1 = std::chrono::steady_clock::now();
            const std::vector<double> scores = model.score_batch(parts.test);
            RunRecord record = evaluate_scores(parts, scores, root);
            record.train_seconds = fit_seconds;
            record.score_seconds = seconds_since(t1);
            return record;
        });
    return collect_runs(std::move(records), dataset.n_anomalies());
}

void write_report_jsonl(const std::string& path, const std::string& dataset,
                        const std::string& method, const EvalOutcome& outcome) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (std::size_t k = 0; k < outcome.runs.size(); ++k) {
        const RunRecord& r = outcome.runs[k];
        nlohmann::json j{{"record", "run"},
                         {"dataset", dataset},
                         {"method", method},
                         {"run", k},
                         {"seed", r.seed},
                         {"f1", r.confusion.f1},
                         {"precision", r.confusion.precision},
                         {"recall", r.confusion.recall},
                         {"roc_auc", r.auc},
                         {"train_seconds", r.train_seconds},
                         {"score_seconds", r.score_seconds}};
        out << j.dump() << "\n";
    }
    const MetricsReport& rep = outcome.report;
    nlohmann::json summary{{"record", "summary"},
                           {"dataset", dataset},
                           {"method", method},
                           {"n_runs", rep.n_runs},
                           {"f1_mean", rep.f1_mean},
                           {"f1_std", rep.f1_std},
                           {"roc_auc_mean", rep.auc_mean},
                           {"precision_mean", rep.precision_mean},
                           {"recall_mean", rep.recall_mean},
                           {"n_anomalies", rep.n_anomalies}};
    out << summary.dump() << "\n";
}

std::string render_report(const std::string& dataset, const std::string& method,
                          const EvalOutcome& outcome) {
    const MetricsReport& rep = outcome.report;
    std::ostringstream out;
    out << method << " on " << dataset << " (" << rep.n_runs << " runs)\n";
    char line[160];
    std::snprintf(line, sizeof(line),
                  "  F1 %.4f +- %.4f | precision %.4f | recall %.4f | ROC-AUC %.4f\n",
                  rep.f1_mean, rep.f1_std, rep.precision_mean, rep.recall_mean,
                  rep.auc_mean);
    out << line;

    const ReferenceEntry* published =
        reference_lookup(method == "lof" ? "LOF" : "GOAD");
    static const std::string datasets[4] = {"arrhythmia", "thyroid", "kdd", "kddrev"};
    if (published) {
        for (std::size_t i = 0; i < 4; ++i) {
            if (datasets[i] != dataset) continue;
            std::snprintf(line, sizeof(line), "  published %s: %.1f%%", published->method.c_str(),
                          published->f1[i]);
            out << line;
            if (published->stddev[i]) {
                std::snprintf(line, sizeof(line), " +- %.1f", *published->stddev[i]);
                out << line;
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string render_reference_table() {
    std::ostringstream out;
    out << "published F1 (%), blank std where the source left it blank\n";
    char line[200];
    std::snprintf(line, sizeof(line), "%-8s %16s %16s %16s %16s\n", "method", "arrhythmia",
                  "thyroid", "kdd", "kddrev");
    out << line;
    for (const ReferenceEntry& e : reference_table()) {
        out << std::left;
        char cells[4][24];
        for (std::size_t i = 0; i < 4; ++i) {
            if (e.stddev[i])
                std::snprintf(cells[i], sizeof(cells[i]), "%.1f +- %.1f", e.f1[i],
                              *e.stddev[i]);
            else
                std::snprintf(cells[i], sizeof(cells[i]), "%.1f", e.f1[i]);
        }
        std::snprintf(line, sizeof(line), "%-8s %16s %16s %16s %16s\n", e.method.c_str(),
                      cells[0], cells[1], cells[2], cells[3]);
        out << line;
    }
    return out.str();
}

void write_sweep_columns(const std::string& path, const SweepResult& sweep) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "# " << sweep.axis << " f1_mean f1_std\n";
    char line[120];
    for (const SweepPoint& p : sweep.points) {
        std::snprintf(line, sizeof(line), "%.6g %.6f %.6f\n", p.axis_value,
                      p.report.f1_mean, p.report.f1_std);
        out << line;
    }
}

}  // namespace goad

// Command-line front end: train/score/eval/sweep/baseline over delimited
// text datasets, with per-dataset presets and a JSON config for overrides.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "goad/eval.hpp"
#include "goad/lof.hpp"
#include "goad/model_io.hpp"
#include "goad/rng.hpp"

namespace {

using namespace goad;

struct CommonArgs {
    std::string dataset = "custom";
    std::string data_path;
    std::string schema_path;
    std::string config_path;
    std::string cache_path;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::uint64_t bank_seed = 0;
    bool bank_seed_set = false;
    std::string normalize_mode;
    std::size_t n_runs = 0;      // 0 = preset default
    std::size_t num_tasks = 0;   // 0 = preset default
    std::size_t reduced_dim = 0;
    std::size_t epochs = 0;
    std::string score_mode;
    double contamination = -1.0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_data) {
    cmd->add_option("--dataset", args.dataset,
                    "dataset preset: arrhythmia, thyroid, kdd, kddrev or custom");
    auto* data = cmd->add_option("--data", args.data_path, "input table (CSV)");
    if (needs_data) data->required();
    cmd->add_option("--schema", args.schema_path, "schema JSON (defaults to the preset's)");
    cmd->add_option("--config", args.config_path, "run config JSON with field overrides");
    cmd->add_option("--cache", args.cache_path,
                    "encoded dataset cache; created when absent, reused when present");
    cmd->add_option("--seed", args.seed, "root seed");
    cmd->add_option("--jobs", args.jobs, "worker threads for repeated runs / scoring");
    cmd->add_option("--bank-seed", args.bank_seed, "pin the task bank seed separately")
        ->each([&args](const std::string&) { args.bank_seed_set = true; });
    cmd->add_option("--normalize", args.normalize_mode,
                    "continuous-column rescaling: minmax (default), zscore or none");
    cmd->add_option("--runs", args.n_runs, "number of repeated runs");
    cmd->add_option("--tasks", args.num_tasks, "number of transformation tasks");
    cmd->add_option("--reduced-dim", args.reduced_dim, "transformed dimension");
    cmd->add_option("--epochs", args.epochs, "training epochs");
    cmd->add_option("--score-mode", args.score_mode, "openset or softmax");
    cmd->add_option("--contamination", args.contamination,
                    "fraction of training rows drawn from the anomaly pool");
}

RunConfig build_config(const CommonArgs& args) {
    RunConfig config = preset_config(args.dataset);
    if (!args.config_path.empty()) merge_run_config_json(config, args.config_path);
    if (!args.data_path.empty()) config.data_path = args.data_path;
    if (!args.schema_path.empty()) config.schema_path = args.schema_path;
    config.jobs = args.jobs;
    if (!args.normalize_mode.empty()) {
        if (args.normalize_mode == "minmax") config.normalization = NormMode::kMinMax;
        else if (args.normalize_mode == "zscore") config.normalization = NormMode::kZScore;
        else if (args.normalize_mode == "none") config.normalization = NormMode::kNone;
        else throw Error("unknown normalization '" + args.normalize_mode + "'");
    }
    if (args.n_runs > 0) config.n_runs = args.n_runs;
    if (args.num_tasks > 0) config.bank.num_tasks = args.num_tasks;
    if (args.reduced_dim > 0) config.bank.reduced_dim = args.reduced_dim;
    if (args.epochs > 0) config.train.epochs = args.epochs;
    if (args.bank_seed_set) config.bank_seed_override = args.bank_seed;
    if (!args.score_mode.empty()) {
        if (args.score_mode == "openset")
            config.train.score_mode = ScoreMode::kOpenSetDistance;
        else if (args.score_mode == "softmax")
            config.train.score_mode = ScoreMode::kClosedSetSoftmax;
        else
            throw Error("unknown score mode '" + args.score_mode + "'");
    }
    if (args.contamination >= 0.0) config.split.contamination_fraction = args.contamination;
    config.apply_root_seed(args.seed);
    return config;
}

TableSchema resolve_schema(const RunConfig& config) {
    if (!config.schema_path.empty()) return schema_from_json_file(config.schema_path);
    return preset_schema(config.dataset);
}

EncodedDataset load_dataset(const RunConfig& config, const CommonArgs& args) {
    if (!args.cache_path.empty() && std::filesystem::exists(args.cache_path)) {
        std::cout << "loading encoded cache " << args.cache_path << "\n";
        return load_encoded(args.cache_path);
    }
    if (config.data_path.empty()) throw Error("no --data path given");
    const TableSchema schema = resolve_schema(config);
    const RawTable raw = load_table(config.data_path, schema);
    std::cout << "loaded " << raw.n_rows << " rows from " << config.data_path << "\n";
    EncodedDataset ds = encode(raw, schema);
    std::cout << "encoded to " << ds.x.cols() << " columns, " << ds.n_anomalies()
              << " anomalies\n";
    if (!args.cache_path.empty()) {
        save_encoded(args.cache_path, ds);
        std::cout << "wrote encoded cache " << args.cache_path << "\n";
    }
    return ds;
}

void write_scores(const std::string& path, const std::vector<double>& scores) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    char buf[40];
    for (double s : scores) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", s);
        out << buf;
    }
}

int cmd_train(const CommonArgs& args, const std::string& out_path) {
    const RunConfig config = build_config(args);
    const EncodedDataset ds = load_dataset(config, args);

    RunConfig local = config;
    local.apply_root_seed(args.seed);
    SplitResult parts = split(ds, local.split);
    PreprocessInfo pre;
    pre.feature_names = ds.feature_names;
    pre.continuous = ds.continuous;
    pre.schema_hash = schema_fingerprint(ds);
    pre.stats = fit_normalization(parts.train, parts.test, ds.continuous,
                                  local.normalization);

    std::cout << "training on " << parts.train.rows() << " rows ("
              << parts.n_train_anomalies << " contaminating anomalies), "
              << local.bank.num_tasks << " tasks\n";
    TrainLog log;
    const GoadModel model = train(parts.train, local.train, local.bank, &log);
    for (std::size_t e = 0; e < log.epochs.size(); ++e) {
        std::printf("epoch %zu: loss %.6f (triplet %.6f, ce %.6f, feat_l2 %.6f)\n", e + 1,
                    log.epochs[e].loss, log.epochs[e].triplet, log.epochs[e].ce,
                    log.epochs[e].feat_l2);
    }
    save_model(out_path, ModelFile{model, pre});
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_score(const std::string& model_path, const CommonArgs& args,
              const std::string& out_path) {
    const ModelFile file = load_model(model_path);
    if (!file.preprocess)
        throw Error("model carries no preprocessing block; cannot encode raw input");

    RunConfig config = preset_config(args.dataset);
    if (!args.schema_path.empty()) config.schema_path = args.schema_path;
    config.dataset = args.dataset;
    const TableSchema schema = resolve_schema(config);
    const RawTable raw = load_table(args.data_path, schema);
    EncodedDataset ds = encode_with_names(raw, schema, file.preprocess->feature_names,
                                          file.preprocess->continuous);
    if (schema_fingerprint(ds) != file.preprocess->schema_hash)
        throw Error("input schema does not match the one the model was trained with");
    apply_standardization(ds.x, file.preprocess->stats);

    const std::vector<double> scores = score_batch(file.model, ds.x, args.jobs);
    if (out_path.empty() || out_path == "-") {
        char buf[40];
        for (double s : scores) {
            std::snprintf(buf, sizeof(buf), "%.17g\n", s);
            std::cout << buf;
        }
    } else {
        write_scores(out_path, scores);
        std::cout << "wrote " << scores.size() << " scores to " << out_path << "\n";
    }
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& out_prefix) {
    const RunConfig config = build_config(args);
    const EncodedDataset ds = load_dataset(config, args);

    const EvalOutcome outcome = run_repeated(ds, config, config.n_runs, args.seed);
    std::cout << render_report(config.dataset, "goad", outcome);
    std::cout << render_reference_table();
    if (!out_prefix.empty()) {
        write_report_jsonl(out_prefix + ".jsonl", config.dataset, "goad", outcome);
        std::cout << "wrote " << out_prefix << ".jsonl\n";
    }
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis,
              const std::string& values_csv, const std::string& out_prefix) {
    const RunConfig config = build_config(args);
    const EncodedDataset ds = load_dataset(config, args);

    SweepResult sweep;
    if (axis == "tasks") {
        std::vector<std::size_t> counts;
        std::stringstream ss(values_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) counts.push_back(std::stoul(tok));
        sweep = sweep_tasks(ds, config, counts, args.seed);
    } else if (axis == "contamination") {
        std::vector<double> fractions;
        std::stringstream ss(values_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) fractions.push_back(std::stod(tok));
        sweep = contamination_curve(ds, config, fractions, args.seed);
    } else {
        throw Error("unknown sweep axis '" + axis + "' (tasks or contamination)");
    }

    for (const SweepPoint& p : sweep.points) {
        std::printf("%s %.6g: F1 %.4f +- %.4f\n", sweep.axis.c_str(), p.axis_value,
                    p.report.f1_mean, p.report.f1_std);
    }
    if (!out_prefix.empty()) {
        write_sweep_columns(out_prefix + ".dat", sweep);
        std::cout << "wrote " << out_prefix << ".dat\n";
    }
    return 0;
}

int cmd_baseline(const CommonArgs& args, const std::string& method, std::size_t k,
                 const std::string& out_prefix) {
    if (method != "lof")
        throw Error("unknown baseline '" + method + "' (available: lof)");
    const RunConfig config = build_config(args);
    const EncodedDataset ds = load_dataset(config, args);

    const std::size_t runs = config.n_runs;
    const EvalOutcome outcome = run_repeated_lof(ds, config, k, runs, args.seed);
    std::cout << render_report(config.dataset, "lof", outcome);
    if (!out_prefix.empty()) {
        write_report_jsonl(out_prefix + ".jsonl", config.dataset, "lof", outcome);
        std::cout << "wrote " << out_prefix << ".jsonl\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classification-based anomaly detection for tabular data"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string out_path;
    std::string model_path;
    std::string axis = "tasks";
    std::string values = "2,4,8,16,32,64,128,256";
    std::string method = "lof";
    std::size_t lof_k = 20;

    CLI::App* train_cmd = app.add_subcommand("train", "fit a model and write it to disk");
    add_common(train_cmd, args, true);
    train_cmd->add_option("--out", out_path, "model file path")->required();

    CLI::App* score_cmd =
        app.add_subcommand("score", "score rows with a trained model, one score per line");
    score_cmd->add_option("--model", model_path, "model file")->required();
    score_cmd->add_option("--data", args.data_path, "input table (CSV)")->required();
    score_cmd->add_option("--dataset", args.dataset, "dataset preset for the schema");
    score_cmd->add_option("--schema", args.schema_path, "schema JSON");
    score_cmd->add_option("--jobs", args.jobs, "scoring threads");
    score_cmd->add_option("--out", out_path, "output path ('-' for stdout)");

    CLI::App* eval_cmd = app.add_subcommand("eval", "repeated protocol runs with metrics");
    add_common(eval_cmd, args, true);
    eval_cmd->add_option("--out", out_path, "report prefix (.jsonl appended)");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "metrics along a parameter axis");
    add_common(sweep_cmd, args, true);
    sweep_cmd->add_option("--axis", axis, "tasks or contamination");
    sweep_cmd->add_option("--values", values, "comma-separated axis values");
    sweep_cmd->add_option("--out", out_path, "output prefix (.dat appended)");

    CLI::App* baseline_cmd = app.add_subcommand("baseline", "baseline methods, same protocol");
    add_common(baseline_cmd, args, true);
    baseline_cmd->add_option("--method", method, "baseline method (lof)");
    baseline_cmd->add_option("--k", lof_k, "neighbor count for lof");
    baseline_cmd->add_option("--out", out_path, "report prefix (.jsonl appended)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(args, out_path);
        if (score_cmd->parsed()) return cmd_score(model_path, args, out_path);
        if (eval_cmd->parsed()) return cmd_eval(args, out_path);
        if (sweep_cmd->parsed()) return cmd_sweep(args, axis, values, out_path);
        if (baseline_cmd->parsed()) return cmd_baseline(args, method, lof_k, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

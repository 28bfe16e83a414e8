#include "goad/run_config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "goad/rng.hpp"

namespace goad {

void RunConfig::apply_root_seed(std::uint64_t root) {
    train.seed = root;
    bank.seed = bank_seed_override.value_or(seed_split(root, 0));
    split.seed = seed_split(root, 3);
}

RunConfig preset_config(const std::string& dataset) {
    RunConfig config;
    config.dataset = dataset;
    config.train.margin = 1.0;
    config.train.epsilon = 1e-12;
    config.train.learning_rate = 1e-3;
    config.train.batch_size = 256;
    config.train.ce_weight = 1.0;
    config.train.feat_l2_weight = 1e-3;
    config.split.train_fraction_of_normals = 0.5;

    if (dataset == "thyroid" || dataset == "arrhythmia") {
        config.bank.num_tasks = 256;
        config.bank.reduced_dim = 32;
        config.train.feature_dim = 8;
        config.train.hidden_dims = {};  // linear feature map
        config.train.epochs = 1;
        config.n_runs = 100;
    } else if (dataset == "kddrev") {
        config.bank.num_tasks = 256;
        config.bank.reduced_dim = 64;
        config.train.feature_dim = 128;
        config.train.hidden_dims = {128};
        config.train.epochs = 25;
        config.n_runs = 5;
        config.split.anomaly_subsample_ratio = 0.25;
    } else if (dataset == "kdd") {
        config.bank.num_tasks = 64;
        config.bank.reduced_dim = 128;
        config.train.feature_dim = 32;
        config.train.hidden_dims = {32};
        config.train.epochs = 25;
        config.n_runs = 5;
    } else if (dataset == "custom") {
        // generic small-data defaults
        config.bank.num_tasks = 64;
        config.bank.reduced_dim = 16;
        config.train.feature_dim = 8;
        config.train.epochs = 5;
    } else {
        throw Error("unknown dataset preset '" + dataset +
                    "' (known: arrhythmia, thyroid, kdd, kddrev, custom)");
    }
    return config;
}

TableSchema preset_schema(const std::string& dataset) {
    TableSchema schema;
    auto continuous_block = [&schema](std::size_t n, const std::string& prefix) {
        for (std::size_t i = 1; i <= n; ++i) {
            schema.columns.push_back({prefix + std::to_string(i), ColKind::kContinuous});
        }
    };

    if (dataset == "thyroid") {
        // ODDS-preprocessed file: 6 continuous attributes, 0/1 label
        continuous_block(6, "f");
        schema.columns.push_back({"class", ColKind::kLabel});
        schema.label_rule.anomaly_values = {"1"};
    } else if (dataset == "arrhythmia") {
        // ODDS-preprocessed file: 274 continuous attributes, 0/1 label.
        // label_rules("arrhythmia") carries the raw-class mapping instead.
        continuous_block(274, "f");
        schema.columns.push_back({"class", ColKind::kLabel});
        schema.label_rule.anomaly_values = {"1"};
    } else if (dataset == "kdd" || dataset == "kddrev") {
        // 41 attributes; the three protocol strings and four binary flags
        // are one-hot encoded, the rest stay continuous.
        static const char* names[41] = {
            "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
            "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
            "num_compromised", "root_shell", "su_attempted", "num_root",
            "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
            "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
            "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
            "diff_srv_rate", "srv_diff_host_rate", "dst_host_count", "dst_host_srv_count",
            "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
            "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
            "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
            "dst_host_srv_rerror_rate"};
        static const std::size_t categorical_idx[7] = {1, 2, 3, 6, 11, 20, 21};
        for (std::size_t i = 0; i < 41; ++i) {
            ColKind kind = ColKind::kContinuous;
            for (std::size_t c : categorical_idx)
                if (c == i) kind = ColKind::kCategorical;
            schema.columns.push_back({names[i], kind});
        }
        schema.columns.push_back({"label", ColKind::kLabel});
        schema.label_rule = label_rules(dataset).label;
    } else {
        throw Error("no built-in schema for dataset '" + dataset + "'");
    }
    return schema;
}

namespace {

void merge_json(RunConfig& config, const nlohmann::json& j) {
    if (j.contains("dataset")) config.dataset = j["dataset"].get<std::string>();
    if (j.contains("data_path")) config.data_path = j["data_path"].get<std::string>();
    if (j.contains("schema_path")) config.schema_path = j["schema_path"].get<std::string>();
    if (j.contains("n_runs")) config.n_runs = j["n_runs"].get<std::size_t>();
    if (j.contains("jobs")) config.jobs = j["jobs"].get<int>();
    if (j.contains("normalization")) {
        const std::string mode = j["normalization"].get<std::string>();
        if (mode == "minmax") config.normalization = NormMode::kMinMax;
        else if (mode == "zscore") config.normalization = NormMode::kZScore;
        else if (mode == "none") config.normalization = NormMode::kNone;
        else throw Error("unknown normalization '" + mode + "'");
    }
    if (j.contains("max_train_rows"))
        config.max_train_rows = j["max_train_rows"].get<std::size_t>();
    if (j.contains("bank_seed"))
        config.bank_seed_override = j["bank_seed"].get<std::uint64_t>();

    if (j.contains("train")) {
        const auto& t = j["train"];
        TrainConfig& c = config.train;
        if (t.contains("margin")) c.margin = t["margin"].get<double>();
        if (t.contains("epsilon")) c.epsilon = t["epsilon"].get<double>();
        if (t.contains("epochs")) c.epochs = t["epochs"].get<std::size_t>();
        if (t.contains("batch_size")) c.batch_size = t["batch_size"].get<std::size_t>();
        if (t.contains("learning_rate")) c.learning_rate = t["learning_rate"].get<double>();
        if (t.contains("ce_weight")) c.ce_weight = t["ce_weight"].get<double>();
        if (t.contains("feat_l2_weight"))
            c.feat_l2_weight = t["feat_l2_weight"].get<double>();
        if (t.contains("hidden_dims"))
            c.hidden_dims = t["hidden_dims"].get<std::vector<std::size_t>>();
        if (t.contains("feature_dim")) c.feature_dim = t["feature_dim"].get<std::size_t>();
        if (t.contains("leaky_slope")) c.leaky_slope = t["leaky_slope"].get<double>();
        if (t.contains("center_mode")) {
            const std::string mode = t["center_mode"].get<std::string>();
            if (mode == "recomputed-means") c.center_mode = CenterMode::kRecomputedMeans;
            else if (mode == "learned-free") c.center_mode = CenterMode::kLearnedFree;
            else throw Error("unknown center_mode '" + mode + "'");
        }
        if (t.contains("score_mode")) {
            const std::string mode = t["score_mode"].get<std::string>();
            if (mode == "openset") c.score_mode = ScoreMode::kOpenSetDistance;
            else if (mode == "softmax") c.score_mode = ScoreMode::kClosedSetSoftmax;
            else throw Error("unknown score_mode '" + mode + "'");
        }
    }
    if (j.contains("split")) {
        const auto& s = j["split"];
        if (s.contains("train_fraction"))
            config.split.train_fraction_of_normals = s["train_fraction"].get<double>();
        if (s.contains("contamination"))
            config.split.contamination_fraction = s["contamination"].get<double>();
        if (s.contains("anomaly_subsample_ratio"))
            config.split.anomaly_subsample_ratio =
                s["anomaly_subsample_ratio"].get<double>();
    }
    if (j.contains("bank")) {
        const auto& b = j["bank"];
        if (b.contains("num_tasks")) config.bank.num_tasks = b["num_tasks"].get<std::size_t>();
        if (b.contains("reduced_dim"))
            config.bank.reduced_dim = b["reduced_dim"].get<std::size_t>();
        if (b.contains("generator"))
            config.bank.generator = task_generator_from_name(b["generator"].get<std::string>());
        if (b.contains("scale")) config.bank.scale = b["scale"].get<double>();
    }
}

}  // namespace

void merge_run_config_json(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
    merge_json(config, j);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
    RunConfig config =
        j.contains("dataset") ? preset_config(j["dataset"].get<std::string>())
                              : preset_config("custom");
    merge_json(config, j);
    return config;
}

}  // namespace goad

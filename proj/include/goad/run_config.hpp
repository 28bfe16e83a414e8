#pragma once

#include <optional>
#include <string>

#include "goad/dataset.hpp"
#include "goad/goad.hpp"

namespace goad {

// Everything one experiment needs: data location, schema, training
// hyperparameters, split protocol, task bank shape and repetition count.
// Presets carry the published per-dataset settings; a JSON config and CLI
// flags override individual fields.
struct RunConfig {
    std::string dataset;      // arrhythmia | thyroid | kdd | kddrev | custom
    std::string data_path;
    std::string schema_path;  // optional when the dataset preset implies one

    TrainConfig train;
    SplitSpec split;
    BankSpec bank;            // input_dim resolved from the data
    std::size_t n_runs = 1;
    int jobs = 1;
    NormMode normalization = NormMode::kMinMax;
    std::size_t max_train_rows = 0;  // 0 = no cap; off-protocol convenience
    std::optional<std::uint64_t> bank_seed_override;

    void apply_root_seed(std::uint64_t root);
};

// Published per-dataset settings.
RunConfig preset_config(const std::string& dataset);

// Built-in column schemas for the known datasets.
TableSchema preset_schema(const std::string& dataset);

// Reads a JSON run config; fields not present keep the preset defaults.
RunConfig load_run_config(const std::string& path);
void merge_run_config_json(RunConfig& config, const std::string& path);

}  // namespace goad

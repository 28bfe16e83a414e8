#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "goad/matrix.hpp"

namespace goad {

enum class ColKind : std::uint8_t { kContinuous = 0, kCategorical = 1, kLabel = 2 };

struct ColumnSpec {
    std::string name;
    ColKind kind = ColKind::kContinuous;
};

// Which raw label values mark a row anomalous. When invert is set the rule
// flips: values NOT in the set are anomalous.
struct LabelRule {
    std::unordered_set<std::string> anomaly_values;
    bool invert = false;

    bool is_anomaly(const std::string& value) const {
        return anomaly_values.contains(value) != invert;
    }
};

struct TableSchema {
    std::vector<ColumnSpec> columns;
    LabelRule label_rule;
    char delimiter = ',';
    bool has_header = false;

    std::size_t label_column() const;  // throws unless exactly one label column
    void validate() const;
};

// Typed columns after the parse pass.
struct RawTable {
    std::vector<std::vector<double>> continuous;          // per continuous column
    std::vector<std::vector<std::string>> categorical;    // per categorical column
    std::vector<std::string> labels;
    std::vector<std::size_t> continuous_cols;             // schema indices
    std::vector<std::size_t> categorical_cols;
    std::size_t n_rows = 0;
};

struct EncodedDataset {
    Matrix x;                                // N x L
    std::vector<std::uint8_t> y;             // 1 = anomaly
    std::vector<std::string> feature_names;  // length L
    std::vector<bool> continuous;            // per encoded column
    std::size_t n_anomalies() const;
};

// Named per-dataset conventions: label mapping plus, for the reversed
// intrusion set, the anomaly subsampling ratio applied at split time.
struct DatasetRule {
    LabelRule label;
    // subsample anomalies to this fraction of the normal count (0 = keep all)
    double anomaly_subsample_ratio = 0.0;
};

// Known names: arrhythmia, thyroid, kdd, kddrev.
DatasetRule label_rules(const std::string& dataset_name);

RawTable load_table(const std::string& path, const TableSchema& schema);

// One-hot encodes categorical columns (value order = first seen), keeps
// continuous columns as-is. Column order follows the schema.
EncodedDataset encode(const RawTable& raw, const TableSchema& schema);

// Re-encodes against an existing feature layout (e.g. the one a model was
// trained with). Categorical values unseen at training time produce an
// all-zero block and a warning on stderr.
EncodedDataset encode_with_names(const RawTable& raw, const TableSchema& schema,
                                 const std::vector<std::string>& feature_names,
                                 const std::vector<bool>& continuous);

struct SplitSpec {
    double train_fraction_of_normals = 0.5;
    std::uint64_t seed = 0;
    double contamination_fraction = 0.0;  // fraction of train rows that are anomalies
    double anomaly_subsample_ratio = 0.0; // see DatasetRule

    void validate() const;
};

struct SplitResult {
    Matrix train;                        // train rows (normals + any contamination)
    Matrix test;
    std::vector<std::uint8_t> test_labels;
    std::vector<std::size_t> train_indices;  // into the encoded dataset
    std::vector<std::size_t> test_indices;
    std::size_t n_train_anomalies = 0;
};

// Seeded protocol split: half the normals train, the other half plus all
// anomalies test. With contamination > 0 the anomalies are themselves
// split and the train share is mixed in unlabeled.
SplitResult split(const EncodedDataset& dataset, const SplitSpec& spec);

// How continuous columns are rescaled before training. MinMax keeps the
// column means nonzero, which the distance classifier needs when the
// feature map is linear (zero-mean columns make every per-task center
// coincide at the origin). ZScore is the classic alternative; None leaves
// raw values.
enum class NormMode : std::uint8_t { kNone = 0, kZScore = 1, kMinMax = 2 };

// Per-column affine rescale x' = (x - shift) / scale fitted on train data.
struct NormalizationStats {
    NormMode mode = NormMode::kNone;
    std::vector<double> mean;             // shift (mean or min)
    std::vector<double> std_dev;          // scale (std or range); 0 = shift only
    std::vector<std::uint8_t> applied;    // rescaled columns
};

// Train-fitted z-scoring of continuous columns, applied to both matrices.
// Constant columns are centered only.
NormalizationStats standardize(Matrix& train, Matrix& test,
                               const std::vector<bool>& continuous);

// Train-fitted min-max rescaling to [0, 1]; constant columns map to 0.
NormalizationStats normalize_minmax(Matrix& train, Matrix& test,
                                    const std::vector<bool>& continuous);

NormalizationStats fit_normalization(Matrix& train, Matrix& test,
                                     const std::vector<bool>& continuous, NormMode mode);

void apply_standardization(Matrix& m, const NormalizationStats& stats);

// FNV-1a over feature names + kinds; persisted with models so a scoring
// input encoded under a different schema is rejected.
std::uint64_t schema_fingerprint(const EncodedDataset& dataset);

// Versioned binary cache of an encoded dataset.
void save_encoded(const std::string& path, const EncodedDataset& dataset);
EncodedDataset load_encoded(const std::string& path);

// Schema from a small JSON config (columns, kinds, label rule, delimiter).
TableSchema schema_from_json_file(const std::string& path);

}  // namespace goad

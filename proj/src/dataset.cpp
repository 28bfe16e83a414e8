#include "goad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "goad/rng.hpp"

namespace goad {

std::size_t TableSchema::label_column() const {
    std::size_t found = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind != ColKind::kLabel) continue;
        if (found != columns.size()) throw Error("schema: more than one label column");
        found = i;
    }
    if (found == columns.size()) throw Error("schema: no label column");
    return found;
}

void TableSchema::validate() const {
    if (columns.empty()) throw Error("schema: no columns");
    label_column();
}

std::size_t EncodedDataset::n_anomalies() const {
    std::size_t n = 0;
    for (std::uint8_t v : y) n += v;
    return n;
}

DatasetRule label_rules(const std::string& dataset_name) {
    DatasetRule rule;
    if (dataset_name == "arrhythmia") {
        rule.label.anomaly_values = {"3", "4", "5", "7", "8", "9", "14", "15"};
    } else if (dataset_name == "thyroid") {
        rule.label.anomaly_values = {"1"};
    } else if (dataset_name == "kdd") {
        // The non-attack class is the minority here and is scored as the anomaly.
        rule.label.anomaly_values = {"normal.", "normal"};
    } else if (dataset_name == "kddrev") {
        // Attacks anomalous, subsampled to a quarter of the non-attack count.
        rule.label.anomaly_values = {"normal.", "normal"};
        rule.label.invert = true;
        rule.anomaly_subsample_ratio = 0.25;
    } else {
        throw Error("unknown dataset '" + dataset_name +
                    "' (known: arrhythmia, thyroid, kdd, kddrev); use a custom label rule");
    }
    return rule;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delim)) fields.push_back(field);
    if (!line.empty() && line.back() == delim) fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

RawTable load_table(const std::string& path, const TableSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    RawTable raw;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        if (schema.columns[i].kind == ColKind::kContinuous) {
            raw.continuous_cols.push_back(i);
            raw.continuous.emplace_back();
        } else if (schema.columns[i].kind == ColKind::kCategorical) {
            raw.categorical_cols.push_back(i);
            raw.categorical.emplace_back();
        }
    }
    const std::size_t label_col = schema.label_column();

    std::unordered_map<std::size_t, std::size_t> cont_slot, cat_slot;
    for (std::size_t s = 0; s < raw.continuous_cols.size(); ++s)
        cont_slot[raw.continuous_cols[s]] = s;
    for (std::size_t s = 0; s < raw.categorical_cols.size(); ++s)
        cat_slot[raw.categorical_cols[s]] = s;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = schema.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_line(line, schema.delimiter);
        if (fields.size() != schema.columns.size()) {
            throw ParseError("'" + path + "' row " + std::to_string(line_no) + ": expected " +
                             std::to_string(schema.columns.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string value = trim(fields[i]);
            switch (schema.columns[i].kind) {
                case ColKind::kContinuous: {
                    try {
                        std::size_t consumed = 0;
                        const double v = std::stod(value, &consumed);
                        if (consumed != value.size()) throw std::invalid_argument(value);
                        raw.continuous[cont_slot[i]].push_back(v);
                    } catch (const std::exception&) {
                        throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                                         ", column '" + schema.columns[i].name +
                                         "': not a number: '" + value + "'");
                    }
                    break;
                }
                case ColKind::kCategorical:
                    raw.categorical[cat_slot[i]].push_back(value);
                    break;
                case ColKind::kLabel:
                    (void)label_col;
                    raw.labels.push_back(value);
                    break;
            }
        }
        ++raw.n_rows;
    }
    return raw;
}

EncodedDataset encode(const RawTable& raw, const TableSchema& schema) {
    // Value sets per categorical column, in first-seen order.
    std::vector<std::vector<std::string>> values(raw.categorical.size());
    std::vector<std::unordered_map<std::string, std::size_t>> value_index(raw.categorical.size());
    for (std::size_t c = 0; c < raw.categorical.size(); ++c) {
        for (const std::string& v : raw.categorical[c]) {
            if (value_index[c].emplace(v, values[c].size()).second) values[c].push_back(v);
        }
    }

    EncodedDataset out;
    std::size_t width = raw.continuous.size();
    for (const auto& vals : values) width += vals.size();

    // Encoded column order follows the schema column order.
    std::vector<std::size_t> offsets;  // per schema column -> first encoded column
    std::size_t cont_seen = 0, cat_seen = 0, offset = 0;
    for (const ColumnSpec& col : schema.columns) {
        offsets.push_back(offset);
        if (col.kind == ColKind::kContinuous) {
            out.feature_names.push_back(col.name);
            out.continuous.push_back(true);
            ++cont_seen;
            ++offset;
        } else if (col.kind == ColKind::kCategorical) {
            for (const std::string& v : values[cat_seen]) {
                out.feature_names.push_back(col.name + "=" + v);
                out.continuous.push_back(false);
            }
            offset += values[cat_seen].size();
            ++cat_seen;
        }
    }
    (void)cont_seen;

    out.x = Matrix(raw.n_rows, width);
    std::size_t cont_slot = 0, cat_slot = 0;
    std::size_t schema_idx = 0;
    for (const ColumnSpec& col : schema.columns) {
        const std::size_t base = offsets[schema_idx++];
        if (col.kind == ColKind::kContinuous) {
            const auto& vals = raw.continuous[cont_slot++];
            for (std::size_t i = 0; i < raw.n_rows; ++i) out.x(i, base) = vals[i];
        } else if (col.kind == ColKind::kCategorical) {
            const auto& vals = raw.categorical[cat_slot];
            const auto& index = value_index[cat_slot];
            for (std::size_t i = 0; i < raw.n_rows; ++i) {
                out.x(i, base + index.at(vals[i])) = 1.0;
            }
            ++cat_slot;
        }
    }

    out.y.resize(raw.n_rows);
    for (std::size_t i = 0; i < raw.n_rows; ++i) {
        out.y[i] = schema.label_rule.is_anomaly(raw.labels[i]) ? 1 : 0;
    }
    return out;
}

EncodedDataset encode_with_names(const RawTable& raw, const TableSchema& schema,
                                 const std::vector<std::string>& feature_names,
                                 const std::vector<bool>& continuous) {
    EncodedDataset out;
    out.feature_names = feature_names;
    out.continuous = continuous;
    out.x = Matrix(raw.n_rows, feature_names.size());

    // Rebuild the per-column layout from the stored names: continuous
    // columns match the schema name, one-hot columns are "name=value".
    std::unordered_map<std::string, std::size_t> name_to_col;
    for (std::size_t j = 0; j < feature_names.size(); ++j) name_to_col[feature_names[j]] = j;

    std::unordered_set<std::string> warned;
    std::size_t cont_slot = 0, cat_slot = 0;
    for (const ColumnSpec& col : schema.columns) {
        if (col.kind == ColKind::kContinuous) {
            const auto it = name_to_col.find(col.name);
            if (it == name_to_col.end())
                throw Error("encode: column '" + col.name + "' missing from model layout");
            const auto& vals = raw.continuous[cont_slot++];
            for (std::size_t i = 0; i < raw.n_rows; ++i) out.x(i, it->second) = vals[i];
        } else if (col.kind == ColKind::kCategorical) {
            const auto& vals = raw.categorical[cat_slot++];
            for (std::size_t i = 0; i < raw.n_rows; ++i) {
                const std::string key = col.name + "=" + vals[i];
                const auto it = name_to_col.find(key);
                if (it == name_to_col.end()) {
                    if (warned.insert(key).second) {
                        std::cerr << "warning: unknown categorical value '" << vals[i]
                                  << "' in column '" << col.name
                                  << "'; encoding as all-zero block\n";
                    }
                    continue;
                }
                out.x(i, it->second) = 1.0;
            }
        }
    }
    out.y.resize(raw.n_rows);
    for (std::size_t i = 0; i < raw.n_rows; ++i) {
        out.y[i] = schema.label_rule.is_anomaly(raw.labels[i]) ? 1 : 0;
    }
    return out;
}

void SplitSpec::validate() const {
    if (train_fraction_of_normals < 0.0 || train_fraction_of_normals > 1.0)
        throw Error("split: train fraction must be in [0,1]");
    if (contamination_fraction < 0.0 || contamination_fraction > 1.0)
        throw Error("split: contamination fraction must be in [0,1]");
    if (anomaly_subsample_ratio < 0.0)
        throw Error("split: anomaly subsample ratio must be >= 0");
}

SplitResult split(const EncodedDataset& dataset, const SplitSpec& spec) {
    spec.validate();
    std::vector<std::size_t> normals, anomalies;
    for (std::size_t i = 0; i < dataset.y.size(); ++i) {
        (dataset.y[i] ? anomalies : normals).push_back(i);
    }
    if (normals.size() < 2) throw Error("split: need at least 2 normal rows");

    Rng rng(spec.seed);
    rng.shuffle(normals);

    if (spec.anomaly_subsample_ratio > 0.0) {
        const std::size_t keep = std::min(
            anomalies.size(),
            static_cast<std::size_t>(std::llround(spec.anomaly_subsample_ratio *
                                                  static_cast<double>(normals.size()))));
        rng.shuffle(anomalies);
        anomalies.resize(keep);
        std::sort(anomalies.begin(), anomalies.end());
    }

    const std::size_t n_train =
        static_cast<std::size_t>(spec.train_fraction_of_normals *
                                 static_cast<double>(normals.size()));
    std::vector<std::size_t> train_idx(normals.begin(), normals.begin() + n_train);
    std::vector<std::size_t> test_normals(normals.begin() + n_train, normals.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_normals.begin(), test_normals.end());

    std::vector<std::size_t> test_anomalies = anomalies;
    std::size_t n_contaminate = 0;
    if (spec.contamination_fraction > 0.0) {
        // k anomalies into train so that k / (n_train + k) = fraction
        const double f = spec.contamination_fraction;
        n_contaminate = static_cast<std::size_t>(
            std::llround(f * static_cast<double>(train_idx.size()) / (1.0 - f)));
        n_contaminate = std::min(n_contaminate, anomalies.size());
        std::vector<std::size_t> pool = anomalies;
        rng.shuffle(pool);
        std::vector<std::size_t> contaminate(pool.begin(), pool.begin() + n_contaminate);
        test_anomalies.assign(pool.begin() + n_contaminate, pool.end());
        std::sort(test_anomalies.begin(), test_anomalies.end());
        std::sort(contaminate.begin(), contaminate.end());
        train_idx.insert(train_idx.end(), contaminate.begin(), contaminate.end());
        std::sort(train_idx.begin(), train_idx.end());
    }

    SplitResult result;
    result.n_train_anomalies = n_contaminate;
    result.train_indices = train_idx;
    result.test_indices = test_normals;
    result.test_indices.insert(result.test_indices.end(), test_anomalies.begin(),
                               test_anomalies.end());

    result.train = Matrix(result.train_indices.size(), dataset.x.cols());
    for (std::size_t i = 0; i < result.train_indices.size(); ++i) {
        auto src = dataset.x.row(result.train_indices[i]);
        std::copy(src.begin(), src.end(), result.train.row(i).begin());
    }
    result.test = Matrix(result.test_indices.size(), dataset.x.cols());
    result.test_labels.resize(result.test_indices.size());
    for (std::size_t i = 0; i < result.test_indices.size(); ++i) {
        auto src = dataset.x.row(result.test_indices[i]);
        std::copy(src.begin(), src.end(), result.test.row(i).begin());
        result.test_labels[i] = dataset.y[result.test_indices[i]];
    }
    return result;
}

NormalizationStats standardize(Matrix& train, Matrix& test,
                               const std::vector<bool>& continuous) {
    require_dim(continuous.size() == train.cols(), "standardize: column mask size",
                train.cols(), continuous.size());
    require_dim(test.cols() == train.cols(), "standardize: test cols", train.cols(),
                test.cols());
    NormalizationStats stats;
    stats.mode = NormMode::kZScore;
    stats.mean.assign(train.cols(), 0.0);
    stats.std_dev.assign(train.cols(), 0.0);
    stats.applied.assign(train.cols(), 0);

    const double n = static_cast<double>(train.rows());
    for (std::size_t j = 0; j < train.cols(); ++j) {
        if (!continuous[j]) continue;
        double sum = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) sum += train(i, j);
        const double mean = sum / n;
        double sq = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            const double dlt = train(i, j) - mean;
            sq += dlt * dlt;
        }
        const double sd = std::sqrt(sq / n);
        stats.mean[j] = mean;
        stats.std_dev[j] = sd;
        stats.applied[j] = 1;
    }
    apply_standardization(train, stats);
    apply_standardization(test, stats);
    return stats;
}

NormalizationStats normalize_minmax(Matrix& train, Matrix& test,
                                    const std::vector<bool>& continuous) {
    require_dim(continuous.size() == train.cols(), "normalize_minmax: column mask size",
                train.cols(), continuous.size());
    require_dim(test.cols() == train.cols(), "normalize_minmax: test cols", train.cols(),
                test.cols());
    NormalizationStats stats;
    stats.mode = NormMode::kMinMax;
    stats.mean.assign(train.cols(), 0.0);
    stats.std_dev.assign(train.cols(), 0.0);
    stats.applied.assign(train.cols(), 0);

    for (std::size_t j = 0; j < train.cols(); ++j) {
        if (!continuous[j]) continue;
        double lo = train(0, j), hi = train(0, j);
        for (std::size_t i = 1; i < train.rows(); ++i) {
            lo = std::min(lo, train(i, j));
            hi = std::max(hi, train(i, j));
        }
        stats.mean[j] = lo;
        stats.std_dev[j] = hi - lo;
        stats.applied[j] = 1;
    }
    apply_standardization(train, stats);
    apply_standardization(test, stats);
    return stats;
}

NormalizationStats fit_normalization(Matrix& train, Matrix& test,
                                     const std::vector<bool>& continuous, NormMode mode) {
    switch (mode) {
        case NormMode::kZScore: return standardize(train, test, continuous);
        case NormMode::kMinMax: return normalize_minmax(train, test, continuous);
        case NormMode::kNone: {
            NormalizationStats stats;
            stats.mode = NormMode::kNone;
            stats.mean.assign(train.cols(), 0.0);
            stats.std_dev.assign(train.cols(), 0.0);
            stats.applied.assign(train.cols(), 0);
            return stats;
        }
    }
    throw Error("unknown normalization mode");
}

void apply_standardization(Matrix& m, const NormalizationStats& stats) {
    require_dim(stats.mean.size() == m.cols(), "apply_standardization: cols",
                stats.mean.size(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (!stats.applied[j]) continue;
        const double mean = stats.mean[j];
        const double sd = stats.std_dev[j];
        if (sd > 0.0) {
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = (m(i, j) - mean) / sd;
        } else {
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = m(i, j) - mean;
        }
    }
}

std::uint64_t schema_fingerprint(const EncodedDataset& dataset) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const char* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 0x100000001b3ULL;
        }
    };
    for (std::size_t i = 0; i < dataset.feature_names.size(); ++i) {
        mix(dataset.feature_names[i].data(), dataset.feature_names[i].size());
        const char kind = dataset.continuous[i] ? 'c' : 'h';
        mix(&kind, 1);
    }
    return h;
}

namespace {

constexpr char kCacheMagic[8] = {'G', 'O', 'A', 'D', 'E', 'N', 'C', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("encoded cache: truncated file");
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto n = read_pod<std::uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw IoError("encoded cache: truncated string");
    return s;
}

}  // namespace

void save_encoded(const std::string& path, const EncodedDataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(kCacheMagic, sizeof(kCacheMagic));
    write_pod(out, kCacheVersion);
    write_pod<std::uint64_t>(out, dataset.x.rows());
    write_pod<std::uint64_t>(out, dataset.x.cols());
    out.write(reinterpret_cast<const char*>(dataset.x.data()),
              static_cast<std::streamsize>(dataset.x.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(dataset.y.data()),
              static_cast<std::streamsize>(dataset.y.size()));
    for (std::size_t j = 0; j < dataset.x.cols(); ++j) {
        write_string(out, dataset.feature_names[j]);
        write_pod<std::uint8_t>(out, dataset.continuous[j] ? 1 : 0);
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

EncodedDataset load_encoded(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
        throw IoError("'" + path + "' is not an encoded dataset cache");
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kCacheVersion)
        throw IoError("encoded cache version " + std::to_string(version) + " unsupported");
    const auto rows = read_pod<std::uint64_t>(in);
    const auto cols = read_pod<std::uint64_t>(in);

    EncodedDataset dataset;
    std::vector<double> payload(rows * cols);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
    dataset.x = Matrix::from_rows(rows, cols, std::move(payload));
    dataset.y.resize(rows);
    in.read(reinterpret_cast<char*>(dataset.y.data()), static_cast<std::streamsize>(rows));
    if (!in) throw IoError("encoded cache: truncated payload");
    dataset.feature_names.reserve(cols);
    dataset.continuous.reserve(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        dataset.feature_names.push_back(read_string(in));
        dataset.continuous.push_back(read_pod<std::uint8_t>(in) != 0);
    }
    return dataset;
}

TableSchema schema_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("schema '" + path + "': " + e.what());
    }

    TableSchema schema;
    if (j.contains("delimiter")) {
        const std::string d = j["delimiter"].get<std::string>();
        if (d.size() != 1) throw ParseError("schema: delimiter must be one character");
        schema.delimiter = d[0];
    }
    schema.has_header = j.value("has_header", false);
    for (const auto& col : j.at("columns")) {
        ColumnSpec spec;
        spec.name = col.at("name").get<std::string>();
        const std::string kind = col.at("kind").get<std::string>();
        if (kind == "continuous") spec.kind = ColKind::kContinuous;
        else if (kind == "categorical") spec.kind = ColKind::kCategorical;
        else if (kind == "label") spec.kind = ColKind::kLabel;
        else throw ParseError("schema: unknown column kind '" + kind + "'");
        schema.columns.push_back(std::move(spec));
    }
    if (j.contains("label_rule")) {
        const auto& rule = j["label_rule"];
        if (rule.contains("dataset")) {
            schema.label_rule = label_rules(rule["dataset"].get<std::string>()).label;
        } else {
            for (const auto& v : rule.at("anomaly_values"))
                schema.label_rule.anomaly_values.insert(v.get<std::string>());
            schema.label_rule.invert = rule.value("invert", false);
        }
    }
    schema.validate();
    return schema;
}

}  // namespace goad

#include "goad/model_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace goad {

namespace {

constexpr char kMagic[8] = {'G', 'O', 'A', 'D', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("model file: truncated");
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const auto n = get<std::uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw IoError("model file: truncated string");
    return s;
}

void put_doubles(std::ostream& out, std::span<const double> v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in) {
    const auto n = get<std::uint64_t>(in);
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError("model file: truncated payload");
    return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
    put<std::uint64_t>(out, m.rows());
    put<std::uint64_t>(out, m.cols());
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix get_matrix(std::istream& in) {
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    std::vector<double> payload(rows * cols);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
    if (!in) throw IoError("model file: truncated matrix");
    return Matrix::from_rows(rows, cols, std::move(payload));
}

void put_layer(std::ostream& out, const DenseLayer& layer) {
    put_matrix(out, layer.weight);
    put_doubles(out, layer.bias);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(layer.activation));
    put<double>(out, layer.slope);
}

DenseLayer get_layer(std::istream& in) {
    DenseLayer layer;
    layer.weight = get_matrix(in);
    layer.bias = get_doubles(in);
    layer.activation = static_cast<Activation>(get<std::uint8_t>(in));
    layer.slope = get<double>(in);
    layer.validate();
    return layer;
}

}  // namespace

void write_model(std::ostream& out, const ModelFile& file) {
    const GoadModel& model = file.model;
    model.validate();

    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);

    // training configuration
    const TrainConfig& c = model.config;
    put<double>(out, c.margin);
    put<double>(out, c.epsilon);
    put<std::uint64_t>(out, c.epochs);
    put<std::uint64_t>(out, c.batch_size);
    put<double>(out, c.learning_rate);
    put<double>(out, c.ce_weight);
    put<double>(out, c.feat_l2_weight);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(c.center_mode));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(c.score_mode));
    put<std::uint64_t>(out, c.seed);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.hidden_dims.size()));
    for (std::size_t h : c.hidden_dims) put<std::uint64_t>(out, h);
    put<std::uint64_t>(out, c.feature_dim);
    put<double>(out, c.leaky_slope);
    put<double>(out, c.adam_beta1);
    put<double>(out, c.adam_beta2);
    put<double>(out, c.adam_eps);

    // task bank spec; matrices are regenerated on load
    const BankSpec& spec = model.bank.spec();
    if (spec.generator == TaskGenerator::kExplicit)
        throw IoError("models with explicit task banks cannot be persisted");
    put_string(out, task_generator_name(spec.generator));
    put<std::uint64_t>(out, spec.seed);
    put<std::uint64_t>(out, spec.num_tasks);
    put<std::uint64_t>(out, spec.input_dim);
    put<std::uint64_t>(out, spec.reduced_dim);
    put<double>(out, spec.scale);

    // feature extractor
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.net.layers().size()));
    for (const DenseLayer& layer : model.net.layers()) put_layer(out, layer);

    put<std::uint8_t>(out, model.aux_head ? 1 : 0);
    if (model.aux_head) put_layer(out, *model.aux_head);

    put_matrix(out, model.centers.c);

    // preprocessing block
    put<std::uint8_t>(out, file.preprocess ? 1 : 0);
    if (file.preprocess) {
        const PreprocessInfo& p = *file.preprocess;
        put<std::uint64_t>(out, p.schema_hash);
        put<std::uint8_t>(out, static_cast<std::uint8_t>(p.stats.mode));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(p.feature_names.size()));
        for (std::size_t j = 0; j < p.feature_names.size(); ++j) {
            put_string(out, p.feature_names[j]);
            put<std::uint8_t>(out, p.continuous[j] ? 1 : 0);
        }
        put_doubles(out, p.stats.mean);
        put_doubles(out, p.stats.std_dev);
        put<std::uint64_t>(out, p.stats.applied.size());
        out.write(reinterpret_cast<const char*>(p.stats.applied.data()),
                  static_cast<std::streamsize>(p.stats.applied.size()));
    }
    if (!out) throw IoError("model file: write failed");
}

ModelFile read_model(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw IoError("not a model file (bad magic)");
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw IoError("model file version " + std::to_string(version) + " unsupported");

    TrainConfig c;
    c.margin = get<double>(in);
    c.epsilon = get<double>(in);
    c.epochs = get<std::uint64_t>(in);
    c.batch_size = get<std::uint64_t>(in);
    c.learning_rate = get<double>(in);
    c.ce_weight = get<double>(in);
    c.feat_l2_weight = get<double>(in);
    c.center_mode = static_cast<CenterMode>(get<std::uint8_t>(in));
    c.score_mode = static_cast<ScoreMode>(get<std::uint8_t>(in));
    c.seed = get<std::uint64_t>(in);
    const auto n_hidden = get<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < n_hidden; ++k)
        c.hidden_dims.push_back(get<std::uint64_t>(in));
    c.feature_dim = get<std::uint64_t>(in);
    c.leaky_slope = get<double>(in);
    c.adam_beta1 = get<double>(in);
    c.adam_beta2 = get<double>(in);
    c.adam_eps = get<double>(in);

    BankSpec spec;
    spec.generator = task_generator_from_name(get_string(in));
    spec.seed = get<std::uint64_t>(in);
    spec.num_tasks = get<std::uint64_t>(in);
    spec.input_dim = get<std::uint64_t>(in);
    spec.reduced_dim = get<std::uint64_t>(in);
    spec.scale = get<double>(in);
    TaskBank bank = TaskBank::sample(spec);

    const auto n_layers = get<std::uint32_t>(in);
    std::vector<DenseLayer> layers;
    layers.reserve(n_layers);
    for (std::uint32_t k = 0; k < n_layers; ++k) layers.push_back(get_layer(in));
    FeatureNet net(std::move(layers));

    std::optional<DenseLayer> head;
    if (get<std::uint8_t>(in)) head = get_layer(in);

    Centers centers{get_matrix(in)};

    ModelFile file{GoadModel{std::move(bank), std::move(net), std::move(centers), c,
                             std::move(head)},
                   std::nullopt};

    if (get<std::uint8_t>(in)) {
        PreprocessInfo p;
        p.schema_hash = get<std::uint64_t>(in);
        p.stats.mode = static_cast<NormMode>(get<std::uint8_t>(in));
        const auto n_feat = get<std::uint32_t>(in);
        for (std::uint32_t j = 0; j < n_feat; ++j) {
            p.feature_names.push_back(get_string(in));
            p.continuous.push_back(get<std::uint8_t>(in) != 0);
        }
        p.stats.mean = get_doubles(in);
        p.stats.std_dev = get_doubles(in);
        const auto n_applied = get<std::uint64_t>(in);
        p.stats.applied.resize(n_applied);
        in.read(reinterpret_cast<char*>(p.stats.applied.data()),
                static_cast<std::streamsize>(n_applied));
        if (!in) throw IoError("model file: truncated");
        file.preprocess = std::move(p);
    }
    file.model.validate();
    return file;
}

void save_model(const std::string& path, const ModelFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_model(out, file);
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_model(in);
}

}  // namespace goad

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "goad/eval.hpp"
#include "goad/lof.hpp"
#include "goad/model_io.hpp"

namespace py = pybind11;
using namespace goad;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix matrix_from_numpy(const DoubleArray& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 2) throw DimensionError("expected a 2-d float array");
    const auto* data = static_cast<const double*>(buf.ptr);
    return Matrix::from_rows(static_cast<std::size_t>(buf.shape[0]),
                             static_cast<std::size_t>(buf.shape[1]),
                             std::vector<double>(data, data + buf.shape[0] * buf.shape[1]));
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), arr.mutable_data());
    return arr;
}

std::vector<std::uint8_t> labels_from_numpy(const py::array& arr) {
    const auto cast = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>(arr);
    return std::vector<std::uint8_t>(cast.data(), cast.data() + cast.size());
}

TrainConfig config_from_kwargs(double margin, double epsilon, std::size_t epochs,
                               std::size_t batch_size, double learning_rate,
                               double ce_weight, double feat_l2_weight,
                               const std::string& center_mode, const std::string& score_mode,
                               std::uint64_t seed, std::vector<std::size_t> hidden_dims,
                               std::size_t feature_dim, double leaky_slope) {
    TrainConfig config;
    config.margin = margin;
    config.epsilon = epsilon;
    config.epochs = epochs;
    config.batch_size = batch_size;
    config.learning_rate = learning_rate;
    config.ce_weight = ce_weight;
    config.feat_l2_weight = feat_l2_weight;
    config.seed = seed;
    config.hidden_dims = std::move(hidden_dims);
    config.feature_dim = feature_dim;
    config.leaky_slope = leaky_slope;
    if (center_mode == "recomputed-means") config.center_mode = CenterMode::kRecomputedMeans;
    else if (center_mode == "learned-free") config.center_mode = CenterMode::kLearnedFree;
    else throw Error("unknown center_mode '" + center_mode + "'");
    if (score_mode == "openset") config.score_mode = ScoreMode::kOpenSetDistance;
    else if (score_mode == "softmax") config.score_mode = ScoreMode::kClosedSetSoftmax;
    else throw Error("unknown score_mode '" + score_mode + "'");
    return config;
}

struct PyModel {
    ModelFile file;

    py::array_t<double> score(const DoubleArray& x, int jobs) const {
        const std::vector<double> scores = score_batch(file.model, matrix_from_numpy(x), jobs);
        py::array_t<double> out(scores.size());
        std::copy(scores.begin(), scores.end(), out.mutable_data());
        return out;
    }

    double score_one(const std::vector<double>& x) const {
        if (file.model.config.score_mode == ScoreMode::kClosedSetSoftmax)
            return closed_set_score(x, file.model);
        return anomaly_score(x, file.model);
    }

    py::array_t<double> centers() const { return numpy_from_matrix(file.model.centers.c); }

    void save(const std::string& path) const { save_model(path, file); }
};

}  // namespace

PYBIND11_MODULE(_goad, m) {
    m.doc() = "distance-based transformation-classification anomaly detection";

    py::register_exception<Error>(m, "GoadError");

    py::class_<TaskBank>(m, "TaskBank")
        .def(py::init([](std::uint64_t seed, std::size_t num_tasks, std::size_t input_dim,
                         std::size_t reduced_dim, const std::string& generator, double scale) {
                 BankSpec spec{seed, num_tasks, input_dim, reduced_dim,
                               task_generator_from_name(generator), scale};
                 return TaskBank::sample(spec);
             }),
             py::arg("seed"), py::arg("num_tasks"), py::arg("input_dim"),
             py::arg("reduced_dim"), py::arg("generator") = "affine-normal",
             py::arg("scale") = 1.0)
        .def_property_readonly("num_tasks", &TaskBank::num_tasks)
        .def_property_readonly("input_dim", &TaskBank::input_dim)
        .def_property_readonly("reduced_dim", &TaskBank::reduced_dim)
        .def("weight", [](const TaskBank& bank, std::size_t m) {
            return numpy_from_matrix(bank.weight(m));
        })
        .def("apply", [](const TaskBank& bank, std::size_t m, const std::vector<double>& x) {
            return bank.apply(m, x);
        })
        .def("apply_all", [](const TaskBank& bank, const DoubleArray& x) {
            const Matrix batch = matrix_from_numpy(x);
            const Matrix flat = bank.apply_all(batch);
            py::array_t<double> out(
                {batch.rows(), bank.num_tasks(), bank.reduced_dim()});
            std::copy(flat.data(), flat.data() + flat.size(), out.mutable_data());
            return out;
        });

    py::class_<PyModel>(m, "Model")
        .def("score", &PyModel::score, py::arg("x"), py::arg("jobs") = 1)
        .def("score_one", &PyModel::score_one, py::arg("x"))
        .def("save", &PyModel::save, py::arg("path"))
        .def_property_readonly("centers", &PyModel::centers)
        .def_property_readonly("num_tasks",
                               [](const PyModel& m_) { return m_.file.model.bank.num_tasks(); })
        .def_property_readonly("score_mode", [](const PyModel& m_) {
            return m_.file.model.config.score_mode == ScoreMode::kClosedSetSoftmax
                       ? "softmax"
                       : "openset";
        });

    m.def(
        "train",
        [](const DoubleArray& x, std::size_t num_tasks, std::size_t reduced_dim,
           std::uint64_t seed, double margin, double epsilon, std::size_t epochs,
           std::size_t batch_size, double learning_rate, double ce_weight,
           double feat_l2_weight, const std::string& center_mode,
           const std::string& score_mode, std::vector<std::size_t> hidden_dims,
           std::size_t feature_dim, double leaky_slope, const std::string& generator,
           double scale) {
            TrainConfig config = config_from_kwargs(
                margin, epsilon, epochs, batch_size, learning_rate, ce_weight,
                feat_l2_weight, center_mode, score_mode, seed, std::move(hidden_dims),
                feature_dim, leaky_slope);
            BankSpec bank{seed_split(seed, 0), num_tasks, 0, reduced_dim,
                          task_generator_from_name(generator), scale};
            GoadModel model = train(matrix_from_numpy(x), config, bank);
            return PyModel{ModelFile{std::move(model), std::nullopt}};
        },
        py::arg("x"), py::arg("num_tasks") = 64, py::arg("reduced_dim") = 16,
        py::arg("seed") = 1, py::arg("margin") = 1.0, py::arg("epsilon") = 1e-12,
        py::arg("epochs") = 5, py::arg("batch_size") = 256,
        py::arg("learning_rate") = 1e-3, py::arg("ce_weight") = 1.0,
        py::arg("feat_l2_weight") = 1e-3, py::arg("center_mode") = "recomputed-means",
        py::arg("score_mode") = "openset", py::arg("hidden_dims") = std::vector<std::size_t>{},
        py::arg("feature_dim") = 8, py::arg("leaky_slope") = 0.2,
        py::arg("generator") = "affine-normal", py::arg("scale") = 1.0,
        "fit a detector on rows of normal training data");

    m.def("load", [](const std::string& path) { return PyModel{load_model(path)}; },
          py::arg("path"));

    m.def(
        "select_threshold",
        [](const std::vector<double>& scores, std::size_t n_anomalies) {
            const ThresholdResult r = select_threshold(scores, n_anomalies);
            py::array_t<std::uint8_t> flags(r.flagged.size());
            std::copy(r.flagged.begin(), r.flagged.end(), flags.mutable_data());
            return py::make_tuple(r.threshold, flags);
        },
        py::arg("scores"), py::arg("n_anomalies"),
        "flag exactly the n highest scores; returns (threshold, flags)");

    m.def(
        "f1_report",
        [](const py::array& predicted, const py::array& truth) {
            const Confusion c =
                confusion_and_f1(labels_from_numpy(predicted), labels_from_numpy(truth));
            py::dict d;
            d["tp"] = c.tp;
            d["fp"] = c.fp;
            d["tn"] = c.tn;
            d["fn"] = c.fn;
            d["precision"] = c.precision;
            d["recall"] = c.recall;
            d["f1"] = c.f1;
            return d;
        },
        py::arg("predicted"), py::arg("truth"));

    m.def(
        "roc_auc",
        [](const std::vector<double>& scores, const py::array& truth) {
            return roc_auc(scores, labels_from_numpy(truth));
        },
        py::arg("scores"), py::arg("truth"));

    py::class_<LofModel>(m, "Lof")
        .def(py::init([](const DoubleArray& x, std::size_t k) {
                 return LofModel::fit(matrix_from_numpy(x), k);
             }),
             py::arg("x"), py::arg("k") = 20)
        .def_property_readonly("k", &LofModel::k)
        .def("score",
             [](const LofModel& model, const DoubleArray& x, int jobs) {
                 const std::vector<double> scores =
                     model.score_batch(matrix_from_numpy(x), jobs);
                 py::array_t<double> out(scores.size());
                 std::copy(scores.begin(), scores.end(), out.mutable_data());
                 return out;
             },
             py::arg("x"), py::arg("jobs") = 1)
        .def("score_one", [](const LofModel& model, const std::vector<double>& x) {
            return model.score(x);
        });

    m.def(
        "encode_csv",
        [](const std::string& data_path, const std::string& schema_path) {
            const TableSchema schema = schema_from_json_file(schema_path);
            const EncodedDataset ds = encode(load_table(data_path, schema), schema);
            py::array_t<std::uint8_t> y(ds.y.size());
            std::copy(ds.y.begin(), ds.y.end(), y.mutable_data());
            return py::make_tuple(numpy_from_matrix(ds.x), y, ds.feature_names);
        },
        py::arg("data_path"), py::arg("schema_path"),
        "load a delimited table and one-hot encode it; returns (x, y, feature_names)");

    m.attr("__version__") = "1.0.0";
}

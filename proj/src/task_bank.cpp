#include "goad/task_bank.hpp"

#include <Eigen/Dense>

#include <numeric>

#include "goad/rng.hpp"

namespace goad {

std::string task_generator_name(TaskGenerator g) {
    switch (g) {
        case TaskGenerator::kAffineNormal: return "affine-normal";
        case TaskGenerator::kRotation: return "rotation";
        case TaskGenerator::kPermutation: return "permutation";
        case TaskGenerator::kExplicit: return "explicit";
    }
    throw Error("unknown task generator");
}

TaskGenerator task_generator_from_name(const std::string& name) {
    if (name == "affine-normal") return TaskGenerator::kAffineNormal;
    if (name == "rotation") return TaskGenerator::kRotation;
    if (name == "permutation") return TaskGenerator::kPermutation;
    throw Error("unknown task generator '" + name +
                "' (expected affine-normal, rotation or permutation)");
}

namespace {

Matrix sample_affine(std::size_t r, std::size_t l, double scale, Rng& rng) {
    Matrix w(r, l);
    for (double& v : w.flat()) v = scale * rng.normal();
    return w;
}

// First r rows of a random orthogonal LxL matrix (QR of a gaussian draw).
Matrix sample_rotation(std::size_t r, std::size_t l, double scale, Rng& rng) {
    if (r > l) {
        throw DimensionError("rotation tasks need reduced_dim <= input_dim, got " +
                             std::to_string(r) + " > " + std::to_string(l));
    }
    Eigen::MatrixXd g(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Matrix w(r, l);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < l; ++j)
            w(i, j) = scale * q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    return w;
}

// Rows of a random LxL permutation matrix, truncated to the first r.
Matrix sample_permutation(std::size_t r, std::size_t l, double scale, Rng& rng) {
    if (r > l) {
        throw DimensionError("permutation tasks need reduced_dim <= input_dim, got " +
                             std::to_string(r) + " > " + std::to_string(l));
    }
    std::vector<std::size_t> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Matrix w(r, l);
    for (std::size_t i = 0; i < r; ++i) w(i, perm[i]) = scale;
    return w;
}

}  // namespace

TaskBank TaskBank::from_weights(std::vector<Matrix> weights,
                                std::vector<std::vector<double>> biases) {
    if (weights.size() < 2)
        throw DimensionError("task bank needs at least 2 tasks, got " +
                             std::to_string(weights.size()));
    const std::size_t r = weights.front().rows();
    const std::size_t l = weights.front().cols();
    if (r < 1 || l < 1) throw DimensionError("task bank dimensions must be >= 1");
    for (const Matrix& w : weights) {
        require_dim(w.rows() == r, "TaskBank::from_weights: rows", r, w.rows());
        require_dim(w.cols() == l, "TaskBank::from_weights: cols", l, w.cols());
    }
    if (biases.empty()) biases.assign(weights.size(), std::vector<double>(r, 0.0));
    require_dim(biases.size() == weights.size(), "TaskBank::from_weights: bias count",
                weights.size(), biases.size());
    for (const auto& b : biases)
        require_dim(b.size() == r, "TaskBank::from_weights: bias length", r, b.size());

    TaskBank bank;
    bank.spec_ = BankSpec{0, weights.size(), l, r, TaskGenerator::kExplicit, 1.0};
    bank.weights_ = std::move(weights);
    bank.biases_ = std::move(biases);
    bank.stacked_ = Matrix(bank.spec_.num_tasks * r, l);
    for (std::size_t m = 0; m < bank.spec_.num_tasks; ++m) {
        const Matrix& w = bank.weights_[m];
        std::copy(w.data(), w.data() + w.size(), bank.stacked_.data() + m * r * l);
    }
    return bank;
}

TaskBank TaskBank::sample(const BankSpec& spec) {
    if (spec.generator == TaskGenerator::kExplicit)
        throw Error("explicit task banks cannot be sampled from a spec");
    if (spec.num_tasks < 2) {
        throw DimensionError("task bank needs at least 2 tasks, got " +
                             std::to_string(spec.num_tasks));
    }
    if (spec.input_dim < 1 || spec.reduced_dim < 1) {
        throw DimensionError("task bank dimensions must be >= 1");
    }

    TaskBank bank;
    bank.spec_ = spec;
    bank.weights_.reserve(spec.num_tasks);
    bank.biases_.reserve(spec.num_tasks);

    Rng rng(spec.seed);
    for (std::size_t m = 0; m < spec.num_tasks; ++m) {
        switch (spec.generator) {
            case TaskGenerator::kAffineNormal:
                bank.weights_.push_back(
                    sample_affine(spec.reduced_dim, spec.input_dim, spec.scale, rng));
                break;
            case TaskGenerator::kRotation:
                bank.weights_.push_back(
                    sample_rotation(spec.reduced_dim, spec.input_dim, spec.scale, rng));
                break;
            case TaskGenerator::kPermutation:
                bank.weights_.push_back(
                    sample_permutation(spec.reduced_dim, spec.input_dim, spec.scale, rng));
                break;
        }
        bank.biases_.emplace_back(spec.reduced_dim, 0.0);
    }

    // Task-major stack for one-gemm batch transformation.
    bank.stacked_ = Matrix(spec.num_tasks * spec.reduced_dim, spec.input_dim);
    for (std::size_t m = 0; m < spec.num_tasks; ++m) {
        const Matrix& w = bank.weights_[m];
        std::copy(w.data(), w.data() + w.size(),
                  bank.stacked_.data() + m * spec.reduced_dim * spec.input_dim);
    }
    return bank;
}

const Matrix& TaskBank::weight(std::size_t m) const {
    if (m >= weights_.size())
        throw DimensionError("task index " + std::to_string(m) + " out of range [0, " +
                             std::to_string(weights_.size()) + ")");
    return weights_[m];
}

const std::vector<double>& TaskBank::bias(std::size_t m) const {
    if (m >= biases_.size())
        throw DimensionError("task index " + std::to_string(m) + " out of range [0, " +
                             std::to_string(biases_.size()) + ")");
    return biases_[m];
}

std::vector<double> TaskBank::apply(std::size_t m, std::span<const double> x) const {
    const Matrix& w = weight(m);
    require_dim(x.size() == w.cols(), "TaskBank::apply: input length", w.cols(), x.size());
    std::vector<double> y = matvec(w, x);
    const std::vector<double>& b = biases_[m];
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i];
    return y;
}

Matrix TaskBank::apply_all(const Matrix& batch) const {
    require_dim(batch.cols() == spec_.input_dim, "TaskBank::apply_all: batch cols",
                spec_.input_dim, batch.cols());
    const std::size_t n = batch.rows();
    const std::size_t m_count = spec_.num_tasks;
    const std::size_t r = spec_.reduced_dim;

    // (N x L) * (L x M*r) -> N x (M*r); each row then reinterpreted as the
    // M consecutive r-blocks for that sample.
    Matrix wide;
    gemm(batch, false, stacked_, true, wide);

    Matrix out = Matrix::from_rows(n * m_count, r,
                                   std::vector<double>(wide.flat().begin(), wide.flat().end()));
    // Biases are zero by default; add them only if some generator ever sets them.
    for (std::size_t m = 0; m < m_count; ++m) {
        const std::vector<double>& b = biases_[m];
        bool nonzero = false;
        for (double v : b)
            if (v != 0.0) { nonzero = true; break; }
        if (!nonzero) continue;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = out.row(i * m_count + m);
            for (std::size_t j = 0; j < r; ++j) row[j] += b[j];
        }
    }
    return out;
}

}  // namespace goad

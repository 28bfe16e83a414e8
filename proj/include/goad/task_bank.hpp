#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goad/matrix.hpp"

namespace goad {

// How the per-task matrices are drawn. Affine with i.i.d. standard normal
// entries is the default; orthogonal rotations and coordinate permutations
// are alternative families behind the same interface.
enum class TaskGenerator : std::uint8_t {
    kAffineNormal = 0,
    kRotation = 1,
    kPermutation = 2,
    kExplicit = 3,  // constructed from user matrices; not regenerable from a seed
};

std::string task_generator_name(TaskGenerator g);
TaskGenerator task_generator_from_name(const std::string& name);

struct BankSpec {
    std::uint64_t seed = 0;
    std::size_t num_tasks = 256;   // M
    std::size_t input_dim = 0;     // L, data dimension
    std::size_t reduced_dim = 32;  // r
    TaskGenerator generator = TaskGenerator::kAffineNormal;
    double scale = 1.0;  // multiplier on the sampled entries

    bool operator==(const BankSpec&) const = default;
};

// The fixed set of M affine maps x -> W_m x + b_m shared by training and
// scoring. Immutable after construction; regeneration from the spec is
// bit-exact, which is what the model file stores instead of the matrices.
class TaskBank {
public:
    static TaskBank sample(const BankSpec& spec);

    // Explicit matrices (all r x L) and optional biases. Banks built this
    // way cannot be persisted inside a model file, which stores only the
    // regenerable spec.
    static TaskBank from_weights(std::vector<Matrix> weights,
                                 std::vector<std::vector<double>> biases = {});

    const BankSpec& spec() const { return spec_; }
    std::size_t num_tasks() const { return spec_.num_tasks; }
    std::size_t input_dim() const { return spec_.input_dim; }
    std::size_t reduced_dim() const { return spec_.reduced_dim; }

    const Matrix& weight(std::size_t m) const;
    const std::vector<double>& bias(std::size_t m) const;

    // W_m x + b_m
    std::vector<double> apply(std::size_t m, std::span<const double> x) const;

    // All tasks over a batch: result is (N*M) x r with the instance for
    // (sample i, task m) at row i*M + m.
    Matrix apply_all(const Matrix& batch) const;

private:
    BankSpec spec_;
    std::vector<Matrix> weights_;             // M matrices, r x L
    std::vector<std::vector<double>> biases_; // M vectors, length r
    Matrix stacked_;                          // (M*r) x L, task-major
};

}  // namespace goad

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "goad/matrix.hpp"
#include "goad/rng.hpp"

namespace goad {

enum class Activation : std::uint8_t { kIdentity = 0, kLeakyRelu = 1 };

struct DenseLayer {
    Matrix weight;             // out x in
    std::vector<double> bias;  // out
    Activation activation = Activation::kIdentity;
    double slope = 0.2;        // leaky-ReLU negative slope, in (0, 1)

    std::size_t in_dim() const { return weight.cols(); }
    std::size_t out_dim() const { return weight.rows(); }
    void validate() const;
};

// He-style init: weight entries N(0, 2/fan_in), bias zero.
DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, double slope,
                      Rng& rng);

struct LayerGrads {
    Matrix weight;
    std::vector<double> bias;
};

// Per-layer intermediates kept for the backward pass.
struct ForwardTrace {
    Matrix input;
    std::vector<Matrix> pre;   // pre-activation per layer
    std::vector<Matrix> post;  // post-activation per layer
    const Matrix& output() const { return post.back(); }
};

struct BackwardResult {
    std::vector<LayerGrads> layers;
    Matrix input_grad;
};

// Small fully-connected feature extractor. Forward is a pure function of
// (parameters, input); training mutates parameters through the gradients
// returned by backward().
class FeatureNet {
public:
    FeatureNet() = default;
    explicit FeatureNet(std::vector<DenseLayer> layers);

    // hidden layers get leaky-ReLU, the final layer is linear.
    static FeatureNet make_mlp(std::size_t input_dim,
                               const std::vector<std::size_t>& hidden_dims,
                               std::size_t output_dim, double slope, Rng& rng);

    std::size_t input_dim() const { return layers_.front().in_dim(); }
    std::size_t output_dim() const { return layers_.back().out_dim(); }
    std::size_t num_layers() const { return layers_.size(); }

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    Matrix forward(const Matrix& batch) const;
    ForwardTrace forward_trace(const Matrix& batch) const;
    BackwardResult backward(const ForwardTrace& trace, const Matrix& upstream) const;

private:
    std::vector<DenseLayer> layers_;
};

// Single dense layer forward/backward, shared by FeatureNet and the
// auxiliary classification head.
Matrix dense_forward(const DenseLayer& layer, const Matrix& batch, Matrix* pre_out = nullptr);
// Given d(loss)/d(post-activation), accumulates layer grads and returns
// d(loss)/d(input).
Matrix dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& pre,
                      const Matrix& upstream, LayerGrads& grads);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected ADAM over a fixed set of parameter tensors. Moment
// buffers mirror the registered tensor sizes; step_count increases by
// one per update.
class AdamState {
public:
    AdamState() = default;
    AdamState(const std::vector<std::size_t>& tensor_sizes, AdamConfig config);

    void step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads);

    std::int64_t step_count() const { return step_count_; }
    const AdamConfig& config() const { return config_; }
    const std::vector<std::vector<double>>& first_moment() const { return m_; }
    const std::vector<std::vector<double>>& second_moment() const { return v_; }

private:
    AdamConfig config_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::int64_t step_count_ = 0;
};

// Convenience for a single tensor.
void adam_step(std::span<double> param, std::span<const double> grad, AdamState& state);

}  // namespace goad

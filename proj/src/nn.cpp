#include "goad/nn.hpp"

#include <cmath>

namespace goad {

void DenseLayer::validate() const {
    require_dim(bias.size() == weight.rows(), "DenseLayer: bias length", weight.rows(),
                bias.size());
    if (activation == Activation::kLeakyRelu && !(slope > 0.0 && slope < 1.0)) {
        throw NumericError("DenseLayer: leaky-ReLU slope must be in (0,1), got " +
                           std::to_string(slope));
    }
}

DenseLayer make_dense(std::size_t in, std::size_t out, Activation act, double slope,
                      Rng& rng) {
    DenseLayer layer;
    layer.weight = Matrix(out, in);
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    for (double& w : layer.weight.flat()) w = stddev * rng.normal();
    layer.bias.assign(out, 0.0);
    layer.activation = act;
    layer.slope = slope;
    layer.validate();
    return layer;
}

FeatureNet::FeatureNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw DimensionError("FeatureNet: needs at least one layer");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        layers_[k].validate();
        if (k > 0) {
            require_dim(layers_[k].in_dim() == layers_[k - 1].out_dim(),
                        "FeatureNet: layer " + std::to_string(k) + " input dim",
                        layers_[k - 1].out_dim(), layers_[k].in_dim());
        }
    }
}

FeatureNet FeatureNet::make_mlp(std::size_t input_dim,
                                const std::vector<std::size_t>& hidden_dims,
                                std::size_t output_dim, double slope, Rng& rng) {
    std::vector<DenseLayer> layers;
    std::size_t in = input_dim;
    for (std::size_t h : hidden_dims) {
        layers.push_back(make_dense(in, h, Activation::kLeakyRelu, slope, rng));
        in = h;
    }
    layers.push_back(make_dense(in, output_dim, Activation::kIdentity, slope, rng));
    return FeatureNet(std::move(layers));
}

namespace {

void apply_activation(const DenseLayer& layer, Matrix& m) {
    if (layer.activation == Activation::kIdentity) return;
    const double slope = layer.slope;
    for (double& v : m.flat())
        if (v < 0.0) v *= slope;
}

}  // namespace

Matrix dense_forward(const DenseLayer& layer, const Matrix& batch, Matrix* pre_out) {
    require_dim(batch.cols() == layer.in_dim(), "dense_forward: batch cols",
                layer.in_dim(), batch.cols());
    Matrix out;
    gemm(batch, false, layer.weight, true, out);  // (B x in) * (in x out)
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) row[j] += layer.bias[j];
    }
    if (pre_out) *pre_out = out;
    apply_activation(layer, out);
    return out;
}

Matrix dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& pre,
                      const Matrix& upstream, LayerGrads& grads) {
    require_dim(upstream.rows() == input.rows(), "dense_backward: upstream rows",
                input.rows(), upstream.rows());
    require_dim(upstream.cols() == layer.out_dim(), "dense_backward: upstream cols",
                layer.out_dim(), upstream.cols());

    // d(loss)/d(pre-activation)
    Matrix dpre = upstream;
    if (layer.activation == Activation::kLeakyRelu) {
        const double slope = layer.slope;
        auto d = dpre.flat();
        auto p = pre.flat();
        for (std::size_t i = 0; i < d.size(); ++i)
            if (p[i] < 0.0) d[i] *= slope;
    }

    grads.weight = Matrix();
    gemm(dpre, true, input, false, grads.weight);  // (out x B) * (B x in)
    grads.bias.assign(layer.out_dim(), 0.0);
    for (std::size_t i = 0; i < dpre.rows(); ++i) {
        auto row = dpre.row(i);
        for (std::size_t j = 0; j < dpre.cols(); ++j) grads.bias[j] += row[j];
    }

    Matrix dinput;
    gemm(dpre, false, layer.weight, false, dinput);  // (B x out) * (out x in)
    return dinput;
}

Matrix FeatureNet::forward(const Matrix& batch) const {
    require_dim(batch.cols() == input_dim(), "FeatureNet::forward: batch cols",
                input_dim(), batch.cols());
    Matrix cur = batch;
    for (const DenseLayer& layer : layers_) cur = dense_forward(layer, cur);
    return cur;
}

ForwardTrace FeatureNet::forward_trace(const Matrix& batch) const {
    require_dim(batch.cols() == input_dim(), "FeatureNet::forward_trace: batch cols",
                input_dim(), batch.cols());
    ForwardTrace trace;
    trace.input = batch;
    trace.pre.reserve(layers_.size());
    trace.post.reserve(layers_.size());
    const Matrix* cur = &trace.input;
    for (const DenseLayer& layer : layers_) {
        Matrix pre;
        Matrix post = dense_forward(layer, *cur, &pre);
        trace.pre.push_back(std::move(pre));
        trace.post.push_back(std::move(post));
        cur = &trace.post.back();
    }
    return trace;
}

BackwardResult FeatureNet::backward(const ForwardTrace& trace, const Matrix& upstream) const {
    require_dim(upstream.cols() == output_dim(), "FeatureNet::backward: upstream cols",
                output_dim(), upstream.cols());
    require_dim(upstream.rows() == trace.input.rows(), "FeatureNet::backward: upstream rows",
                trace.input.rows(), upstream.rows());

    BackwardResult result;
    result.layers.resize(layers_.size());
    Matrix grad = upstream;
    for (std::size_t k = layers_.size(); k-- > 0;) {
        const Matrix& input = (k == 0) ? trace.input : trace.post[k - 1];
        grad = dense_backward(layers_[k], input, trace.pre[k], grad, result.layers[k]);
    }
    result.input_grad = std::move(grad);
    return result;
}

AdamState::AdamState(const std::vector<std::size_t>& tensor_sizes, AdamConfig config)
    : config_(config) {
    m_.reserve(tensor_sizes.size());
    v_.reserve(tensor_sizes.size());
    for (std::size_t n : tensor_sizes) {
        m_.emplace_back(n, 0.0);
        v_.emplace_back(n, 0.0);
    }
}

void AdamState::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
    require_dim(params.size() == m_.size(), "AdamState::step: tensor count", m_.size(),
                params.size());
    require_dim(grads.size() == m_.size(), "AdamState::step: gradient count", m_.size(),
                grads.size());
    ++step_count_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    for (std::size_t t = 0; t < params.size(); ++t) {
        require_dim(params[t].size() == m_[t].size(),
                    "AdamState::step: tensor " + std::to_string(t) + " size",
                    m_[t].size(), params[t].size());
        require_dim(grads[t].size() == m_[t].size(),
                    "AdamState::step: gradient " + std::to_string(t) + " size",
                    m_[t].size(), grads[t].size());
        auto& m = m_[t];
        auto& v = v_[t];
        auto p = params[t];
        auto g = grads[t];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mhat = m[i] / correction1;
            const double vhat = v[i] / correction2;
            p[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

void adam_step(std::span<double> param, std::span<const double> grad, AdamState& state) {
    const std::span<double> params[] = {param};
    const std::span<const double> grads[] = {grad};
    state.step(params, grads);
}

}  // namespace goad

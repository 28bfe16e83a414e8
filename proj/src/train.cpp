#include <cmath>
#include <numeric>
#include <string>

#include "goad/goad.hpp"
#include "goad/rng.hpp"

namespace goad {

namespace {

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = x.row(idx[i]);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

struct ParamBinding {
    std::vector<std::span<double>> params;
    std::vector<std::span<const double>> grads;
    std::vector<std::size_t> sizes;
};

}  // namespace

GoadModel train(const Matrix& x_train_normal, const TrainConfig& config,
                const BankSpec& bank_spec, TrainLog* log) {
    config.validate();
    if (x_train_normal.rows() == 0) throw DimensionError("train: empty training set");
    if (!x_train_normal.all_finite()) throw NumericError("train: non-finite training data");

    BankSpec spec = bank_spec;
    spec.input_dim = x_train_normal.cols();
    TaskBank bank = TaskBank::sample(spec);
    const std::size_t m_count = bank.num_tasks();
    const std::size_t n_rows = x_train_normal.rows();

    Rng init_rng(seed_split(config.seed, 1));
    Rng shuffle_rng(seed_split(config.seed, 2));

    FeatureNet net = FeatureNet::make_mlp(bank.reduced_dim(), config.hidden_dims,
                                          config.feature_dim, config.leaky_slope, init_rng);
    const bool want_head =
        config.ce_weight > 0.0 || config.score_mode == ScoreMode::kClosedSetSoftmax;
    std::optional<DenseLayer> head;
    if (want_head) {
        head = make_dense(config.feature_dim, m_count, Activation::kIdentity,
                          config.leaky_slope, init_rng);
    }

    const bool learned_centers = config.center_mode == CenterMode::kLearnedFree;
    Centers centers = compute_centers(net, bank, x_train_normal);

    AdamConfig adam_cfg{config.learning_rate, config.adam_beta1, config.adam_beta2,
                        config.adam_eps};
    std::vector<std::size_t> tensor_sizes;
    for (DenseLayer& layer : net.layers()) {
        tensor_sizes.push_back(layer.weight.size());
        tensor_sizes.push_back(layer.bias.size());
    }
    if (head) {
        tensor_sizes.push_back(head->weight.size());
        tensor_sizes.push_back(head->bias.size());
    }
    if (learned_centers) tensor_sizes.push_back(centers.c.size());
    AdamState adam(tensor_sizes, adam_cfg);

    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (!learned_centers && epoch > 0) {
            centers = compute_centers(net, bank, x_train_normal);
        }
        shuffle_rng.shuffle(order);

        BatchStats epoch_stats;
        std::size_t n_batches = 0;

        for (std::size_t start = 0; start < n_rows; start += config.batch_size) {
            const std::size_t b = std::min(config.batch_size, n_rows - start);
            const std::size_t n_inst = b * m_count;
            const double inv_inst = 1.0 / static_cast<double>(n_inst);

            Matrix batch = gather_rows(x_train_normal, {order.data() + start, b});
            ForwardTrace trace = net.forward_trace(bank.apply_all(batch));
            const Matrix& feats = trace.output();

            std::vector<std::uint32_t> labels(n_inst);
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t m = 0; m < m_count; ++m)
                    labels[i * m_count + m] = static_cast<std::uint32_t>(m);

            // Triplet term (batch mean).
            TripletResult triplet = triplet_center_loss(feats, labels, centers,
                                                        config.margin, learned_centers);
            Matrix feat_grad = std::move(triplet.feature_grad);
            for (double& v : feat_grad.flat()) v *= inv_inst;
            const double loss_triplet = triplet.loss * inv_inst;

            // Auxiliary softmax cross-entropy through the head (batch mean).
            double loss_ce = 0.0;
            LayerGrads head_grads;
            Matrix head_pre;
            if (head) {
                Matrix logits = dense_forward(*head, feats, &head_pre);
                Matrix dlogits(n_inst, m_count);
                for (std::size_t i = 0; i < n_inst; ++i) {
                    auto lrow = logits.row(i);
                    const double lse = logsumexp(lrow);
                    loss_ce -= (lrow[labels[i]] - lse);
                    auto drow = dlogits.row(i);
                    const double w = config.ce_weight * inv_inst;
                    for (std::size_t m = 0; m < m_count; ++m)
                        drow[m] = w * std::exp(lrow[m] - lse);
                    drow[labels[i]] -= w;
                }
                loss_ce *= inv_inst;
                Matrix dfeat = dense_backward(*head, feats, head_pre, dlogits, head_grads);
                auto fg = feat_grad.flat();
                auto df = dfeat.flat();
                for (std::size_t i = 0; i < fg.size(); ++i) fg[i] += df[i];
            }

            // Feature norm regularizer (mean squared norm).
            double loss_l2 = 0.0;
            if (config.feat_l2_weight > 0.0) {
                auto f = feats.flat();
                auto fg = feat_grad.flat();
                const double w = 2.0 * config.feat_l2_weight * inv_inst;
                for (std::size_t i = 0; i < f.size(); ++i) {
                    loss_l2 += f[i] * f[i];
                    fg[i] += w * f[i];
                }
                loss_l2 *= config.feat_l2_weight * inv_inst;
            }

            const double total =
                loss_triplet + config.ce_weight * loss_ce + loss_l2;
            if (!std::isfinite(total)) {
                throw NumericError("train: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(start / config.batch_size) +
                                   " (triplet=" + std::to_string(loss_triplet) +
                                   ", ce=" + std::to_string(loss_ce) +
                                   ", feat_l2=" + std::to_string(loss_l2) + ")");
            }

            BackwardResult back = net.backward(trace, feat_grad);

            ParamBinding binding;
            for (std::size_t k = 0; k < net.layers().size(); ++k) {
                DenseLayer& layer = net.layers()[k];
                binding.params.push_back(layer.weight.flat());
                binding.params.push_back({layer.bias.data(), layer.bias.size()});
                binding.grads.push_back(back.layers[k].weight.flat());
                binding.grads.push_back(
                    {back.layers[k].bias.data(), back.layers[k].bias.size()});
            }
            Matrix center_grad;
            if (head) {
                binding.params.push_back(head->weight.flat());
                binding.params.push_back({head->bias.data(), head->bias.size()});
                binding.grads.push_back(head_grads.weight.flat());
                binding.grads.push_back({head_grads.bias.data(), head_grads.bias.size()});
            }
            if (learned_centers) {
                center_grad = std::move(triplet.center_grad);
                for (double& v : center_grad.flat()) v *= inv_inst;
                binding.params.push_back(centers.c.flat());
                binding.grads.push_back(center_grad.flat());
            }
            adam.step(binding.params, binding.grads);

            epoch_stats.loss += total;
            epoch_stats.triplet += loss_triplet;
            epoch_stats.ce += loss_ce;
            epoch_stats.feat_l2 += loss_l2;
            ++n_batches;
        }

        if (log && n_batches > 0) {
            const double inv = 1.0 / static_cast<double>(n_batches);
            log->epochs.push_back({epoch_stats.loss * inv, epoch_stats.triplet * inv,
                                   epoch_stats.ce * inv, epoch_stats.feat_l2 * inv});
        }
    }

    // Persisted centers are always the final full-training-set means.
    centers = compute_centers(net, bank, x_train_normal);

    GoadModel model{std::move(bank), std::move(net), std::move(centers), config,
                    std::move(head)};
    model.validate();
    return model;
}

}  // namespace goad

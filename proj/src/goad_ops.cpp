#include <algorithm>
#include <cmath>
#include <thread>

#include "goad/goad.hpp"

namespace goad {

void TrainConfig::validate() const {
    if (margin < 0.0) throw NumericError("margin must be >= 0");
    if (epsilon < 0.0) throw NumericError("epsilon must be >= 0");
    if (epochs < 1) throw NumericError("epochs must be >= 1");
    if (batch_size < 1) throw NumericError("batch_size must be >= 1");
    if (ce_weight < 0.0) throw NumericError("ce_weight must be >= 0");
    if (feat_l2_weight < 0.0) throw NumericError("feat_l2_weight must be >= 0");
    if (feature_dim < 1) throw NumericError("feature_dim must be >= 1");
    if (score_mode == ScoreMode::kClosedSetSoftmax && ce_weight <= 0.0) {
        throw NumericError("closed-set scoring needs ce_weight > 0 so the head is trained");
    }
}

void GoadModel::validate() const {
    require_dim(bank.reduced_dim() == net.input_dim(), "GoadModel: net input dim",
                bank.reduced_dim(), net.input_dim());
    require_dim(centers.dim() == net.output_dim(), "GoadModel: centers dim",
                net.output_dim(), centers.dim());
    require_dim(centers.count() == bank.num_tasks(), "GoadModel: centers count",
                bank.num_tasks(), centers.count());
    if (aux_head) {
        require_dim(aux_head->in_dim() == net.output_dim(), "GoadModel: head input dim",
                    net.output_dim(), aux_head->in_dim());
        require_dim(aux_head->out_dim() == bank.num_tasks(), "GoadModel: head output dim",
                    bank.num_tasks(), aux_head->out_dim());
    }
    if (!centers.c.all_finite()) throw NumericError("GoadModel: non-finite centers");
}

Centers compute_centers(const FeatureNet& net, const TaskBank& bank, const Matrix& x_train) {
    if (x_train.rows() == 0) throw DimensionError("compute_centers: empty training set");
    const std::size_t m_count = bank.num_tasks();
    const std::size_t d = net.output_dim();

    Matrix acc(m_count, d);
    const std::size_t block = 512;
    for (std::size_t start = 0; start < x_train.rows(); start += block) {
        const std::size_t n = std::min(block, x_train.rows() - start);
        Matrix rows = Matrix::from_rows(
            n, x_train.cols(),
            std::vector<double>(x_train.data() + start * x_train.cols(),
                                x_train.data() + (start + n) * x_train.cols()));
        Matrix feats = net.forward(bank.apply_all(rows));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t m = 0; m < m_count; ++m) {
                auto f = feats.row(i * m_count + m);
                auto a = acc.row(m);
                for (std::size_t j = 0; j < d; ++j) a[j] += f[j];
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(x_train.rows());
    for (double& v : acc.flat()) v *= inv_n;
    return Centers{std::move(acc)};
}

Matrix squared_distances(const Matrix& features, const Centers& centers) {
    require_dim(features.cols() == centers.dim(), "squared_distances: feature dim",
                centers.dim(), features.cols());
    const std::size_t b = features.rows();
    const std::size_t m_count = centers.count();
    const std::size_t d = centers.dim();

    // ||f - c||^2 = ||f||^2 - 2 f.c + ||c||^2, with the cross term as one gemm.
    Matrix dist;
    gemm(features, false, centers.c, true, dist, -2.0);

    std::vector<double> fnorm(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        auto row = features.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += row[j] * row[j];
        fnorm[i] = acc;
    }
    std::vector<double> cnorm(m_count, 0.0);
    for (std::size_t m = 0; m < m_count; ++m) {
        auto row = centers.c.row(m);
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += row[j] * row[j];
        cnorm[m] = acc;
    }
    for (std::size_t i = 0; i < b; ++i) {
        auto row = dist.row(i);
        for (std::size_t m = 0; m < m_count; ++m) {
            // Cancellation can push tiny true distances below zero; clamp.
            row[m] = std::max(0.0, row[m] + fnorm[i] + cnorm[m]);
        }
    }
    return dist;
}

TripletResult triplet_center_loss(const Matrix& features, std::span<const std::uint32_t> labels,
                                  const Centers& centers, double margin, bool center_grads) {
    const std::size_t m_count = centers.count();
    if (m_count < 2)
        throw DimensionError("triplet_center_loss: needs at least 2 centers, got " +
                             std::to_string(m_count));
    require_dim(labels.size() == features.rows(), "triplet_center_loss: label count",
                features.rows(), labels.size());

    const Matrix dist = squared_distances(features, centers);
    const std::size_t d = centers.dim();

    TripletResult result;
    result.feature_grad = Matrix(features.rows(), d);
    if (center_grads) result.center_grad = Matrix(m_count, d);

    for (std::size_t i = 0; i < features.rows(); ++i) {
        const std::uint32_t own = labels[i];
        if (own >= m_count)
            throw DimensionError("triplet_center_loss: label " + std::to_string(own) +
                                 " out of range [0, " + std::to_string(m_count) + ")");
        auto drow = dist.row(i);
        // nearest other center; ties resolved to the lowest index
        std::size_t nearest = own == 0 ? 1 : 0;
        for (std::size_t m = 0; m < m_count; ++m) {
            if (m == own) continue;
            if (drow[m] < drow[nearest]) nearest = m;
        }
        const double hinge = drow[own] + margin - drow[nearest];
        if (hinge <= 0.0) continue;
        result.loss += hinge;

        auto f = features.row(i);
        auto c_own = centers.c.row(own);
        auto c_near = centers.c.row(nearest);
        auto g = result.feature_grad.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            // d/df [||f-c_own||^2 - ||f-c_near||^2] = 2 (c_near - c_own)
            g[j] += 2.0 * (c_near[j] - c_own[j]);
        }
        if (center_grads) {
            auto gc_own = result.center_grad.row(own);
            auto gc_near = result.center_grad.row(nearest);
            for (std::size_t j = 0; j < d; ++j) {
                gc_own[j] += -2.0 * (f[j] - c_own[j]);
                gc_near[j] += 2.0 * (f[j] - c_near[j]);
            }
        }
    }
    return result;
}

Matrix log_probs_from_distances(const Matrix& distances, double epsilon) {
    if (epsilon < 0.0) throw NumericError("log_probs_from_distances: epsilon must be >= 0");
    const std::size_t m_count = distances.cols();
    Matrix out(distances.rows(), m_count);

    const double log_uniform = -std::log(static_cast<double>(m_count));
    std::vector<double> neg(m_count);
    for (std::size_t i = 0; i < distances.rows(); ++i) {
        auto drow = distances.row(i);
        auto orow = out.row(i);

        // Equal distances mean exactly uniform probabilities for any epsilon.
        bool uniform = true;
        for (std::size_t m = 1; m < m_count; ++m)
            if (drow[m] != drow[0]) { uniform = false; break; }
        if (uniform) {
            for (std::size_t m = 0; m < m_count; ++m) orow[m] = log_uniform;
            continue;
        }

        for (std::size_t m = 0; m < m_count; ++m) neg[m] = -drow[m];
        const double hi = *std::max_element(neg.begin(), neg.end());

        if (epsilon == 0.0) {
            const double lse = logsumexp(neg);
            for (std::size_t m = 0; m < m_count; ++m) orow[m] = neg[m] - lse;
            continue;
        }
        // Shift bounded below at 0 keeps every exponential <= 1 and the
        // rescaled epsilon <= epsilon, so nothing can overflow.
        const double shift = std::max(hi, 0.0);
        const double eps_shifted = epsilon * std::exp(-shift);
        double denom = static_cast<double>(m_count) * eps_shifted;
        for (std::size_t m = 0; m < m_count; ++m) denom += std::exp(neg[m] - shift);
        const double log_denom = std::log(denom);
        for (std::size_t m = 0; m < m_count; ++m) {
            orow[m] = std::log(std::exp(neg[m] - shift) + eps_shifted) - log_denom;
        }
    }
    return out;
}

Matrix transform_log_probs(const Matrix& features, const Centers& centers, double epsilon) {
    return log_probs_from_distances(squared_distances(features, centers), epsilon);
}

namespace {

Matrix single_sample_features(std::span<const double> x, const GoadModel& model) {
    require_dim(x.size() == model.bank.input_dim(), "score: input length",
                model.bank.input_dim(), x.size());
    Matrix row = Matrix::from_rows(1, x.size(), std::vector<double>(x.begin(), x.end()));
    return model.net.forward(model.bank.apply_all(row));  // M x d
}

Matrix log_softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto lrow = logits.row(i);
        const double lse = logsumexp(lrow);
        auto orow = out.row(i);
        for (std::size_t j = 0; j < logits.cols(); ++j) orow[j] = lrow[j] - lse;
    }
    return out;
}

double diagonal_score(const Matrix& log_probs, std::size_t m_count) {
    double score = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) score -= log_probs(m, m);
    return score;
}

}  // namespace

double anomaly_score(std::span<const double> x, const GoadModel& model) {
    const Matrix feats = single_sample_features(x, model);
    const Matrix lp = transform_log_probs(feats, model.centers, model.config.epsilon);
    return diagonal_score(lp, model.bank.num_tasks());
}

double closed_set_score(std::span<const double> x, const GoadModel& model) {
    if (!model.aux_head) throw Error("closed_set_score: model has no classification head");
    const Matrix feats = single_sample_features(x, model);
    const Matrix logits = dense_forward(*model.aux_head, feats);
    return diagonal_score(log_softmax_rows(logits), model.bank.num_tasks());
}

namespace {

// One row at a time so the arithmetic (and hence every bit of the result)
// is identical to the single-sample scoring functions.
void score_range(const GoadModel& model, const Matrix& x_test, std::size_t begin,
                 std::size_t end, std::vector<double>& out) {
    const bool closed = model.config.score_mode == ScoreMode::kClosedSetSoftmax;
    if (closed && !model.aux_head)
        throw Error("score_batch: model has no classification head");
    for (std::size_t i = begin; i < end; ++i) {
        out[i] = closed ? closed_set_score(x_test.row(i), model)
                        : anomaly_score(x_test.row(i), model);
    }
}

}  // namespace

std::vector<double> score_batch(const GoadModel& model, const Matrix& x_test, int jobs) {
    require_dim(x_test.cols() == model.bank.input_dim(), "score_batch: input cols",
                model.bank.input_dim(), x_test.cols());
    std::vector<double> scores(x_test.rows(), 0.0);
    const std::size_t n = x_test.rows();
    if (jobs <= 1 || n < 512) {
        score_range(model, x_test, 0, n, scores);
        return scores;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] { score_range(model, x_test, begin, end, scores); });
    }
    for (auto& t : pool) t.join();
    return scores;
}

}  // namespace goad

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "goad/matrix.hpp"
#include "goad/nn.hpp"
#include "goad/task_bank.hpp"

namespace goad {

// Per-task feature-space centers, one row per task.
struct Centers {
    Matrix c;  // M x d

    std::size_t count() const { return c.rows(); }
    std::size_t dim() const { return c.cols(); }
};

// RecomputedMeans: centers are refreshed from the full training set at
// every epoch start and no gradient flows into them.
// LearnedFree: centers are free parameters updated by the optimizer.
// In both modes the persisted centers are the final training-set means.
enum class CenterMode : std::uint8_t { kRecomputedMeans = 0, kLearnedFree = 1 };

// OpenSetDistance: probabilities from distances to centers with an
// epsilon uncertainty prior, so points far from every center score
// near-uniform instead of arbitrarily confident.
// ClosedSetSoftmax: probabilities from the trained classification head.
enum class ScoreMode : std::uint8_t { kOpenSetDistance = 0, kClosedSetSoftmax = 1 };

struct TrainConfig {
    double margin = 1.0;          // hinge margin between own and nearest other center
    double epsilon = 1e-12;       // uncertainty prior on task probabilities
    std::size_t epochs = 1;
    std::size_t batch_size = 256; // rows per minibatch; each row expands to M instances
    double learning_rate = 1e-3;
    double ce_weight = 1.0;       // auxiliary softmax cross-entropy weight
    double feat_l2_weight = 1e-3; // mean squared feature norm weight
    CenterMode center_mode = CenterMode::kRecomputedMeans;
    ScoreMode score_mode = ScoreMode::kOpenSetDistance;
    std::uint64_t seed = 0;

    // feature extractor architecture
    std::vector<std::size_t> hidden_dims;  // empty = linear feature map
    std::size_t feature_dim = 8;           // d
    double leaky_slope = 0.2;

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
};

struct GoadModel {
    TaskBank bank;
    FeatureNet net;
    Centers centers;
    TrainConfig config;
    std::optional<DenseLayer> aux_head;  // d -> M

    void validate() const;
};

// c_m = mean over training rows of f(T(x, m)). Streams over row blocks so
// large sets never materialize the full transformed tensor.
Centers compute_centers(const FeatureNet& net, const TaskBank& bank, const Matrix& x_train);

// Entry [i, m'] = squared euclidean distance from features row i to center m'.
Matrix squared_distances(const Matrix& features, const Centers& centers);

struct TripletResult {
    double loss = 0.0;        // sum over rows of the hinge terms
    Matrix feature_grad;      // same shape as features
    Matrix center_grad;       // M x d, filled only when center gradients requested
};

// Hinge loss pulling each row toward its labeled center and pushing it
// margin-away from the nearest other center. At a tie for the nearest
// other center the gradient flows to the lowest-index minimizer.
TripletResult triplet_center_loss(const Matrix& features, std::span<const std::uint32_t> labels,
                                  const Centers& centers, double margin,
                                  bool center_grads = false);

// Row i = log of the epsilon-regularized task probabilities
//   (exp(-dist^2_{i,m'}) + eps) / (sum_m exp(-dist^2_{i,m}) + M*eps)
// computed stably for any eps >= 0.
Matrix transform_log_probs(const Matrix& features, const Centers& centers, double epsilon);

// Same stabilized computation from a precomputed squared-distance matrix.
Matrix log_probs_from_distances(const Matrix& distances, double epsilon);

// Negative sum over tasks of the log-probability assigned to the task
// that actually produced each transformed instance. Higher = more anomalous.
double anomaly_score(std::span<const double> x, const GoadModel& model);

// Closed-set variant through the classification head.
double closed_set_score(std::span<const double> x, const GoadModel& model);

struct BatchStats {
    double loss = 0.0;
    double triplet = 0.0;
    double ce = 0.0;
    double feat_l2 = 0.0;
};

struct TrainLog {
    std::vector<BatchStats> epochs;  // per-epoch means
};

// Full training procedure: build the task bank, initialize the feature
// extractor and head, run minibatch ADAM over all samples x all tasks,
// and store final centers as full-training-set feature means.
GoadModel train(const Matrix& x_train_normal, const TrainConfig& config,
                const BankSpec& bank_spec, TrainLog* log = nullptr);

// Vectorized scoring in the model's score mode; order-preserving and pure.
// jobs > 1 splits the rows across threads; results are identical for any
// jobs value.
std::vector<double> score_batch(const GoadModel& model, const Matrix& x_test, int jobs = 1);

}  // namespace goad

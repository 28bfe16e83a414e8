#include "goad/lof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace goad {

namespace {

// Floor for reachability distances so duplicate points keep densities finite.
constexpr double kMinReach = 1e-12;

// Squared distances from each query row to each reference row, one block
// at a time: ||q||^2 - 2 q.r + ||r||^2.
Matrix pairwise_sq(const Matrix& queries, const Matrix& reference) {
    Matrix cross;
    gemm(queries, false, reference, true, cross, -2.0);
    std::vector<double> qn(queries.rows(), 0.0), rn(reference.rows(), 0.0);
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        auto row = queries.row(i);
        double acc = 0.0;
        for (double v : row) acc += v * v;
        qn[i] = acc;
    }
    for (std::size_t i = 0; i < reference.rows(); ++i) {
        auto row = reference.row(i);
        double acc = 0.0;
        for (double v : row) acc += v * v;
        rn[i] = acc;
    }
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        auto row = cross.row(i);
        for (std::size_t j = 0; j < reference.rows(); ++j)
            row[j] = std::max(0.0, row[j] + qn[i] + rn[j]);
    }
    return cross;
}

struct NeighborSet {
    std::vector<std::size_t> idx;  // all points within the k-distance (ties included)
    double k_distance = 0.0;
};

// k nearest among `dists` (euclidean), optionally excluding `self`.
NeighborSet k_neighbors(std::span<const double> sq_dists, std::size_t k,
                        std::ptrdiff_t self) {
    std::vector<std::size_t> order;
    order.reserve(sq_dists.size());
    for (std::size_t j = 0; j < sq_dists.size(); ++j) {
        if (self >= 0 && j == static_cast<std::size_t>(self)) continue;
        order.push_back(j);
    }
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                     [&](std::size_t a, std::size_t b) { return sq_dists[a] < sq_dists[b]; });
    const double kth_sq = sq_dists[order[k - 1]];

    NeighborSet set;
    set.k_distance = std::sqrt(kth_sq);
    for (std::size_t j : order) {
        if (sq_dists[j] <= kth_sq) set.idx.push_back(j);
    }
    return set;
}

}  // namespace

LofModel LofModel::fit(const Matrix& train, std::size_t k) {
    const std::size_t n = train.rows();
    if (k < 1) throw Error("lof: k must be >= 1");
    if (k >= n)
        throw Error("lof: k = " + std::to_string(k) + " must be smaller than the " +
                    std::to_string(n) + " reference points");

    LofModel model;
    model.k_ = k;
    model.reference_ = train;
    model.k_distance_.resize(n);
    model.lrd_.resize(n);

    // Pass 1: k-distance and neighbor sets.
    std::vector<NeighborSet> neighbors(n);
    const std::size_t block = 256;
    for (std::size_t start = 0; start < n; start += block) {
        const std::size_t b = std::min(block, n - start);
        Matrix rows = Matrix::from_rows(
            b, train.cols(),
            std::vector<double>(train.data() + start * train.cols(),
                                train.data() + (start + b) * train.cols()));
        Matrix sq = pairwise_sq(rows, train);
        for (std::size_t i = 0; i < b; ++i) {
            neighbors[start + i] =
                k_neighbors(sq.row(i), k, static_cast<std::ptrdiff_t>(start + i));
            model.k_distance_[start + i] = neighbors[start + i].k_distance;
        }
    }

    // Pass 2: local reachability density per reference point.
    for (std::size_t i = 0; i < n; ++i) {
        const NeighborSet& set = neighbors[i];
        double reach_sum = 0.0;
        for (std::size_t o : set.idx) {
            double d = 0.0;
            auto a = train.row(i);
            auto b2 = train.row(o);
            for (std::size_t j = 0; j < train.cols(); ++j) {
                const double dlt = a[j] - b2[j];
                d += dlt * dlt;
            }
            const double reach = std::max({std::sqrt(d), model.k_distance_[o], kMinReach});
            reach_sum += reach;
        }
        model.lrd_[i] = static_cast<double>(set.idx.size()) / reach_sum;
    }
    return model;
}

double LofModel::score(std::span<const double> x) const {
    require_dim(x.size() == reference_.cols(), "lof score: input length", reference_.cols(),
                x.size());
    Matrix q = Matrix::from_rows(1, x.size(), std::vector<double>(x.begin(), x.end()));
    Matrix sq = pairwise_sq(q, reference_);
    const NeighborSet set = k_neighbors(sq.row(0), k_, -1);

    double reach_sum = 0.0;
    double lrd_sum = 0.0;
    for (std::size_t o : set.idx) {
        const double d = std::sqrt(sq(0, o));
        reach_sum += std::max({d, k_distance_[o], kMinReach});
        lrd_sum += lrd_[o];
    }
    const double count = static_cast<double>(set.idx.size());
    const double lrd_query = count / reach_sum;
    return (lrd_sum / count) / lrd_query;
}

std::vector<double> LofModel::score_batch(const Matrix& queries, int jobs) const {
    require_dim(queries.cols() == reference_.cols(), "lof score_batch: input cols",
                reference_.cols(), queries.cols());
    std::vector<double> scores(queries.rows(), 0.0);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) scores[i] = score(queries.row(i));
    };
    const std::size_t n = queries.rows();
    if (jobs <= 1 || n < 64) {
        worker(0, n);
        return scores;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(worker, begin, end);
    }
    for (auto& t : pool) t.join();
    return scores;
}

}  // namespace goad

#pragma once

#include <vector>

#include "goad/matrix.hpp"

namespace goad {

// Local Outlier Factor over an exact (blocked brute-force) neighbor
// search. Scores near 1 mark inliers of a uniform cloud; isolated points
// score well above 1.
class LofModel {
public:
    // Precomputes k-distances and local reachability densities for the
    // reference set. Throws when k < 1 or k >= N.
    static LofModel fit(const Matrix& train, std::size_t k);

    std::size_t k() const { return k_; }
    const Matrix& reference() const { return reference_; }
    const std::vector<double>& reference_lrd() const { return lrd_; }
    const std::vector<double>& reference_k_distance() const { return k_distance_; }

    double score(std::span<const double> x) const;
    std::vector<double> score_batch(const Matrix& queries, int jobs = 1) const;

private:
    std::size_t k_ = 0;
    Matrix reference_;
    std::vector<double> k_distance_;
    std::vector<double> lrd_;
};

}  // namespace goad

#include "goad/matrix.hpp"

#include <Eigen/Core>

#include <algorithm>

namespace goad {

namespace {

using EigenMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EigenMutMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

void gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b,
          Matrix& out, double alpha) {
    const std::size_t a_rows = trans_a ? a.cols() : a.rows();
    const std::size_t a_cols = trans_a ? a.rows() : a.cols();
    const std::size_t b_rows = trans_b ? b.cols() : b.rows();
    const std::size_t b_cols = trans_b ? b.rows() : b.cols();
    require_dim(a_cols == b_rows, "gemm: inner dimensions", a_cols, b_rows);

    if (out.rows() != a_rows || out.cols() != b_cols) out = Matrix(a_rows, b_cols);

    EigenMap ma(a.data(), static_cast<Eigen::Index>(a.rows()),
                static_cast<Eigen::Index>(a.cols()));
    EigenMap mb(b.data(), static_cast<Eigen::Index>(b.rows()),
                static_cast<Eigen::Index>(b.cols()));
    EigenMutMap mo(out.data(), static_cast<Eigen::Index>(a_rows),
                   static_cast<Eigen::Index>(b_cols));

    if (!trans_a && !trans_b)
        mo.noalias() = alpha * (ma * mb);
    else if (trans_a && !trans_b)
        mo.noalias() = alpha * (ma.transpose() * mb);
    else if (!trans_a && trans_b)
        mo.noalias() = alpha * (ma * mb.transpose());
    else
        mo.noalias() = alpha * (ma.transpose() * mb.transpose());
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    require_dim(a.cols() == x.size(), "matvec: vector length", a.cols(), x.size());
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.data() + i * a.cols();
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double logsumexp(std::span<const double> values) {
    if (values.empty()) throw DimensionError("logsumexp: empty input");
    const double hi = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(hi)) return hi;  // all -inf, or a +inf/NaN dominates
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

}  // namespace goad

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "goad/error.hpp"

namespace goad {

// Dense row-major matrix of doubles. The single numeric container used
// throughout; heavy products are delegated to a BLAS-grade backend in
// matrix.cpp, everything else stays plain loops.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::size_t rows, std::size_t cols,
                            std::vector<double> data) {
        if (data.size() != rows * cols) {
            throw DimensionError("Matrix::from_rows: payload size " +
                                 std::to_string(data.size()) + " != " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
        }
        Matrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.data_ = std::move(data);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<double> flat() { return {data_.data(), data_.size()}; }
    std::span<const double> flat() const { return {data_.data(), data_.size()}; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void fill(double v) { data_.assign(data_.size(), v); }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = op(a) * op(b), where op is optional transposition.
// Existing contents of out are discarded; out is resized as needed.
void gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b,
          Matrix& out, double alpha = 1.0);

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix out;
    gemm(a, false, b, false, out);
    return out;
}

// y = A x
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// log(sum(exp(v))) with max-shift; never overflows for entries <= 1e300.
double logsumexp(std::span<const double> values);

}  // namespace goad

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "roselora/rng.hpp"

namespace roselora {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Dense row-major matrix of doubles. All arithmetic below uses a fixed
// summation order so identical inputs give bit-identical outputs.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0) {
            throw ContractError("Matrix dimensions must be positive");
        }
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows == 0 || cols == 0) {
            throw ContractError("Matrix dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw ShapeError("Matrix data length " + std::to_string(data_.size()) +
                             " does not match " + shape_str());
        }
    }

    static Matrix zeros(std::size_t rows, std::size_t cols) {
        return Matrix(rows, cols);
    }

    static Matrix ones(std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        for (auto& v : m.data_) v = 1.0;
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix uniform(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
        Matrix m(rows, cols);
        for (auto& v : m.data_) v = rng.uniform(lo, hi);
        return m;
    }

    static Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
        Matrix m(rows, cols);
        for (auto& v : m.data_) v = rng.normal();
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double& at(std::size_t i) { return data_[i]; }
    double at(std::size_t i) const { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool same_shape(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    double frobenius_sq() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return s;
    }

    Matrix transposed() const {
        Matrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = (*this)(r, c);
            }
        }
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Product with left-to-right accumulation over the inner index.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul shape mismatch: " + a.shape_str() + " * " + b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                s += a(i, k) * b(k, j);
            }
            out(i, j) = s;
        }
    }
    return out;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("add shape mismatch: " + a.shape_str() + " + " + b.shape_str());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += b.at(i);
    return out;
}

inline Matrix subtract(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("subtract shape mismatch: " + a.shape_str() + " - " + b.shape_str());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) -= b.at(i);
    return out;
}

inline Matrix scale(const Matrix& a, double s) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= s;
    return out;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("hadamard shape mismatch: " + a.shape_str() + " . " + b.shape_str());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= b.at(i);
    return out;
}

inline Matrix relu(const Matrix& a) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.at(i) < 0.0) out.at(i) = 0.0;
    }
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("max_abs_diff shape mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::fabs(a.at(i) - b.at(i)));
    }
    return m;
}

} // namespace roselora

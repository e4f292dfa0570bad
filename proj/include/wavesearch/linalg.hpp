#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavesearch {

/// Dense row-major matrix. Small (D up to a few hundred), owned by value.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double max_abs_entry(const Matrix& a);

/// Compressed sparse rows of a symmetric matrix, used for force evaluation.
struct SparseRows {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> columns;
    std::vector<double> values;

    static SparseRows from_dense(const Matrix& a);

    /// out = A x
    void apply(std::span<const double> x, std::span<double> out) const;
};

struct SymmetricEigen {
    std::vector<double> values;  // unsorted, as produced by the rotations
    Matrix vectors;              // column j pairs with values[j]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Throws Error(numerical)
/// when off-diagonal mass has not vanished within max_sweeps.
SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 64);

} // namespace wavesearch

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kanlab {

/// Dense real matrix, row-major storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        return {data_.data() + i * cols_, cols_};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const;

    /// Largest absolute entry.
    double max_abs() const;

    bool all_finite() const;

    /// Max-norm symmetry defect, max |A_ij - A_ji|.
    double symmetry_defect() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

std::vector<double> operator*(const Matrix& a, const std::vector<double>& x);

/// Kronecker product: block (i,j) of the result is A_ij * B.
Matrix kron(const Matrix& a, const Matrix& b);

/// Symmetric Toeplitz correlation matrix with entry (j,j') = r[|j-j'|].
/// Requires r[0] == 1 and |r[h]| <= 1.
Matrix toeplitz_from_acf(const std::vector<double>& r);

} // namespace kanlab

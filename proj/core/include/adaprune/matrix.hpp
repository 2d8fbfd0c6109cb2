#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace adaprune {

/// Dense row-major matrix of doubles.
///
/// Construction rejects non-finite entries; element access afterwards is
/// unchecked in release builds. Samples are stored as columns everywhere in
/// this library: activations are `d_in x N`, weights are `d_out x d_in`.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix row_vector(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;

    /// Copy of row `r` as a 1 x cols matrix.
    Matrix row_matrix(std::size_t r) const;
    void set_row(std::size_t r, std::span<const double> values);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Layer dimensions; every field strictly positive.
struct Dims {
    std::size_t d_in;
    std::size_t d_out;
    std::size_t n_samples;

    Dims(std::size_t in, std::size_t out, std::size_t samples);
};

Matrix matmul(const Matrix& a, const Matrix& b);
/// a * bᵀ without materializing the transpose.
Matrix matmul_transposed(const Matrix& a, const Matrix& b);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm_sq(const Matrix& a);
double frobenius_norm(const Matrix& a);
/// Maximum absolute row sum.
double inf_norm(const Matrix& a);
/// Largest absolute entry.
double max_abs(const Matrix& a);

/// ‖a − b‖²_F / (rows·cols); zero for empty operands.
double mean_squared_error(const Matrix& a, const Matrix& b);

std::size_t count_nonzeros(std::span<const double> values);

}  // namespace adaprune

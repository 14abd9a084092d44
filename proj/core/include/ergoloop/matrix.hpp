#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ergoloop/errors.hpp"

namespace ergoloop {

using Vec = std::vector<double>;

/// Dense real matrix, row-major. The workhorse carrier for all state-space
/// blocks and for the assembled augmented matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, Vec entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix scalar(double v);  // 1x1

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const Vec& data() const { return data_; }
    Vec& data() { return data_; }

    Matrix transpose() const;
    /// Copies `block` into this matrix with its top-left corner at (r, c).
    void set_block(std::size_t r, std::size_t c, const Matrix& block);
    double max_abs() const;

    /// Throws if any entry is NaN or infinite. `what` names the matrix in the message.
    void require_finite(const char* what) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

Vec matvec(const Matrix& a, const Vec& x);

// Small vector helpers shared across modules.
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(double s, const Vec& a);
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double max_abs_diff(const Vec& a, const Vec& b);

}  // namespace ergoloop

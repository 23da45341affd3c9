#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ritzforge {

using Complex = std::complex<double>;

/// Dense complex column vector.
using Vector = std::vector<Complex>;

/// Dense complex matrix, row-major storage, 0-based indexing in code.
/// Documentation and error messages use 1-based indices to match the
/// usual linear-algebra convention.
class Matrix {
public:
    Matrix() = default;
    /// Zero-filled rows x cols matrix.
    Matrix(std::size_t rows, std::size_t cols);
    /// Row-major initialization; entries.size() must equal rows*cols.
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    bool is_square() const noexcept { return rows_ == cols_; }
    /// True when no entry has a NaN or infinite component.
    bool all_finite() const noexcept;
    bool is_upper_triangular(double tol = 0.0) const;
    bool is_upper_hessenberg(double tol = 0.0) const;
    /// Upper Hessenberg with every subdiagonal entry of magnitude > tol.
    bool is_irreducible_upper_hessenberg(double tol = 0.0) const;
    /// ||A*A - I||_F <= tol.
    bool is_unitary(double tol) const;

    /// Leading k x k principal submatrix.
    Matrix principal_submatrix(std::size_t k) const;
    /// Matrix built from the first k columns.
    Matrix leading_columns(std::size_t k) const;
    /// Conjugate transpose.
    Matrix adjoint() const;

    Complex trace() const;
    double frobenius_norm() const;
    /// Maximum absolute row sum.
    double inf_norm() const;

    Vector column(std::size_t j) const;
    Vector row(std::size_t i) const;
    void set_column(std::size_t j, const Vector& v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector entries_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Complex s, const Matrix& a);
Vector operator*(const Matrix& a, const Vector& x);

/// Euclidean norm.
double norm2(const Vector& v);
/// Inner product conj(x) . y.
Complex dot(const Vector& x, const Vector& y);
/// max_ij |a_ij - b_ij|; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

} // namespace ritzforge

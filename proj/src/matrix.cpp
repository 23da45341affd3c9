#include "ritzforge/matrix.hpp"

#include <cassert>
#include <cmath>

#include "ritzforge/errors.hpp"

namespace ritzforge {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex(0.0, 0.0)) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries)
    : rows_(rows), cols_(cols), entries_(entries) {
    if (entries_.size() != rows * cols) {
        throw StructuralError("initializer size does not match matrix shape");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1.0, 0.0);
    return m;
}

bool Matrix::all_finite() const noexcept {
    for (const Complex& z : entries_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

bool Matrix::is_upper_triangular(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 1; i < rows_; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs((*this)(i, j)) > tol) return false;
        }
    }
    return true;
}

bool Matrix::is_upper_hessenberg(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 2; i < rows_; ++i) {
        for (std::size_t j = 0; j + 1 < i; ++j) {
            if (std::abs((*this)(i, j)) > tol) return false;
        }
    }
    return true;
}

bool Matrix::is_irreducible_upper_hessenberg(double tol) const {
    if (!is_upper_hessenberg(0.0)) return false;
    for (std::size_t i = 0; i + 1 < rows_; ++i) {
        if (std::abs((*this)(i + 1, i)) <= tol) return false;
    }
    return true;
}

bool Matrix::is_unitary(double tol) const {
    if (!is_square()) return false;
    const Matrix gram = adjoint() * (*this);
    double err2 = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            const Complex expected = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            err2 += std::norm(gram(i, j) - expected);
        }
    }
    return std::sqrt(err2) <= tol;
}

Matrix Matrix::principal_submatrix(std::size_t k) const {
    assert(k <= rows_ && k <= cols_);
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = (*this)(i, j);
    return m;
}

Matrix Matrix::leading_columns(std::size_t k) const {
    assert(k <= cols_);
    Matrix m(rows_, k);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = (*this)(i, j);
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Complex Matrix::trace() const {
    Complex t(0.0, 0.0);
    const std::size_t n = rows_ < cols_ ? rows_ : cols_;
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : entries_) s += std::norm(z);
    return std::sqrt(s);
}

double Matrix::inf_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) row_sum += std::abs((*this)(i, j));
        if (row_sum > best) best = row_sum;
    }
    return best;
}

Vector Matrix::column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vector Matrix::row(std::size_t i) const {
    Vector v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
}

void Matrix::set_column(std::size_t j, const Vector& v) {
    assert(v.size() == rows_);
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix operator*(Complex s, const Matrix& a) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    assert(a.cols() == x.size());
    Vector y(a.rows(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

double norm2(const Vector& v) {
    double s = 0.0;
    for (const Complex& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Complex dot(const Vector& x, const Vector& y) {
    assert(x.size() == y.size());
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = std::abs(a(i, j) - b(i, j));
            if (d > best) best = d;
        }
    }
    return best;
}

} // namespace ritzforge

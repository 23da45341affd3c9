#pragma once

// Precision-parameterized dense complex kernels. The public operations
// instantiate them at double; the internal construction and measurement
// paths instantiate them at long double or __float128, where the wildly
// scaled matrices this project produces would otherwise exhaust double
// precision. Error checking with user-facing semantics lives in the
// public wrappers, not here. The local complex type exists because
// std::complex does not instantiate cleanly for __float128.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <quadmath.h>

#include "ritzforge/errors.hpp"
#include "ritzforge/matrix.hpp"

namespace ritzforge::detail {

inline double rsqrt_impl(double x) { return std::sqrt(x); }
inline long double rsqrt_impl(long double x) { return std::sqrt(x); }
inline __float128 rsqrt_impl(__float128 x) { return sqrtq(x); }

inline double rabs_impl(double x) { return std::fabs(x); }
inline long double rabs_impl(long double x) { return std::fabs(x); }
inline __float128 rabs_impl(__float128 x) { return fabsq(x); }

template <typename T>
struct Cx {
    T re{};
    T im{};

    Cx() = default;
    Cx(T r, T i) : re(r), im(i) {}
    explicit Cx(T r) : re(r), im(T(0)) {}

    Cx& operator+=(const Cx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cx& operator-=(const Cx& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Cx& operator*=(const Cx& o) {
        const T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Cx& operator*=(T s) {
        re *= s;
        im *= s;
        return *this;
    }
};

template <typename T>
Cx<T> operator+(Cx<T> a, const Cx<T>& b) {
    return a += b;
}
template <typename T>
Cx<T> operator-(Cx<T> a, const Cx<T>& b) {
    return a -= b;
}
template <typename T>
Cx<T> operator-(const Cx<T>& a) {
    return {-a.re, -a.im};
}
template <typename T>
Cx<T> operator*(Cx<T> a, const Cx<T>& b) {
    return a *= b;
}
template <typename T>
Cx<T> operator*(T s, Cx<T> a) {
    return a *= s;
}
template <typename T>
Cx<T> operator*(Cx<T> a, T s) {
    return a *= s;
}
template <typename T>
Cx<T> operator/(const Cx<T>& a, T s) {
    return {a.re / s, a.im / s};
}
template <typename T>
Cx<T> operator/(const Cx<T>& a, const Cx<T>& b) {
    const T d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
template <typename T>
bool operator==(const Cx<T>& a, const Cx<T>& b) {
    return a.re == b.re && a.im == b.im;
}

template <typename T>
Cx<T> conj(const Cx<T>& a) {
    return {a.re, -a.im};
}
template <typename T>
T norm(const Cx<T>& a) {
    return a.re * a.re + a.im * a.im;
}
template <typename T>
T abs(const Cx<T>& a) {
    return rsqrt_impl(norm(a));
}
template <typename T>
Cx<T> sqrt(const Cx<T>& z) {
    if (z.re == T(0) && z.im == T(0)) return {T(0), T(0)};
    const T m = abs(z);
    const T w = rsqrt_impl((m + rabs_impl(z.re)) / T(2));
    if (z.re >= T(0)) return {w, z.im / (T(2) * w)};
    const T v = rabs_impl(z.im) / (T(2) * w);
    return (z.im >= T(0)) ? Cx<T>{v, w} : Cx<T>{v, -w};
}

template <typename T>
struct DenseMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Cx<T>> e;

    DenseMat() = default;
    DenseMat(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}

    Cx<T>& operator()(std::size_t i, std::size_t j) { return e[i * cols + j]; }
    const Cx<T>& operator()(std::size_t i, std::size_t j) const { return e[i * cols + j]; }
};

template <typename T>
Cx<T> widen_scalar(Complex z) {
    return {static_cast<T>(z.real()), static_cast<T>(z.imag())};
}

template <typename T>
Complex narrow_scalar(const Cx<T>& z) {
    return {static_cast<double>(z.re), static_cast<double>(z.im)};
}

template <typename T>
DenseMat<T> widen(const Matrix& m) {
    DenseMat<T> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = widen_scalar<T>(m(i, j));
    return out;
}

template <typename T>
Matrix narrow(const DenseMat<T>& m) {
    Matrix out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = narrow_scalar(m(i, j));
    return out;
}

template <typename T>
DenseMat<T> identity_mat(std::size_t n) {
    DenseMat<T> m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Cx<T>(T(1), T(0));
    return m;
}

template <typename T>
T frobenius(const DenseMat<T>& m) {
    T s = T(0);
    for (const auto& z : m.e) s += norm(z);
    return rsqrt_impl(s);
}

template <typename T>
DenseMat<T> principal(const DenseMat<T>& m, std::size_t k) {
    DenseMat<T> out(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out(i, j) = m(i, j);
    return out;
}

template <typename T>
DenseMat<T> adjoint(const DenseMat<T>& m) {
    DenseMat<T> out(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(j, i) = conj(m(i, j));
    return out;
}

template <typename T>
DenseMat<T> matmul(const DenseMat<T>& a, const DenseMat<T>& b) {
    DenseMat<T> c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const Cx<T> aik = a(i, k);
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

// Givens pair (c, s) mapping (a, b) to (t, 0) with t real nonnegative.
template <typename T>
struct GivensT {
    Cx<T> c;
    Cx<T> s;
    T t;
};

template <typename T>
GivensT<T> make_givens(const Cx<T>& a, const Cx<T>& b) {
    const T t = rsqrt_impl(norm(a) + norm(b));
    if (t == T(0)) return {Cx<T>(T(1), T(0)), Cx<T>(T(0), T(0)), T(0)};
    return {a / t, b / t, t};
}

// QR of an upper Hessenberg matrix with the canonical normalization
// (diagonal of R real nonnegative where attainable).
template <typename T>
void qr_hessenberg_kernel(const DenseMat<T>& h, DenseMat<T>& q, DenseMat<T>& r) {
    const std::size_t n = h.rows;
    r = h;
    q = identity_mat<T>(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const GivensT<T> g = make_givens(r(k, k), r(k + 1, k));
        for (std::size_t j = k; j < n; ++j) {
            const Cx<T> x = r(k, j);
            const Cx<T> y = r(k + 1, j);
            r(k, j) = conj(g.c) * x + conj(g.s) * y;
            r(k + 1, j) = -g.s * x + g.c * y;
        }
        r(k, k) = Cx<T>(g.t, T(0));
        r(k + 1, k) = Cx<T>(T(0), T(0));
        for (std::size_t i = 0; i <= k + 1; ++i) {
            const Cx<T> x = q(i, k);
            const Cx<T> y = q(i, k + 1);
            q(i, k) = x * g.c + y * g.s;
            q(i, k + 1) = -x * conj(g.s) + y * conj(g.c);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Cx<T> d = r(k, k);
        const T mag = abs(d);
        if (mag == T(0)) continue;
        const Cx<T> u = d / mag;
        if (u == Cx<T>(T(1), T(0))) continue;
        const Cx<T> ubar = conj(u);
        for (std::size_t j = k; j < n; ++j) r(k, j) *= ubar;
        r(k, k) = Cx<T>(mag, T(0));
        for (std::size_t i = 0; i < n; ++i) q(i, k) *= u;
    }
}

// Back-substitution inverse of an upper triangular matrix. The caller is
// responsible for diagonal admissibility.
template <typename T>
DenseMat<T> upper_tri_inverse_kernel(const DenseMat<T>& r) {
    const std::size_t n = r.rows;
    DenseMat<T> x(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        x(j, j) = Cx<T>(T(1), T(0)) / r(j, j);
        for (std::size_t ii = j; ii-- > 0;) {
            Cx<T> s(T(0), T(0));
            for (std::size_t l = ii + 1; l <= j; ++l) s += r(ii, l) * x(l, j);
            x(ii, j) = -s / r(ii, ii);
        }
    }
    return x;
}

// LU with partial pivoting. `perm[i]` is the source row of row i; `sign`
// tracks swap parity; the weakest pivot met is recorded (1-based index).
// An exactly zero pivot column stops elimination with exact_zero set.
template <typename T>
struct LuT {
    DenseMat<T> lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    T min_pivot = T(0);
    std::size_t min_pivot_index = 0;
    bool exact_zero = false;
};

template <typename T>
LuT<T> lu_factor_kernel(DenseMat<T> a) {
    const std::size_t n = a.rows;
    LuT<T> res;
    res.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.perm[i] = i;
    res.min_pivot = static_cast<T>(std::numeric_limits<double>::infinity());

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        T best = abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const T v = abs(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < res.min_pivot) {
            res.min_pivot = best;
            res.min_pivot_index = k + 1;
        }
        if (best == T(0)) {
            res.exact_zero = true;
            break;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(res.perm[k], res.perm[piv]);
            res.sign = -res.sign;
        }
        const Cx<T> pivot = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Cx<T> m = a(i, k) / pivot;
            a(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
        }
    }
    res.lu = std::move(a);
    return res;
}

template <typename T>
std::vector<Cx<T>> lu_solve_kernel(const LuT<T>& f, const std::vector<Cx<T>>& b) {
    const std::size_t n = f.lu.rows;
    std::vector<Cx<T>> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 1; i < n; ++i) {
        Cx<T> s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        Cx<T> s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * x[j];
        x[ii] = s / f.lu(ii, ii);
    }
    return x;
}

template <typename T>
Cx<T> determinant_kernel(const DenseMat<T>& a) {
    LuT<T> f = lu_factor_kernel(a);
    if (f.exact_zero) return Cx<T>(T(0), T(0));
    Cx<T> det(static_cast<T>(f.sign), T(0));
    for (std::size_t i = 0; i < a.rows; ++i) det *= f.lu(i, i);
    return det;
}

// Roots of the 2x2 block [[a, b], [c, d]], cancellation-safe.
template <typename T>
std::pair<Cx<T>, Cx<T>> eig_2x2_kernel(const Cx<T>& a, const Cx<T>& b, const Cx<T>& c,
                                       const Cx<T>& d) {
    const Cx<T> half_tr = (a + d) / T(2);
    const Cx<T> det = a * d - b * c;
    const Cx<T> disc = sqrt(half_tr * half_tr - det);
    const Cx<T> l1 =
        ((conj(half_tr) * disc).re >= T(0)) ? half_tr + disc : half_tr - disc;
    const Cx<T> l2 = (l1 == Cx<T>(T(0), T(0))) ? half_tr : det / l1;
    return {l1, l2};
}

// Parlett-Reinsch balancing (radix-2 scaling, exact similarity).
template <typename T>
void balance_kernel(DenseMat<T>& a) {
    const std::size_t n = a.rows;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            T col = T(0), row = T(0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                col += abs(a(j, i));
                row += abs(a(i, j));
            }
            if (col == T(0) || row == T(0) || !std::isfinite(static_cast<double>(col)) ||
                !std::isfinite(static_cast<double>(row))) {
                continue;
            }
            T f = T(1);
            const T s = col + row;
            while (col < row / T(2)) {
                col *= T(2);
                row /= T(2);
                f *= T(2);
            }
            while (col >= row * T(2)) {
                col /= T(2);
                row *= T(2);
                f /= T(2);
            }
            if (col + row < T(0.95) * s) {
                done = false;
                const T inv = T(1) / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// In-place Householder reduction to upper Hessenberg form; transforms
// are not accumulated.
template <typename T>
void reduce_to_hessenberg_kernel(DenseMat<T>& a) {
    const std::size_t n = a.rows;
    if (n < 3) return;
    std::vector<Cx<T>> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        T tail_norm2 = T(0);
        for (std::size_t i = 0; i < m; ++i) tail_norm2 += norm(a(k + 1 + i, k));
        const T tail_norm = rsqrt_impl(tail_norm2);
        if (tail_norm == T(0)) continue;

        const Cx<T> beta = a(k + 1, k);
        const Cx<T> alpha = (beta == Cx<T>(T(0), T(0)))
                                ? Cx<T>(-tail_norm, T(0))
                                : -(beta / abs(beta)) * tail_norm;
        T vnorm2 = T(0);
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = a(k + 1 + i, k);
            if (i == 0) v[i] -= alpha;
            vnorm2 += norm(v[i]);
        }
        if (vnorm2 == T(0)) continue;
        const T tau = T(2) / vnorm2;

        for (std::size_t j = k; j < n; ++j) {
            Cx<T> s(T(0), T(0));
            for (std::size_t i = 0; i < m; ++i) s += conj(v[i]) * a(k + 1 + i, j);
            s *= tau;
            for (std::size_t i = 0; i < m; ++i) a(k + 1 + i, j) -= v[i] * s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            Cx<T> s(T(0), T(0));
            for (std::size_t j = 0; j < m; ++j) s += a(i, k + 1 + j) * v[j];
            s *= tau;
            for (std::size_t j = 0; j < m; ++j) a(i, k + 1 + j) -= s * conj(v[j]);
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = Cx<T>(T(0), T(0));
    }
}

// One explicit single-shift QR step on the active block [lo..hi].
template <typename T>
void qr_step_kernel(DenseMat<T>& h, std::size_t lo, std::size_t hi, const Cx<T>& shift) {
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= shift;
    const std::size_t m = hi - lo + 1;
    std::vector<GivensT<T>> rot(m - 1);
    for (std::size_t i = lo; i < hi; ++i) {
        GivensT<T> g = make_givens(h(i, i), h(i + 1, i));
        rot[i - lo] = g;
        for (std::size_t j = i; j <= hi; ++j) {
            const Cx<T> x = h(i, j);
            const Cx<T> y = h(i + 1, j);
            h(i, j) = conj(g.c) * x + conj(g.s) * y;
            h(i + 1, j) = -g.s * x + g.c * y;
        }
        h(i + 1, i) = Cx<T>(T(0), T(0));
    }
    for (std::size_t i = lo; i < hi; ++i) {
        const GivensT<T>& g = rot[i - lo];
        const std::size_t top = std::min(i + 1, hi);
        for (std::size_t r = lo; r <= top; ++r) {
            const Cx<T> x = h(r, i);
            const Cx<T> y = h(r, i + 1);
            h(r, i) = x * g.c + y * g.s;
            h(r, i + 1) = -x * conj(g.s) + y * conj(g.c);
        }
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += shift;
}

template <typename T>
Cx<T> wilkinson_shift_kernel(const DenseMat<T>& h, std::size_t hi) {
    auto [l1, l2] = eig_2x2_kernel(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    const Cx<T> d = h(hi, hi);
    return (abs(l1 - d) < abs(l2 - d)) ? l1 : l2;
}

// Eigenvalues by balancing, Householder reduction, and single-shift QR
// iteration with Wilkinson shifts. A subdiagonal deflates when its
// magnitude drops below deflate_tol * (|h_ii| + |h_{i+1,i+1}|). Throws
// ConvergenceError after max_iters QR steps.
template <typename T>
std::vector<Cx<T>> eigenvalues_kernel(DenseMat<T> h, T deflate_tol, std::size_t max_iters) {
    const std::size_t n = h.rows;
    if (n == 1) return {h(0, 0)};
    balance_kernel(h);
    reduce_to_hessenberg_kernel(h);

    std::vector<Cx<T>> eigs;
    eigs.reserve(n);
    std::size_t hi = n - 1;
    std::size_t total_iters = 0;
    std::size_t stagnant = 0;

    while (true) {
        std::size_t lo = hi;
        while (lo > 0) {
            const T tol = deflate_tol * (abs(h(lo - 1, lo - 1)) + abs(h(lo, lo)));
            if (abs(h(lo, lo - 1)) <= tol) {
                h(lo, lo - 1) = Cx<T>(T(0), T(0));
                break;
            }
            --lo;
        }
        if (lo == hi) {
            eigs.push_back(h(hi, hi));
            stagnant = 0;
            if (hi == 0) break;
            --hi;
            continue;
        }
        if (lo + 1 == hi) {
            auto [l1, l2] = eig_2x2_kernel(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
            eigs.push_back(l1);
            eigs.push_back(l2);
            stagnant = 0;
            if (lo == 0) break;
            hi = lo - 1;
            continue;
        }
        if (++total_iters > max_iters) {
            throw ConvergenceError("eigenvalue iteration failed to deflate within " +
                                   std::to_string(max_iters) + " steps");
        }
        Cx<T> shift;
        ++stagnant;
        if (stagnant % 10 == 0) {
            // Exceptional shift to break rare rotation cycles.
            shift = h(hi, hi) + Cx<T>(T(0.75) * abs(h(hi, hi - 1)), T(0));
        } else {
            shift = wilkinson_shift_kernel(h, hi);
        }
        qr_step_kernel(h, lo, hi, shift);
    }
    return eigs;
}

} // namespace ritzforge::detail

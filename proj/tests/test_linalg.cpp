#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ritzforge/errors.hpp"
#include "ritzforge/linalg.hpp"
#include "test_support.hpp"

using namespace ritzforge;
using namespace testsupport;

namespace {

double residual_norm(const Matrix& a, const Vector& x, const Vector& b) {
    Vector r = a * x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return norm2(r);
}

} // namespace

TEST_CASE("qr_hessenberg: identity-scale and permutation cases") {
    {
        const Matrix h(1, 1, {Complex(2.0, 0.0)});
        const auto f = linalg::qr_hessenberg(h);
        CHECK(std::abs(f.q(0, 0) - Complex(1.0, 0.0)) == 0.0);
        CHECK(std::abs(f.r(0, 0) - Complex(2.0, 0.0)) == 0.0);
    }
    {
        const Matrix h(2, 2, {Complex(0), Complex(1), Complex(1), Complex(0)});
        const auto f = linalg::qr_hessenberg(h);
        CHECK(max_abs_diff(f.q, h) <= 1e-15);
        CHECK(max_abs_diff(f.r, Matrix::identity(2)) <= 1e-15);
    }
}

TEST_CASE("qr_hessenberg: worked 2x2 instance, canonical normalization") {
    const Matrix h(2, 2,
                   {Complex(1.28), Complex(-6.665), Complex(0.96), Complex(6.72)});
    const auto f = linalg::qr_hessenberg(h);
    // Same factorization as Q=[[0.8,0.6],[0.6,-0.8]], R=[[1.6,-1.3],[0,-9.375]]
    // after scaling the second column/row to make r_22 positive.
    const Matrix q_want(2, 2, {Complex(0.8), Complex(-0.6), Complex(0.6), Complex(0.8)});
    const Matrix r_want(2, 2, {Complex(1.6), Complex(-1.3), Complex(0.0), Complex(9.375)});
    CHECK(max_abs_diff(f.q, q_want) <= 1e-12);
    CHECK(max_abs_diff(f.r, r_want) <= 1e-12);
    CHECK(max_abs_diff(f.q * f.r, h) <= 1e-12);
    CHECK(f.q.is_unitary(1e-13));
}

TEST_CASE("qr_hessenberg: structural errors") {
    CHECK_THROWS_AS((void)linalg::qr_hessenberg(Matrix(2, 3)), StructuralError);
    Matrix full(3, 3);
    full(2, 0) = Complex(1.0, 0.0);
    CHECK_THROWS_AS((void)linalg::qr_hessenberg(full), StructuralError);
}

TEST_CASE("qr_hessenberg: random Hessenberg properties") {
    std::mt19937_64 rng(1234);
    for (std::size_t n : {1, 2, 3, 5, 8, 13, 20}) {
        for (int rep = 0; rep < 6; ++rep) {
            const Matrix h = random_hessenberg(n, rng);
            const auto f = linalg::qr_hessenberg(h);
            const double nn = static_cast<double>(n);
            CHECK(f.q.is_unitary(1e-12 * nn));
            CHECK(f.q.is_upper_hessenberg(0.0));
            CHECK(f.r.is_upper_triangular(0.0));
            const Matrix qr = f.q * f.r;
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) err += std::norm(qr(i, j) - h(i, j));
            CHECK(std::sqrt(err) <= 1e-12 * nn * h.frobenius_norm());
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(f.r(i, i).imag() == 0.0);
                CHECK(f.r(i, i).real() >= 0.0);
            }
            CHECK(f.q.is_irreducible_upper_hessenberg(1e-13));
        }
    }
}

TEST_CASE("eigenvalues: fixed examples") {
    {
        Matrix a(2, 2);
        a(0, 0) = Complex(1.0, 0.0);
        a(1, 1) = Complex(0.0, 2.0);
        const auto eigs = linalg::eigenvalues(a);
        CHECK(multiset_match_error(eigs, {Complex(1.0, 0.0), Complex(0.0, 2.0)}) <= 1e-13);
    }
    {
        const Matrix a(2, 2, {Complex(2), Complex(1), Complex(0), Complex(2)});
        const auto eigs = linalg::eigenvalues(a);
        CHECK(multiset_match_error(eigs, {Complex(2.0), Complex(2.0)}) <= 1e-13);
    }
    {
        const Matrix a(2, 2, {Complex(1.28), Complex(-6.665), Complex(0.96), Complex(6.72)});
        const auto eigs = linalg::eigenvalues(a);
        CHECK(multiset_match_error(eigs, {Complex(3.0), Complex(5.0)}) <= 1e-12);
    }
}

TEST_CASE("eigenvalues: 2x2 agrees with the quadratic formula") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 200; ++rep) {
        const Matrix a = random_matrix(2, rng, 3.0);
        const auto eigs = linalg::eigenvalues(a);
        const auto [l1, l2] = quadratic_roots(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        CHECK(multiset_match_error(eigs, {l1, l2}) <= 1e-12);
    }
}

TEST_CASE("eigenvalues: trace and determinant sums") {
    std::mt19937_64 rng(2024);
    for (std::size_t n : {1, 2, 3, 4, 6, 9, 12}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix a = random_matrix(n, rng);
            const auto eigs = linalg::eigenvalues(a);
            REQUIRE(eigs.size() == n);
            Complex sum(0.0, 0.0), prod(1.0, 0.0);
            for (const Complex& l : eigs) {
                sum += l;
                prod *= l;
            }
            const Complex tr = a.trace();
            const Complex det = linalg::determinant(a);
            CHECK(std::abs(sum - tr) <= 1e-9 * std::max(1.0, std::abs(tr)));
            CHECK(std::abs(prod - det) <= 1e-9 * std::max(1.0, std::abs(det)));
        }
    }
}

TEST_CASE("solve_linear: examples and singular detection") {
    {
        const Matrix a = Matrix::identity(2);
        const Vector x = linalg::solve_linear(a, {Complex(3.0, 0.0), Complex(0.0, 4.0)});
        CHECK(std::abs(x[0] - Complex(3.0, 0.0)) <= 1e-15);
        CHECK(std::abs(x[1] - Complex(0.0, 4.0)) <= 1e-15);
    }
    {
        const Matrix a(2, 2, {Complex(1.8), Complex(-0.8), Complex(3.0), Complex(-2.4)});
        const Vector x = linalg::solve_linear(a, {Complex(5.16), Complex(18.6)});
        CHECK(std::abs(x[0] - Complex(-1.3)) <= 1e-12);
        CHECK(std::abs(x[1] - Complex(-9.375)) <= 1e-12);
    }
    {
        const Matrix a(2, 2, {Complex(1), Complex(1), Complex(1), Complex(1)});
        CHECK_THROWS_AS((void)linalg::solve_linear(a, {Complex(1), Complex(0)}),
                        SingularSystemError);
        try {
            (void)linalg::solve_linear(a, {Complex(1), Complex(0)});
        } catch (const SingularSystemError& e) {
            CHECK(e.pivot_index() == 2);
        }
    }
}

TEST_CASE("solve_linear: residual quality on random systems") {
    std::mt19937_64 rng(5150);
    for (std::size_t n : {2, 4, 7, 12}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix a = random_matrix(n, rng);
            Vector b(n);
            for (auto& z : b) z = random_complex(rng);
            const Vector x = linalg::solve_linear(a, b);
            CHECK(residual_norm(a, x, b) <= 1e-10 * a.frobenius_norm() * std::max(1.0, norm2(x)));
        }
    }
}

TEST_CASE("upper_tri_inverse: examples") {
    {
        Matrix r(2, 2);
        r(0, 0) = Complex(2.0);
        r(1, 1) = Complex(4.0);
        const Matrix x = linalg::upper_tri_inverse(r);
        CHECK(std::abs(x(0, 0) - Complex(0.5)) <= 1e-15);
        CHECK(std::abs(x(1, 1) - Complex(0.25)) <= 1e-15);
        CHECK(std::abs(x(0, 1)) == 0.0);
    }
    {
        const Matrix r(2, 2, {Complex(1.6), Complex(-1.3), Complex(0.0), Complex(-9.375)});
        const Matrix x = linalg::upper_tri_inverse(r);
        CHECK(std::abs(x(0, 0) - Complex(0.625)) <= 1e-15);
        CHECK(std::abs(x(0, 1) - Complex(1.3 / (1.6 * -9.375))) <= 1e-15);
        CHECK(std::abs(x(1, 1) - Complex(1.0 / -9.375)) <= 1e-15);
    }
    {
        const Matrix r(2, 2, {Complex(1), Complex(5), Complex(0), Complex(0)});
        CHECK_THROWS_AS((void)linalg::upper_tri_inverse(r), SingularTriangularError);
        try {
            (void)linalg::upper_tri_inverse(r);
        } catch (const SingularTriangularError& e) {
            CHECK(e.index() == 2);
        }
    }
}

TEST_CASE("upper_tri_inverse: involution on well-conditioned inputs") {
    std::mt19937_64 rng(31337);
    for (std::size_t n : {1, 3, 6, 10}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix r = random_upper_triangular(n, rng);
            const Matrix inv = linalg::upper_tri_inverse(r);
            const Matrix prod = r * inv;
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    err += std::norm(prod(i, j) - (i == j ? Complex(1.0) : Complex(0.0)));
            CHECK(std::sqrt(err) <= 1e-12 * static_cast<double>(n));
            CHECK(max_abs_diff(linalg::upper_tri_inverse(inv), r) <= 1e-10);
        }
    }
}

TEST_CASE("determinant: examples") {
    CHECK(std::abs(linalg::determinant(Matrix::identity(3)) - Complex(1.0)) == 0.0);
    const Matrix q2(2, 2, {Complex(0.8), Complex(0.0), Complex(0.6), Complex(0.0)});
    CHECK(std::abs(linalg::determinant(q2)) == 0.0);
    const Matrix h(2, 2, {Complex(1.28), Complex(-6.665), Complex(0.96), Complex(6.72)});
    CHECK(std::abs(linalg::determinant(h) - Complex(15.0)) <= 1e-12);
}

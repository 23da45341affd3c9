#include <doctest.h>

#include <cmath>

#include "ritzforge/errors.hpp"
#include "ritzforge/linalg.hpp"
#include "ritzforge/q_builder.hpp"
#include "test_support.hpp"

using namespace ritzforge;
using namespace testsupport;

namespace {

ResidualSchedule schedule(std::vector<double> norms) {
    ResidualSchedule s;
    s.norms = std::move(norms);
    return s;
}

} // namespace

TEST_CASE("first_row_from_residuals: worked rows") {
    {
        const Vector row = first_row_from_residuals(schedule({1.0}));
        REQUIRE(row.size() == 1);
        CHECK(std::abs(row[0] - Complex(1.0)) == 0.0);
    }
    {
        const Vector row = first_row_from_residuals(schedule({1.0, 0.6}));
        CHECK(std::abs(row[0] - Complex(0.8)) <= 1e-15);
        CHECK(std::abs(row[1] - Complex(0.6)) <= 1e-15);
    }
    {
        const Vector row = first_row_from_residuals(schedule({1.0, 0.6, 0.6}));
        CHECK(std::abs(row[0] - Complex(0.8)) <= 1e-15);
        CHECK(row[1] == Complex(0.0, 0.0)); // exact zero at the plateau
        CHECK(std::abs(row[2] - Complex(0.6)) <= 1e-15);
    }
    CHECK_THROWS_AS((void)first_row_from_residuals(schedule({0.9, 0.6})), AdmissibilityError);
}

TEST_CASE("complete_q: worked matrices") {
    {
        const auto q = complete_q({Complex(1.0)});
        CHECK(std::abs(q.matrix()(0, 0) - Complex(1.0)) == 0.0);
    }
    {
        const auto q = complete_q({Complex(0.8), Complex(0.6)});
        const Matrix want(2, 2, {Complex(0.8), Complex(0.6), Complex(0.6), Complex(-0.8)});
        CHECK(max_abs_diff(q.matrix(), want) <= 1e-15);
    }
    {
        const auto q = complete_q({Complex(0.8), Complex(0.0), Complex(0.6)});
        const Matrix want(3, 3,
                          {Complex(0.8), Complex(0.0), Complex(0.6),  //
                           Complex(0.6), Complex(0.0), Complex(-0.8), //
                           Complex(0.0), Complex(1.0), Complex(0.0)});
        CHECK(max_abs_diff(q.matrix(), want) <= 1e-15);
        CHECK(q.matrix().is_unitary(1e-14));
        // Column 2 is exactly e_3.
        CHECK(q.matrix()(0, 1) == Complex(0.0, 0.0));
        CHECK(q.matrix()(1, 1) == Complex(0.0, 0.0));
        CHECK(std::abs(q.matrix()(2, 1) - Complex(1.0)) == 0.0);
    }
}

TEST_CASE("complete_q: argument and termination errors") {
    CHECK_THROWS_AS((void)complete_q({Complex(0.5), Complex(0.5)}), ArgumentError);
    CHECK_THROWS_AS((void)complete_q({Complex(0.6), Complex(0.8), Complex(0.0)}),
                    PrematureTerminationError);
    try {
        (void)complete_q({Complex(0.6), Complex(0.8), Complex(0.0)});
    } catch (const PrematureTerminationError& e) {
        CHECK(e.step() == 2);
    }
}

TEST_CASE("residuals_from_q and stagnation_steps: worked instances") {
    {
        const auto q = complete_q({Complex(1.0)});
        const auto s = residuals_from_q(q);
        REQUIRE(s.norms.size() == 1);
        CHECK(std::abs(s.norms[0] - 1.0) == 0.0);
        CHECK(stagnation_steps(q).empty());
    }
    {
        const auto q = complete_q({Complex(0.8), Complex(0.6)});
        const auto s = residuals_from_q(q);
        CHECK(std::abs(s.norms[0] - 1.0) <= 1e-15);
        CHECK(std::abs(s.norms[1] - 0.6) <= 1e-15);
        CHECK(stagnation_steps(q).empty());
    }
    {
        const auto q = complete_q({Complex(0.8), Complex(0.0), Complex(0.6)});
        const auto s = residuals_from_q(q);
        CHECK(std::abs(s.norms[1] - 0.6) <= 1e-15);
        CHECK(std::abs(s.norms[2] - 0.6) <= 1e-15);
        CHECK(stagnation_steps(q) == std::set<std::size_t>{2});
    }
    {
        const auto q = complete_q({Complex(0.0), Complex(1.0)});
        CHECK(stagnation_steps(q) == std::set<std::size_t>{1});
    }
}

TEST_CASE("q-builder round trip at 1e-12") {
    std::mt19937_64 rng(808);
    for (std::size_t n : {1, 2, 3, 5, 8, 12, 16, 20}) {
        for (int rep = 0; rep < 4; ++rep) {
            const auto plateaus = random_plateau_set(n, rng);
            const ResidualSchedule s = random_schedule(n, plateaus, rng);
            const auto q = complete_q(first_row_from_residuals(s));
            const ResidualSchedule back = residuals_from_q(q);
            REQUIRE(back.norms.size() == n);
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(std::abs(back.norms[k] - s.norms[k]) <= 1e-12);
            }
            CHECK(stagnation_steps(q) == plateaus);
            CHECK(q.matrix().is_unitary(1e-12 * static_cast<double>(n)));
        }
    }
}

TEST_CASE("sign freedom is inert") {
    std::mt19937_64 rng(4096);
    for (std::size_t n : {2, 4, 7, 11}) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto plateaus = random_plateau_set(n, rng);
            const ResidualSchedule s = random_schedule(n, plateaus, rng);
            std::vector<Complex> sigma(n), rho(n - 1);
            for (auto& z : sigma) z = random_unimodular(rng);
            for (auto& z : rho) z = random_unimodular(rng);
            const auto q = complete_q(first_row_from_residuals(s, sigma), rho);
            const ResidualSchedule back = residuals_from_q(q);
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(std::abs(back.norms[k] - s.norms[k]) <= 1e-12);
            }
            CHECK(stagnation_steps(q) == plateaus);
        }
    }
}

TEST_CASE("column characterization matches the first-row characterization") {
    std::mt19937_64 rng(515);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(uniform(rng, 0.0, 10.0));
        const auto plateaus = random_plateau_set(n, rng, 0.4);
        const auto q = complete_q(first_row_from_residuals(random_schedule(n, plateaus, rng)));
        const auto stag = stagnation_steps(q); // throws on disagreement
        CHECK(stag == plateaus);
        const Matrix& m = q.matrix();
        for (std::size_t k = 1; k + 1 <= n; ++k) {
            const bool row_zero = std::abs(m(0, k - 1)) <= kRowOneZeroTol;
            double off = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i != k) off = std::max(off, std::abs(m(i, k - 1)));
            }
            CHECK(row_zero == (off <= kRowOneZeroTol));
        }
    }
}

TEST_CASE("principal blocks are singular exactly at plateau steps") {
    std::mt19937_64 rng(616);
    for (std::size_t n : {3, 6, 9, 12}) {
        for (int rep = 0; rep < 4; ++rep) {
            const auto plateaus = random_plateau_set(n, rng, 0.35);
            const auto q = complete_q(first_row_from_residuals(random_schedule(n, plateaus, rng)));
            for (std::size_t k = 1; k + 1 <= n; ++k) {
                const double det = std::abs(linalg::determinant(q.matrix().principal_submatrix(k)));
                if (plateaus.count(k)) {
                    CHECK(det <= 1e-12);
                } else {
                    CHECK(det > 1e-12);
                }
            }
        }
    }
}

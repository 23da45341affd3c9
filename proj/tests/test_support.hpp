#pragma once

// Shared generators and matchers for the test suites. Everything is
// seeded explicitly so failures reproduce.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "ritzforge/matrix.hpp"
#include "ritzforge/prescription.hpp"

namespace testsupport {

using ritzforge::Complex;
using ritzforge::Matrix;
using ritzforge::Vector;

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
    return {scale * (2.0 * uniform01(rng) - 1.0), scale * (2.0 * uniform01(rng) - 1.0)};
}

inline Complex random_unimodular(std::mt19937_64& rng) {
    return std::polar(1.0, uniform(rng, 0.0, 2.0 * M_PI));
}

inline Matrix random_matrix(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = random_complex(rng, scale);
    return a;
}

// Irreducible upper Hessenberg with subdiagonal magnitudes in [0.5, 1.5].
inline Matrix random_hessenberg(std::size_t n, std::mt19937_64& rng,
                                bool positive_subdiagonal = false) {
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i > 0 ? i - 1 : 0; j < n; ++j) h(i, j) = random_complex(rng);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double mag = uniform(rng, 0.5, 1.5);
        h(i + 1, i) = positive_subdiagonal ? Complex(mag, 0.0)
                                           : std::polar(mag, uniform(rng, 0.0, 2.0 * M_PI));
    }
    return h;
}

inline Matrix random_upper_triangular(std::size_t n, std::mt19937_64& rng) {
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = std::polar(uniform(rng, 0.5, 2.0), uniform(rng, 0.0, 2.0 * M_PI));
        for (std::size_t j = i + 1; j < n; ++j) r(i, j) = random_complex(rng);
    }
    return r;
}

// Valid residual schedule, exact plateaus at the given steps.
inline ritzforge::ResidualSchedule random_schedule(std::size_t n,
                                                   const std::set<std::size_t>& plateaus,
                                                   std::mt19937_64& rng) {
    ritzforge::ResidualSchedule s;
    s.norms.resize(n);
    s.norms[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        if (plateaus.count(k)) {
            s.norms[k] = s.norms[k - 1];
        } else {
            const double u = uniform(rng, 0.05, 0.6);
            const double prev2 = s.norms[k - 1] * s.norms[k - 1];
            s.norms[k] = std::sqrt(prev2 * (1.0 - u));
        }
    }
    return s;
}

inline std::set<std::size_t> random_plateau_set(std::size_t n, std::mt19937_64& rng,
                                                double probability = 0.3) {
    std::set<std::size_t> out;
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        if (uniform01(rng) < probability) out.insert(k);
    }
    return out;
}

// Roots of z^2 - (a+d) z + (ad - bc), the straightforward way; serves as
// the independent oracle for 2x2 eigenvalues.
inline std::pair<Complex, Complex> quadratic_roots(Complex a, Complex b, Complex c, Complex d) {
    const Complex tr = a + d;
    const Complex det = a * d - b * c;
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

// Greedy global multiset match; returns the maximum pair distance
// (relative when relative=true), or +inf on size mismatch.
inline double multiset_match_error(std::vector<Complex> got, std::vector<Complex> want,
                                   bool relative = true) {
    if (got.size() != want.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::vector<bool> used(got.size(), false);
    for (const Complex& w : want) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = got.size();
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (used[i]) continue;
            const double dist = std::abs(got[i] - w);
            if (dist < best) {
                best = dist;
                best_i = i;
            }
        }
        used[best_i] = true;
        worst = std::max(worst, relative ? best / std::max(1e-300, std::abs(w)) : best);
    }
    return worst;
}

} // namespace testsupport

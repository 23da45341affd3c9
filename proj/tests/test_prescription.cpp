#include <doctest.h>

#include <algorithm>

#include "ritzforge/errors.hpp"
#include "ritzforge/prescription.hpp"
#include "test_support.hpp"

using namespace ritzforge;
using namespace testsupport;

namespace {

Prescription make(std::vector<double> norms, std::vector<std::vector<HarmonicRitzValue>> steps) {
    Prescription p;
    p.schedule.norms = std::move(norms);
    p.ritz.steps = std::move(steps);
    return p;
}

HarmonicRitzValue fin(double re, double im = 0.0) {
    return HarmonicRitzValue::finite(Complex(re, im));
}

const HarmonicRitzValue inf = HarmonicRitzValue::infinity();

} // namespace

TEST_CASE("validate: worked stagnation-free prescription is ok") {
    const auto p = make({1.0, 0.6}, {{fin(2)}, {fin(3), fin(5)}});
    CHECK(validate(p).ok());
}

TEST_CASE("validate: plateau pattern per the stagnation rule") {
    const auto ok = make({1.0, 0.6, 0.6},
                         {{fin(2)}, {fin(2), inf}, {fin(1), fin(4), fin(7)}});
    CHECK(validate(ok).ok());

    const auto bad = make({1.0, 0.6, 0.6},
                          {{fin(2)}, {fin(7), inf}, {fin(1), fin(4), fin(7)}});
    const auto rep = validate(bad);
    REQUIRE(!rep.ok());
    bool found = false;
    for (const auto& v : rep.violations) found = found || v.step == 2;
    CHECK(found);
}

TEST_CASE("validate: schedule defects are reported") {
    CHECK(!validate(make({0.9}, {{fin(2)}})).ok());              // leading norm
    CHECK(!validate(make({1.0, 0.0}, {{fin(2)}, {fin(1), fin(3)}})).ok()); // final norm
    CHECK(!validate(make({1.0, 0.5, 0.7},
                         {{fin(2)}, {fin(1), fin(3)}, {fin(1), fin(3), fin(4)}}))
               .ok()); // increasing
    // Near-plateau: squared gap between the two cutoffs is ambiguous.
    const double near = std::sqrt(1.0 - 1e-13);
    CHECK(!validate(make({1.0, near}, {{fin(2)}, {fin(1), fin(3)}})).ok());
}

TEST_CASE("validate: value-level defects") {
    CHECK(!validate(make({1.0}, {{fin(0.0)}})).ok()); // zero value
    // Infinity without a plateau.
    CHECK(!validate(make({1.0}, {{inf}})).ok());
    CHECK(!validate(make({1.0, 0.6}, {{fin(2)}, {fin(3), inf}})).ok());
    // Coinciding finite values within one step.
    CHECK(!validate(make({1.0, 0.6}, {{fin(2)}, {fin(3), fin(3)}})).ok());
    // Plateau step missing its infinity.
    CHECK(!validate(make({1.0, 0.6, 0.6},
                         {{fin(2)}, {fin(2), fin(5)}, {fin(1), fin(3), fin(4)}}))
               .ok());
}

TEST_CASE("validate: order within tuples does not matter") {
    auto p = make({1.0, 0.6, 0.6},
                  {{fin(2)}, {inf, fin(2)}, {fin(7), fin(1), fin(4)}});
    CHECK(validate(p).ok());
    std::reverse(p.ritz.steps[2].begin(), p.ritz.steps[2].end());
    CHECK(validate(p).ok());
}

TEST_CASE("validate: perturbing a plateau value flips the verdict") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 4 + rep % 5;
        auto plateaus = random_plateau_set(n, rng, 0.5);
        if (plateaus.empty()) plateaus.insert(1);
        Prescription p = random_prescription(n, plateaus, rng());
        REQUIRE(validate(p).ok());
        const std::size_t step = *plateaus.begin();
        auto& tuple = p.ritz.steps[step - 1];
        bool mutated = false;
        for (auto& v : tuple) {
            if (v.is_finite()) {
                v = HarmonicRitzValue::finite(v.value() + Complex(1e-6, 0.0));
                mutated = true;
                break;
            }
        }
        if (mutated) CHECK(!validate(p).ok());
    }
}

TEST_CASE("random_prescription: fixed examples") {
    {
        const Prescription p = random_prescription(1, {}, 7);
        REQUIRE(p.size() == 1);
        CHECK(p.schedule.norms[0] == 1.0);
        REQUIRE(p.ritz.steps[0].size() == 1);
        CHECK(p.ritz.steps[0][0].is_finite());
    }
    {
        const Prescription p = random_prescription(5, {3}, 1);
        CHECK(validate(p).ok());
        std::size_t infs = 0;
        for (const auto& v : p.ritz.steps[2]) infs += v.is_infinite() ? 1 : 0;
        CHECK(infs == 1);
    }
    CHECK_THROWS_AS((void)random_prescription(5, {5}, 1), ArgumentError);
    CHECK_THROWS_AS((void)random_prescription(0, {}, 1), ArgumentError);
    CHECK_THROWS_AS((void)random_prescription(3, {0}, 1), ArgumentError);
}

TEST_CASE("random_prescription: always admissible, deterministic in the seed") {
    std::mt19937_64 rng(4242);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform(rng, 0.0, 12.0));
        const auto plateaus = random_plateau_set(n, rng);
        const std::uint64_t seed = rng();
        const Prescription p = random_prescription(n, plateaus, seed);
        CHECK(validate(p).ok());
        const Prescription q = random_prescription(n, plateaus, seed);
        REQUIRE(q.schedule.norms == p.schedule.norms);
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE(q.ritz.steps[k].size() == p.ritz.steps[k].size());
            for (std::size_t i = 0; i < p.ritz.steps[k].size(); ++i) {
                CHECK(q.ritz.steps[k][i] == p.ritz.steps[k][i]);
            }
        }
        // Magnitude window and separation of finite values.
        for (std::size_t k = 0; k < n; ++k) {
            const auto& t = p.ritz.steps[k];
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (!t[i].is_finite()) continue;
                const double mag = std::abs(t[i].value());
                CHECK(mag >= 0.5);
                CHECK(mag <= 5.0);
                for (std::size_t j = i + 1; j < t.size(); ++j) {
                    if (t[j].is_finite()) CHECK(std::abs(t[i].value() - t[j].value()) >= 1e-3);
                }
            }
        }
    }
}

TEST_CASE("plateau_steps: exact equality only") {
    ResidualSchedule s;
    s.norms = {1.0, 0.7, 0.7, 0.4};
    CHECK(s.plateau_steps() == std::set<std::size_t>{2});
}

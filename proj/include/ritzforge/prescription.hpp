#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ritzforge/matrix.hpp"

namespace ritzforge {

/// Two consecutive squared residual norms are "equal" (a plateau step)
/// when they differ by at most this much.
inline constexpr double kPlateauTolSquared = 1e-14;
/// A genuine decrease must be at least this large in squared value;
/// gaps between the two cutoffs are rejected as ambiguous.
inline constexpr double kDecreaseMinSquared = 1e-12;
/// Tolerance for |.| == 1 checks on sign overrides and the leading norm.
inline constexpr double kUnitTol = 1e-12;

/// Prescribed residual norms ||r_0||, ..., ||r_{n-1}||. The terminal
/// ||r_n|| = 0 is implicit. Step k (1-based, k <= n-1) is a plateau step
/// when ||r_k|| equals ||r_{k-1}|| to within kPlateauTolSquared in
/// squared value.
struct ResidualSchedule {
    std::vector<double> norms;

    std::size_t size() const noexcept { return norms.size(); }
    /// 1-based plateau step indices.
    std::set<std::size_t> plateau_steps() const;
};

/// A harmonic Ritz value: a nonzero finite complex number or infinity.
class HarmonicRitzValue {
public:
    static HarmonicRitzValue finite(Complex v) { return HarmonicRitzValue(false, v); }
    static HarmonicRitzValue infinity() { return HarmonicRitzValue(true, Complex(0.0, 0.0)); }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    /// Only meaningful for finite values.
    Complex value() const noexcept { return value_; }

    friend bool operator==(const HarmonicRitzValue& a, const HarmonicRitzValue& b) {
        if (a.infinite_ != b.infinite_) return false;
        return a.infinite_ || a.value_ == b.value_;
    }

private:
    HarmonicRitzValue(bool infinite, Complex v) : infinite_(infinite), value_(v) {}
    bool infinite_;
    Complex value_;
};

using RitzTuple = std::vector<HarmonicRitzValue>;

/// Canonical storage order: nondecreasing magnitude, infinite values
/// last, magnitude ties broken by nondecreasing principal argument.
void canonical_sort(RitzTuple& tuple);

/// One tuple of harmonic Ritz values per step; steps[k-1] has k entries.
struct RitzPrescription {
    std::vector<RitzTuple> steps;
};

/// Full input to the construction: schedule, Ritz value set, and the
/// optional unimodular sign freedom (first-row signs sigma_1..sigma_n,
/// subdiagonal signs rho_1..rho_{n-1}).
struct Prescription {
    ResidualSchedule schedule;
    RitzPrescription ritz;
    std::optional<std::vector<Complex>> first_row_signs;
    std::optional<std::vector<Complex>> rho_signs;

    std::size_t size() const noexcept { return schedule.size(); }
};

struct Violation {
    std::size_t step; ///< 1-based step, 0 for schedule-level problems
    std::string message;
};

struct AdmissibilityReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Admissibility check. The report is ok iff (a) the schedule invariants
/// hold, (b) every finite value is nonzero (and finite values within a
/// step are pairwise distinct), (c) infinite values appear exactly
/// inside plateau runs with the persistence-plus-infinity pattern, and
/// (d) non-plateau steps carry only finite values. Violations are data,
/// never exceptions.
AdmissibilityReport validate(const Prescription& p);

/// Violations of the schedule invariants alone (clause (a) above).
std::vector<Violation> schedule_violations(const ResidualSchedule& s);

/// Deterministic random prescription: strictly decreasing squared norms
/// except exact equality at the given plateau steps, finite values with
/// magnitude in [0.5, 5] pairwise separated by >= 1e-3 within each step,
/// plateau tuples auto-filled with the persistence-plus-infinity
/// pattern. The result always validates ok.
Prescription random_prescription(std::size_t n, const std::set<std::size_t>& plateau_steps,
                                 std::uint64_t seed);

} // namespace ritzforge

#pragma once

#include <optional>
#include <set>

#include "ritzforge/matrix.hpp"
#include "ritzforge/prescription.hpp"

namespace ritzforge {

/// Magnitudes at or below this are treated as zero in the first row of a
/// unitary Hessenberg matrix (stagnation detection). Kept slightly above
/// the plateau cutoff used at parse time so classification is stable.
inline constexpr double kRowOneZeroTol = 1e-13;

/// A validated unitary irreducible upper Hessenberg matrix.
/// Invariants: ||Q*Q - I||_F <= 1e-12 n, upper Hessenberg, all
/// subdiagonal magnitudes > 1e-13.
class UnitaryHessenberg {
public:
    /// Validates the invariants; throws StructuralError on failure.
    static UnitaryHessenberg from_matrix(Matrix q);

    const Matrix& matrix() const noexcept { return q_; }
    std::size_t size() const noexcept { return q_.rows(); }

private:
    explicit UnitaryHessenberg(Matrix q) : q_(std::move(q)) {}
    Matrix q_;
};

/// First row of the unitary Hessenberg matrix realizing the schedule:
/// |q_{1l}|^2 = ||r_{l-1}||^2 - ||r_l||^2 with ||r_n|| = 0. Plateau
/// steps produce exact zeros. Default entries are real nonnegative;
/// the optional unimodular signs multiply them entrywise. Throws
/// AdmissibilityError when the schedule is invalid.
Vector first_row_from_residuals(const ResidualSchedule& s,
                                const std::optional<std::vector<Complex>>& signs = std::nullopt);

/// Completes rows 2..n from the first row, which must have unit norm to
/// 1e-12 and partial sums below 1 - 1e-14 through position n-1 (throws
/// PrematureTerminationError otherwise). Subdiagonal signs default to 1.
UnitaryHessenberg complete_q(const Vector& first_row,
                             const std::optional<std::vector<Complex>>& rhos = std::nullopt);

/// Residual norms read back from the first row (tail sums of squares).
ResidualSchedule residuals_from_q(const UnitaryHessenberg& q);

/// Stagnation steps: {k : |q_{1k}| <= 1e-13}, cross-checked against the
/// equivalent column characterization (column k supported only on row
/// k+1); disagreement raises InternalConsistencyError.
std::set<std::size_t> stagnation_steps(const UnitaryHessenberg& q);

} // namespace ritzforge

#pragma once

#include <vector>

#include "ritzforge/matrix.hpp"
#include "ritzforge/prescription.hpp"
#include "ritzforge/q_builder.hpp"

namespace ritzforge {

/// Affine expansion of det(R_k - theta Q_k^*) in the unknown last column
/// of R_k: the determinant equals sum_j cofactors[j] * r_{jk} + constant.
struct AffineDetCoeffs {
    Vector cofactors;
    Complex constant;
};

/// Coefficients of the determinant expansion. `qk_star` is the k x k
/// conjugate-transposed principal block, `r_fixed` holds the k x (k-1)
/// already-constructed columns, `theta` a finite nonzero target value.
/// Computed via k+1 determinant evaluations of k x k matrices.
AffineDetCoeffs det_affine_coeffs(const Matrix& qk_star, const Matrix& r_fixed, Complex theta);

/// New column of the triangular factor at step k (1-based). At plateau
/// steps the column is exactly e_k; otherwise the k affine determinant
/// equations for the prescribed values are stacked and solved. Throws
/// DegeneratePrescriptionError when the stacked system is singular and
/// SingularRError when the resulting diagonal entry is negligible.
Vector prescribe_column(std::size_t k, const UnitaryHessenberg& q, const Matrix& r_fixed,
                        const RitzTuple& thetas, bool plateau);

/// The constructed triple {H, Q, R} with H = QR, plus the inputs and the
/// infinity-norm condition estimate of each solved step system (1.0 at
/// plateau steps, where no system is solved).
struct ForgeResult {
    Matrix h;
    UnitaryHessenberg q;
    Matrix r;
    Prescription prescription;
    std::vector<double> condition_estimates;
};

/// Build a matrix-vector pair {H, e_1} whose GMRES run produces the
/// prescribed residual norms and harmonic Ritz values at every step.
/// The prescription must validate ok (AdmissibilityError otherwise).
/// The returned triple is phase-normalized so that every subdiagonal
/// entry of H is real positive; the Krylov process applied to {H, e_1}
/// then reproduces H itself.
ForgeResult forge(const Prescription& p);

} // namespace ritzforge

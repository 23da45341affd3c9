#include "ritzforge/r_builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dense_kernels.hpp"
#include "ritzforge/errors.hpp"
#include "ritzforge/linalg.hpp"

namespace ritzforge {

namespace {

// The construction runs in extended precision end to end: the stacked
// determinant systems inherit the conditioning of the prescription and
// routinely reach 1e10 and beyond, and the assembled matrix is then
// rounded to double exactly once.
using LD = long double;
using LC = detail::Cx<LD>;
using LMat = detail::DenseMat<LD>;

struct ExtColumn {
    std::vector<LC> column;
    double condition; // inf-norm condition estimate of the solved system
};

struct LAffine {
    std::vector<LC> cofactors;
    LC constant;
};

// Affine expansion of det(R_k - theta Q_k^*) in the unknown last column
// (k+1 determinant evaluations).
LAffine affine_coeffs_ext(const LMat& qk_star, const LMat& r_fixed, const LC& theta) {
    const std::size_t k = qk_star.rows;
    LMat base(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j + 1 < k; ++j) base(i, j) = r_fixed(i, j) - theta * qk_star(i, j);
        base(i, k - 1) = -theta * qk_star(i, k - 1);
    }
    LAffine out;
    out.constant = detail::determinant_kernel(base);
    out.cofactors.resize(k);
    LMat probe = base;
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            probe(i, k - 1) = (i == j) ? LC(LD(1), LD(0)) : LC(LD(0), LD(0));
        }
        out.cofactors[j] = detail::determinant_kernel(probe);
    }
    return out;
}

// q_full is the n x n extended-precision unitary factor; r_fixed holds
// the first k-1 constructed columns, k rows deep.
ExtColumn prescribe_column_ext(std::size_t k, const LMat& q_full, const LMat& r_fixed,
                               const RitzTuple& thetas, bool plateau) {
    const std::size_t n = q_full.rows;
    if (k < 1 || k > n) throw ArgumentError("step index out of range");
    if (thetas.size() != k) {
        throw ArgumentError("step " + std::to_string(k) + " needs exactly " +
                            std::to_string(k) + " prescribed values");
    }
    if (r_fixed.rows != k || r_fixed.cols != k - 1) {
        throw StructuralError("fixed columns must form a k x (k-1) block");
    }
    const bool row_one_zero = abs(q_full(0, k - 1)) <= LD(kRowOneZeroTol);
    if (plateau != (k < n && row_one_zero)) {
        throw ArgumentError("plateau flag at step " + std::to_string(k) +
                            " disagrees with the matrix structure");
    }

    if (plateau) {
        // Stagnant step: the new column of R is e_k, equivalently the new
        // column of R^{-1} is e_k.
        std::vector<LC> col(k, LC(LD(0), LD(0)));
        col[k - 1] = LC(LD(1), LD(0));
        return {std::move(col), 1.0};
    }

    LMat qk_star(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) qk_star(i, j) = conj(q_full(j, i));

    LMat system(k, k);
    std::vector<LC> rhs(k);
    std::vector<LC> theta_ext(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!thetas[i].is_finite()) {
            throw ArgumentError("infinite value prescribed at non-plateau step " +
                                std::to_string(k));
        }
        theta_ext[i] = detail::widen_scalar<LD>(thetas[i].value());
        const LAffine co = affine_coeffs_ext(qk_star, r_fixed, theta_ext[i]);
        for (std::size_t j = 0; j < k; ++j) system(i, j) = co.cofactors[j];
        rhs[i] = -co.constant;
    }

    const detail::LuT<LD> factored = detail::lu_factor_kernel(system);
    const LD pivot_threshold = LD(1e-14) * detail::frobenius(system);
    if (factored.exact_zero || factored.min_pivot < pivot_threshold) {
        throw DegeneratePrescriptionError(
            "prescribed values at step " + std::to_string(k) +
                " lead to a singular inverse eigenvalue system",
            k);
    }
    std::vector<LC> col = detail::lu_solve_kernel(factored, rhs);

    // Refinement against the true objective: re-evaluated determinants
    // have small relative error, so correcting through the factored
    // system recovers what an ill-conditioned stack loses.
    {
        LMat trial(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j + 1 < k; ++j) trial(i, j) = r_fixed(i, j);
        for (int sweep = 0; sweep < 3; ++sweep) {
            for (std::size_t i = 0; i < k; ++i) trial(i, k - 1) = col[i];
            std::vector<LC> residual(k);
            LD rnorm = LD(0);
            for (std::size_t i = 0; i < k; ++i) {
                LMat shifted = trial;
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b)
                        shifted(a, b) -= theta_ext[i] * qk_star(a, b);
                residual[i] = -detail::determinant_kernel(shifted);
                rnorm += norm(residual[i]);
            }
            if (rnorm == LD(0)) break;
            const std::vector<LC> correction = detail::lu_solve_kernel(factored, residual);
            LD cnorm = LD(0), xnorm = LD(0);
            for (std::size_t i = 0; i < k; ++i) {
                col[i] += correction[i];
                cnorm += norm(correction[i]);
                xnorm += norm(col[i]);
            }
            if (cnorm <= LD(1e-36) * xnorm) break;
        }
    }

    // Infinity-norm condition estimate of the step system, via the
    // explicit inverse; desk scale makes the extra solves irrelevant.
    double condition = 0.0;
    {
        LD a_inf = LD(0), inv_inf = LD(0);
        std::vector<LD> inv_row_sums(k, LD(0));
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<LC> e(k, LC(LD(0), LD(0)));
            e[j] = LC(LD(1), LD(0));
            const std::vector<LC> x = detail::lu_solve_kernel(factored, e);
            for (std::size_t i = 0; i < k; ++i) inv_row_sums[i] += abs(x[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            LD row = LD(0);
            for (std::size_t j = 0; j < k; ++j) row += abs(system(i, j));
            a_inf = std::max(a_inf, row);
            inv_inf = std::max(inv_inf, inv_row_sums[i]);
        }
        condition = static_cast<double>(a_inf * inv_inf);
    }

    LD scale = abs(col[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) scale = std::max(scale, abs(r_fixed(j, j)));
    if (abs(col[k - 1]) <= LD(1e-10) * scale) {
        throw SingularRError("constructed diagonal entry at step " + std::to_string(k) +
                                 " is negligible",
                             k);
    }
    return {std::move(col), condition};
}

// Rows 2..n of the unitary factor from its first row, in extended
// precision (same formulas and error conditions as complete_q).
LMat complete_q_ext(const std::vector<LC>& first_row, const std::vector<LC>& rhos) {
    const std::size_t n = first_row.size();
    std::vector<LD> tail(n + 1, LD(0));
    for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + norm(first_row[i]);
    if (detail::rabs_impl(tail[0] - LD(1)) > LD(kUnitTol)) {
        throw ArgumentError("first row must have unit Euclidean norm");
    }
    for (std::size_t i = 1; i + 1 <= n; ++i) {
        if (tail[i] <= LD(1e-14)) {
            throw PrematureTerminationError(
                "residual would vanish at step " + std::to_string(i) +
                    ", before the final step",
                i);
        }
    }
    LMat q(n, n);
    for (std::size_t j = 0; j < n; ++j) q(0, j) = first_row[j];
    for (std::size_t i = 1; i <= n - 1; ++i) {
        const LC rho = rhos[i - 1];
        const LD before = detail::rsqrt_impl(tail[i - 1]);
        const LD after = detail::rsqrt_impl(tail[i]);
        q(i, i - 1) = rho * (after / before);
        const LC factor = -rho * conj(first_row[i - 1]) / (before * after);
        for (std::size_t j = i; j < n; ++j) q(i, j) = factor * first_row[j];
    }
    return q;
}

} // namespace

AffineDetCoeffs det_affine_coeffs(const Matrix& qk_star, const Matrix& r_fixed, Complex theta) {
    const std::size_t k = qk_star.rows();
    if (!qk_star.is_square() || k == 0) {
        throw StructuralError("det_affine_coeffs requires a square block");
    }
    if (r_fixed.rows() != k || r_fixed.cols() != k - 1) {
        throw StructuralError("fixed columns must form a k x (k-1) block");
    }

    // Base matrix: fixed columns of R_k minus theta Q_k^*; the unknown
    // last column enters the determinant linearly.
    Matrix base(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j + 1 < k; ++j) base(i, j) = r_fixed(i, j) - theta * qk_star(i, j);
        base(i, k - 1) = -theta * qk_star(i, k - 1);
    }

    AffineDetCoeffs out;
    out.constant = linalg::determinant(base);
    out.cofactors.resize(k);
    Matrix probe = base;
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            probe(i, k - 1) = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
        }
        out.cofactors[j] = linalg::determinant(probe);
    }
    return out;
}

Vector prescribe_column(std::size_t k, const UnitaryHessenberg& q, const Matrix& r_fixed,
                        const RitzTuple& thetas, bool plateau) {
    const ExtColumn ext = prescribe_column_ext(k, detail::widen<LD>(q.matrix()),
                                               detail::widen<LD>(r_fixed), thetas, plateau);
    Vector col(k);
    for (std::size_t i = 0; i < k; ++i) col[i] = detail::narrow_scalar(ext.column[i]);
    return col;
}

ForgeResult forge(const Prescription& p) {
    const AdmissibilityReport rep = validate(p);
    if (!rep.ok()) {
        throw AdmissibilityError("inadmissible prescription: step " +
                                 std::to_string(rep.violations.front().step) + ": " +
                                 rep.violations.front().message);
    }
    const std::size_t n = p.size();

    // Same construction as complete_q(first_row_from_residuals(...)),
    // carried in extended precision until the final rounding.
    const Vector first_row = first_row_from_residuals(p.schedule, p.first_row_signs);
    std::vector<LC> first_row_ext(n);
    for (std::size_t i = 0; i < n; ++i) first_row_ext[i] = detail::widen_scalar<LD>(first_row[i]);
    std::vector<LC> rhos_ext(n >= 1 ? n - 1 : 0, LC(LD(1), LD(0)));
    if (p.rho_signs) {
        for (std::size_t i = 0; i + 1 < n; ++i)
            rhos_ext[i] = detail::widen_scalar<LD>((*p.rho_signs)[i]);
    }
    const LMat q = complete_q_ext(first_row_ext, rhos_ext);
    const std::set<std::size_t> plateaus = p.schedule.plateau_steps();

    LMat r(n, n);
    std::vector<double> conditions(n, 1.0);
    for (std::size_t k = 1; k <= n; ++k) {
        LMat fixed(k, k - 1);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j + 1 < k; ++j) fixed(i, j) = r(i, j);
        ExtColumn ext =
            prescribe_column_ext(k, q, fixed, p.ritz.steps[k - 1], plateaus.count(k) > 0);
        for (std::size_t i = 0; i < k; ++i) r(i, k - 1) = ext.column[i];
        conditions[k - 1] = ext.condition;
    }

    LMat h = detail::matmul(q, r);

    // Phase normalization: a diagonal unitary similarity (a particular
    // choice of the free signs) making every subdiagonal entry of H real
    // positive, so that {H, e_1} is its own Krylov representative.
    std::vector<LC> d(n, LC(LD(1), LD(0)));
    for (std::size_t i = 1; i < n; ++i) {
        const LC sub = h(i, i - 1);
        d[i] = sub * d[i - 1] / abs(sub);
    }
    LMat qn(n, n);
    LMat rn(n, n);
    LMat hn(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const LC phase = conj(d[i]) * d[j];
            qn(i, j) = phase * q(i, j);
            rn(i, j) = phase * r(i, j);
            hn(i, j) = phase * h(i, j);
        }
    }
    // |d_i| == 1 only up to roundoff; pin the entries the normalization
    // is supposed to fix exactly.
    for (std::size_t i = 0; i < n; ++i) rn(i, i) = r(i, i);
    for (std::size_t i = 1; i < n; ++i) hn(i, i - 1) = LC(abs(h(i, i - 1)), LD(0));

    ForgeResult out{detail::narrow(hn), UnitaryHessenberg::from_matrix(detail::narrow(qn)),
                    detail::narrow(rn), p, std::move(conditions)};
    return out;
}

} // namespace ritzforge

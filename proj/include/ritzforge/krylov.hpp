#pragma once

#include <optional>
#include <set>
#include <vector>

#include "ritzforge/matrix.hpp"
#include "ritzforge/prescription.hpp"

namespace ritzforge {

/// Result of the Krylov orthonormalization process for {A, b}. Without
/// breakdown, v is n x n unitary and h = v* A v is n x n irreducible
/// upper Hessenberg with A v = v h. If the candidate vector vanishes at
/// some step j < n, the decomposition is truncated: v is n x j, h is
/// j x j, breakdown_step = j (the Krylov space is A-invariant and the
/// relation A v = v h still holds).
struct ArnoldiDecomposition {
    Matrix v;
    Matrix h;
    std::optional<std::size_t> breakdown_step;
};

/// Modified Gram-Schmidt with one unconditional full reorthogonalization
/// pass. Requires ||b|| = 1 to 1e-12 (ArgumentError otherwise); a
/// candidate norm below 1e-12 ||A||_F at step j < n reports breakdown.
ArnoldiDecomposition arnoldi(const Matrix& a, const Vector& b);

/// Minimal-residual norms for {A, b} with zero initial guess, computed
/// by progressive Givens rotations on the Krylov Hessenberg matrix.
/// Entry k is the norm after k steps; entry 0 is 1. On breakdown at
/// step j the history is truncated to length j+1 with final entry 0.
std::vector<double> gmres_history(const Matrix& a, const Vector& b);

/// Harmonic Ritz values at step k of an irreducible upper Hessenberg
/// matrix: with H = QR, the reciprocals of the eigenvalues of
/// Q_k^* R_k^{-1}; eigenvalues of magnitude <= 1e-8 ||Q_k^* R_k^{-1}||_F
/// classify as infinite. Output in canonical order.
RitzTuple harmonic_ritz(const Matrix& h, std::size_t k);

/// Same, from an existing factorization H = q r (any unimodular column
/// rescaling of the factors yields the same values).
RitzTuple harmonic_ritz_from_qr(const Matrix& q, const Matrix& r, std::size_t k);

struct AnalysisReport {
    std::vector<double> residual_history;          ///< length m+1
    std::vector<RitzTuple> harmonic_ritz_per_step; ///< tuples for steps 1..m
    std::set<std::size_t> stagnation_steps;
};

/// Full measurement of {A, b}: Krylov decomposition, residual history,
/// per-step harmonic Ritz values, and stagnation steps. The history is
/// cross-checked against the tail-sum formula on the first row of the
/// factor Q (InternalConsistencyError on disagreement beyond 1e-10).
AnalysisReport analyze(const Matrix& a, const Vector& b);

struct StepDetail {
    std::size_t step;
    double residual_abs_err;
    double ritz_rel_err;
    bool inf_count_match;
};

struct VerifyReport {
    double residual_max_abs_err = 0.0;
    double ritz_max_rel_err = 0.0;
    std::vector<StepDetail> per_step;
    bool pass = false;
    std::optional<std::size_t> first_failing_step;
};

/// Compare a prescription against the measured behavior of {H, e_1}.
/// Residual comparison is entrywise absolute; harmonic Ritz comparison
/// pairs finite values per step (canonical order plus one repair sweep)
/// with relative error, and requires exact agreement of the infinity
/// counts. Failures are data, never exceptions.
VerifyReport verify(const Prescription& p, const Matrix& h, double tol_res, double tol_ritz);

} // namespace ritzforge

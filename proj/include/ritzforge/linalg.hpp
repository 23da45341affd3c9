#pragma once

#include <vector>

#include "ritzforge/matrix.hpp"

namespace ritzforge::linalg {

struct QrFactors {
    Matrix q; ///< unitary upper Hessenberg
    Matrix r; ///< upper triangular, diagonal real nonnegative where attainable
};

/// QR factorization of a square upper Hessenberg matrix via Givens
/// rotations. The factorization is made deterministic by a canonical
/// normalization: every diagonal entry of R is scaled to be real and
/// nonnegative (columns with an exactly zero diagonal keep the
/// rotation-produced sign). If the input is irreducible and nonsingular,
/// Q is irreducible and R nonsingular.
QrFactors qr_hessenberg(const Matrix& h);

/// Eigenvalues of a general square complex matrix, with multiplicity,
/// in unspecified order. Householder reduction to Hessenberg form
/// followed by single-shift QR iteration with Wilkinson-style shifts.
/// A subdiagonal entry deflates when its magnitude drops below
/// 1e-14 * (|h_ii| + |h_{i+1,i+1}|). Throws ConvergenceError if the
/// iteration has not fully deflated after 100*n steps.
std::vector<Complex> eigenvalues(const Matrix& a);

/// Solve A x = b by LU with partial pivoting. Throws SingularSystemError
/// (carrying the 1-based pivot index) when a pivot magnitude falls below
/// 1e-14 * ||A||_F.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Inverse of an upper triangular matrix by back substitution. Every
/// diagonal entry must satisfy |r_ii| > 1e-14 * max_j |r_jj|; otherwise
/// SingularTriangularError names the offending 1-based index.
Matrix upper_tri_inverse(const Matrix& r);

/// Determinant via LU with partial pivoting, sign-tracked. Singular
/// input yields 0 within roundoff; no error is raised.
Complex determinant(const Matrix& a);

} // namespace ritzforge::linalg

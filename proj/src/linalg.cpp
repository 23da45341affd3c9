#include "ritzforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dense_kernels.hpp"
#include "ritzforge/errors.hpp"

namespace ritzforge::linalg {

QrFactors qr_hessenberg(const Matrix& h) {
    if (!h.is_square() || h.rows() == 0) {
        throw StructuralError("qr_hessenberg requires a square matrix, n >= 1");
    }
    if (!h.is_upper_hessenberg(0.0)) {
        throw StructuralError("qr_hessenberg requires an upper Hessenberg matrix");
    }
    detail::DenseMat<double> hw = detail::widen<double>(h);
    detail::DenseMat<double> q, r;
    detail::qr_hessenberg_kernel(hw, q, r);
    return {detail::narrow(q), detail::narrow(r)};
}

std::vector<Complex> eigenvalues(const Matrix& a) {
    if (!a.is_square() || a.rows() == 0) {
        throw StructuralError("eigenvalues requires a square matrix, n >= 1");
    }
    // The iteration runs in quadruple precision: the matrices this
    // project feeds in (triangular-inverse products, highly non-normal
    // constructions) can carry norms around 1e8, where double's
    // backward error alone would cost six digits in O(1) eigenvalues.
    const auto eigs = detail::eigenvalues_kernel<__float128>(
        detail::widen<__float128>(a), __float128(1e-14), 100 * a.rows());
    std::vector<Complex> out;
    out.reserve(eigs.size());
    for (const auto& l : eigs) out.push_back(detail::narrow_scalar(l));
    return out;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    if (!a.is_square() || a.rows() == 0) {
        throw StructuralError("solve_linear requires a square matrix, n >= 1");
    }
    if (a.rows() != b.size()) {
        throw StructuralError("solve_linear: right-hand side length does not match");
    }
    const double threshold = 1e-14 * a.frobenius_norm();
    detail::LuT<double> f = detail::lu_factor_kernel(detail::widen<double>(a));
    if (f.exact_zero || f.min_pivot < threshold) {
        throw SingularSystemError("singular system: pivot " +
                                      std::to_string(f.min_pivot_index) +
                                      " below threshold",
                                  f.min_pivot_index);
    }
    std::vector<detail::Cx<double>> rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = detail::widen_scalar<double>(b[i]);
    const auto x = detail::lu_solve_kernel(f, rhs);
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = detail::narrow_scalar(x[i]);
    return out;
}

Matrix upper_tri_inverse(const Matrix& r) {
    if (!r.is_square() || r.rows() == 0) {
        throw StructuralError("upper_tri_inverse requires a square matrix, n >= 1");
    }
    if (!r.is_upper_triangular(0.0)) {
        throw StructuralError("upper_tri_inverse requires an upper triangular matrix");
    }
    const std::size_t n = r.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(r(i, i)) <= 1e-14 * max_diag) {
            throw SingularTriangularError(
                "upper_tri_inverse: near-zero diagonal at index " + std::to_string(i + 1),
                i + 1);
        }
    }
    return detail::narrow(detail::upper_tri_inverse_kernel(detail::widen<double>(r)));
}

Complex determinant(const Matrix& a) {
    if (!a.is_square() || a.rows() == 0) {
        throw StructuralError("determinant requires a square matrix, n >= 1");
    }
    return detail::narrow_scalar(detail::determinant_kernel(detail::widen<double>(a)));
}

} // namespace ritzforge::linalg

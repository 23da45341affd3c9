#include "ritzforge/q_builder.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ritzforge/errors.hpp"

namespace ritzforge {

namespace {

void check_unimodular_list(const std::vector<Complex>& signs, std::size_t expected,
                           const char* what) {
    if (signs.size() != expected) {
        throw ArgumentError(std::string(what) + " list must have length " +
                            std::to_string(expected));
    }
    for (const Complex& s : signs) {
        if (std::abs(std::abs(s) - 1.0) > kUnitTol) {
            throw ArgumentError(std::string(what) + " entries must be unimodular");
        }
    }
}

} // namespace

UnitaryHessenberg UnitaryHessenberg::from_matrix(Matrix q) {
    if (!q.is_square() || q.rows() == 0) {
        throw StructuralError("unitary Hessenberg matrix must be square, n >= 1");
    }
    const std::size_t n = q.rows();
    if (!q.is_upper_hessenberg(0.0)) {
        throw StructuralError("matrix is not upper Hessenberg");
    }
    if (!q.is_unitary(1e-12 * static_cast<double>(n))) {
        throw StructuralError("matrix is not unitary to tolerance");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(q(i + 1, i)) <= 1e-13) {
            throw StructuralError("matrix is not irreducible: subdiagonal entry " +
                                  std::to_string(i + 1) + " vanishes");
        }
    }
    return UnitaryHessenberg(std::move(q));
}

Vector first_row_from_residuals(const ResidualSchedule& s,
                                const std::optional<std::vector<Complex>>& signs) {
    const auto violations = schedule_violations(s);
    if (!violations.empty()) {
        throw AdmissibilityError("invalid residual schedule: " + violations.front().message);
    }
    const std::size_t n = s.size();
    if (signs) check_unimodular_list(*signs, n, "first-row sign");

    Vector row(n);
    for (std::size_t l = 1; l <= n; ++l) {
        const double prev = s.norms[l - 1];
        const double next = (l < n) ? s.norms[l] : 0.0;
        const double d = prev * prev - next * next;
        double mag;
        if (l < n && std::abs(d) <= kPlateauTolSquared) {
            mag = 0.0; // plateau step: exact zero
        } else {
            mag = std::sqrt(d);
        }
        row[l - 1] = signs ? (*signs)[l - 1] * mag : Complex(mag, 0.0);
    }
    return row;
}

UnitaryHessenberg complete_q(const Vector& first_row,
                             const std::optional<std::vector<Complex>>& rhos) {
    const std::size_t n = first_row.size();
    if (n == 0) throw ArgumentError("first row must be nonempty");
    if (rhos) check_unimodular_list(*rhos, n - 1, "subdiagonal sign");

    // Tail sums T_i = sum_{l>i} |q_{1l}|^2; computed backwards so a
    // plateau zero leaves consecutive tails bitwise equal.
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + std::norm(first_row[i]);
    if (std::abs(tail[0] - 1.0) > kUnitTol) {
        throw ArgumentError("first row must have unit Euclidean norm");
    }
    for (std::size_t i = 1; i + 1 <= n; ++i) {
        if (tail[i] <= 1e-14) {
            throw PrematureTerminationError(
                "residual would vanish at step " + std::to_string(i) +
                    ", before the final step",
                i);
        }
    }

    Matrix q(n, n);
    for (std::size_t j = 0; j < n; ++j) q(0, j) = first_row[j];
    for (std::size_t i = 1; i <= n - 1; ++i) {
        const Complex rho = rhos ? (*rhos)[i - 1] : Complex(1.0, 0.0);
        const double before = std::sqrt(tail[i - 1]);
        const double after = std::sqrt(tail[i]);
        q(i, i - 1) = rho * (after / before);
        const double denom = before * after;
        const Complex factor = -rho * std::conj(first_row[i - 1]) / denom;
        for (std::size_t j = i; j < n; ++j) q(i, j) = factor * first_row[j];
    }
    return UnitaryHessenberg::from_matrix(std::move(q));
}

ResidualSchedule residuals_from_q(const UnitaryHessenberg& q) {
    const std::size_t n = q.size();
    const Matrix& m = q.matrix();
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t l = n; l-- > 0;) tail[l] = tail[l + 1] + std::norm(m(0, l));
    ResidualSchedule s;
    s.norms.resize(n);
    for (std::size_t k = 0; k < n; ++k) s.norms[k] = std::sqrt(tail[k]);
    return s;
}

std::set<std::size_t> stagnation_steps(const UnitaryHessenberg& q) {
    const std::size_t n = q.size();
    const Matrix& m = q.matrix();
    std::set<std::size_t> by_row_one;
    std::set<std::size_t> by_column;
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        if (std::abs(m(0, k - 1)) <= kRowOneZeroTol) by_row_one.insert(k);
        bool concentrated = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue; // row k+1, 0-based i == k
            if (std::abs(m(i, k - 1)) > kRowOneZeroTol) {
                concentrated = false;
                break;
            }
        }
        if (concentrated) by_column.insert(k);
    }
    if (by_row_one != by_column) {
        std::ostringstream os;
        os << "stagnation characterizations disagree: row-one test found "
           << by_row_one.size() << " step(s), column test " << by_column.size();
        throw InternalConsistencyError(os.str());
    }
    return by_row_one;
}

} // namespace ritzforge

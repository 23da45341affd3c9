#include "ritzforge/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dense_kernels.hpp"
#include "ritzforge/errors.hpp"
#include "ritzforge/linalg.hpp"
#include "ritzforge/q_builder.hpp"

namespace ritzforge {

namespace {

// Harmonic Ritz extraction from an extended-precision factorization.
// Stagnant steps make trailing rows of M = Q_k^* R_k^{-1} vanish
// identically (the corresponding columns of Q are supported below row
// k). Each such row holds one structurally exact zero eigenvalue;
// peeling them off before the dense iteration keeps the infinite values
// from being smeared by the defective-cluster sensitivity of the
// eigensolver.
RitzTuple harmonic_ritz_kernel(const detail::DenseMat<__float128>& q,
                               const detail::DenseMat<__float128>& r, std::size_t k) {
    using Q = __float128;
    using QC = detail::Cx<Q>;
    const std::size_t n = q.rows;

    const detail::DenseMat<Q> rk = detail::principal(r, k);
    for (std::size_t i = 0; i < k; ++i) {
        if (abs(rk(i, i)) == Q(0)) {
            throw InternalConsistencyError(
                "triangular factor unexpectedly singular at index " + std::to_string(i + 1));
        }
    }
    const detail::DenseMat<Q> m = detail::matmul(detail::adjoint(detail::principal(q, k)),
                                                 detail::upper_tri_inverse_kernel(rk));
    const Q scale = detail::frobenius(m);

    std::size_t core = k;
    std::vector<QC> mus;
    while (core >= 1 && core < n && abs(q(0, core - 1)) <= Q(kRowOneZeroTol)) {
        for (std::size_t j = 0; j + 1 < core; ++j) {
            if (abs(m(core - 1, j)) > Q(1e-10) * scale) {
                throw InternalConsistencyError(
                    "stagnant step lacks the implied row structure at step " +
                    std::to_string(core));
            }
        }
        mus.push_back(m(core - 1, core - 1));
        --core;
    }
    if (core >= 1) {
        const auto core_mus = detail::eigenvalues_kernel<Q>(detail::principal(m, core),
                                                            Q(1e-14), 100 * core);
        mus.insert(mus.end(), core_mus.begin(), core_mus.end());
    }

    // Classification scale: the Frobenius norm of M, capped by the
    // spectral magnitude. On highly non-normal instances ||M||_F can
    // exceed the largest eigenvalue by many orders, and an uncapped
    // 1e-8 ||M||_F cutoff would swallow genuine finite values.
    Q max_mu = Q(0);
    for (const QC& mu : mus) max_mu = std::max(max_mu, abs(mu));
    const Q spectral_scale = detail::rsqrt_impl(Q(k)) * max_mu;
    const Q class_scale = std::min(scale, spectral_scale);

    RitzTuple out;
    out.reserve(k);
    for (const QC& mu : mus) {
        if (abs(mu) <= Q(1e-8) * class_scale) {
            out.push_back(HarmonicRitzValue::infinity());
        } else {
            out.push_back(HarmonicRitzValue::finite(detail::narrow_scalar(QC(Q(1), Q(0)) / mu)));
        }
    }
    canonical_sort(out);
    return out;
}

// Residual norms from progressive Givens rotations applied to the
// least-squares problem min || e_1 - H_ext y ||, H_ext the Hessenberg
// matrix extended by an implicit zero row.
std::vector<double> history_from_hessenberg(const Matrix& h) {
    const std::size_t m = h.rows();
    std::vector<Complex> cs(m), sn(m);
    std::vector<Complex> g(m + 1, Complex(0.0, 0.0));
    g[0] = Complex(1.0, 0.0);

    std::vector<double> history(m + 1);
    history[0] = 1.0;
    Vector col(m + 1);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t len = std::min(j + 2, m);
        for (std::size_t i = 0; i < len; ++i) col[i] = h(i, j);
        if (j + 1 >= m) col[j + 1] = Complex(0.0, 0.0);
        for (std::size_t i = 0; i < j; ++i) {
            const Complex x = col[i];
            const Complex y = col[i + 1];
            col[i] = std::conj(cs[i]) * x + std::conj(sn[i]) * y;
            col[i + 1] = -sn[i] * x + cs[i] * y;
        }
        const Complex a = col[j];
        const Complex b = col[j + 1];
        const double t = std::sqrt(std::norm(a) + std::norm(b));
        if (t == 0.0) {
            cs[j] = Complex(1.0, 0.0);
            sn[j] = Complex(0.0, 0.0);
        } else {
            cs[j] = a / t;
            sn[j] = b / t;
        }
        const Complex gj = g[j];
        g[j] = std::conj(cs[j]) * gj;
        g[j + 1] = -sn[j] * gj;
        history[j + 1] = std::abs(g[j + 1]);
    }
    return history;
}

double rel_err(Complex measured, Complex prescribed) {
    return std::abs(measured - prescribed) / std::abs(prescribed);
}

} // namespace

ArnoldiDecomposition arnoldi(const Matrix& a, const Vector& b) {
    if (!a.is_square() || a.rows() == 0) {
        throw StructuralError("arnoldi requires a square matrix, n >= 1");
    }
    const std::size_t n = a.rows();
    if (b.size() != n) throw StructuralError("arnoldi: starting vector length mismatch");
    if (std::abs(norm2(b) - 1.0) > 1e-12) {
        throw ArgumentError("arnoldi requires a unit-norm starting vector");
    }

    std::vector<Vector> basis;
    basis.push_back(b);
    Matrix h(n, n);
    std::size_t m = n;
    std::optional<std::size_t> breakdown;

    for (std::size_t j = 0; j < n; ++j) {
        Vector w = a * basis[j];
        // Breakdown is judged against the vector actually being
        // orthogonalized: that is the scale of the Gram-Schmidt roundoff.
        // A cutoff tied to ||A||_F would falsely truncate matrices whose
        // columns differ in norm by many orders.
        const double breakdown_tol = 1e-12 * norm2(w);
        for (std::size_t i = 0; i <= j; ++i) {
            const Complex hij = dot(basis[i], w);
            h(i, j) += hij;
            for (std::size_t l = 0; l < n; ++l) w[l] -= hij * basis[i][l];
        }
        // One unconditional reorthogonalization pass.
        for (std::size_t i = 0; i <= j; ++i) {
            const Complex c = dot(basis[i], w);
            h(i, j) += c;
            for (std::size_t l = 0; l < n; ++l) w[l] -= c * basis[i][l];
        }
        if (j + 1 == n) break;
        const double wn = norm2(w);
        if (wn <= breakdown_tol) {
            m = j + 1;
            breakdown = m;
            break;
        }
        h(j + 1, j) = Complex(wn, 0.0);
        for (Complex& z : w) z /= wn;
        basis.push_back(std::move(w));
    }

    Matrix v(n, m);
    for (std::size_t j = 0; j < m; ++j) v.set_column(j, basis[j]);
    Matrix hm(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) hm(i, j) = h(i, j);
    return {std::move(v), std::move(hm), breakdown};
}

std::vector<double> gmres_history(const Matrix& a, const Vector& b) {
    const ArnoldiDecomposition dec = arnoldi(a, b);
    return history_from_hessenberg(dec.h);
}

RitzTuple harmonic_ritz(const Matrix& h, std::size_t k) {
    if (!h.is_square() || h.rows() == 0) {
        throw StructuralError("harmonic_ritz requires a square matrix, n >= 1");
    }
    if (!h.is_irreducible_upper_hessenberg(0.0)) {
        throw StructuralError("harmonic_ritz requires an irreducible upper Hessenberg matrix");
    }
    if (k < 1 || k > h.rows()) throw ArgumentError("harmonic_ritz: step out of range");
    // Factor in extended precision straight from H: the small diagonal
    // entries of R carry absolute factorization error, which double
    // cannot afford when ||H|| is large.
    detail::DenseMat<__float128> q, r;
    detail::qr_hessenberg_kernel(detail::widen<__float128>(h), q, r);
    return harmonic_ritz_kernel(q, r, k);
}

RitzTuple harmonic_ritz_from_qr(const Matrix& q, const Matrix& r, std::size_t k) {
    const std::size_t n = q.rows();
    if (k < 1 || k > n) throw ArgumentError("harmonic_ritz: step out of range");
    return harmonic_ritz_kernel(detail::widen<__float128>(q), detail::widen<__float128>(r), k);
}

AnalysisReport analyze(const Matrix& a, const Vector& b) {
    const ArnoldiDecomposition dec = arnoldi(a, b);
    const std::size_t m = dec.h.rows();

    AnalysisReport rep;
    rep.residual_history = history_from_hessenberg(dec.h);

    const linalg::QrFactors f = linalg::qr_hessenberg(dec.h);
    for (std::size_t k = 1; k <= m; ++k) {
        rep.harmonic_ritz_per_step.push_back(harmonic_ritz(dec.h, k));
    }
    rep.stagnation_steps = stagnation_steps(UnitaryHessenberg::from_matrix(f.q));

    // Cross-check: the history must match the tail-sum formula on the
    // first row of Q.
    std::vector<double> tail(m + 1, 0.0);
    for (std::size_t l = m; l-- > 0;) tail[l] = tail[l + 1] + std::norm(f.q(0, l));
    for (std::size_t k = 0; k <= m; ++k) {
        if (std::abs(rep.residual_history[k] - std::sqrt(tail[k])) > 1e-10) {
            throw InternalConsistencyError(
                "residual history disagrees with the first-row formula at step " +
                std::to_string(k));
        }
    }
    return rep;
}

VerifyReport verify(const Prescription& p, const Matrix& h, double tol_res, double tol_ritz) {
    const std::size_t n = p.size();
    if (!h.is_square() || h.rows() != n) {
        throw ArgumentError("verify: matrix size does not match the prescription");
    }

    Vector e1(n, Complex(0.0, 0.0));
    e1[0] = Complex(1.0, 0.0);
    const AnalysisReport measured = analyze(h, e1);

    VerifyReport rep;
    const std::size_t m = measured.residual_history.size() - 1;
    auto note_failure = [&rep](std::size_t step) {
        if (!rep.first_failing_step || step < *rep.first_failing_step) {
            rep.first_failing_step = step;
        }
    };

    if (m != n) {
        // Early breakdown: the pair cannot reproduce an n-step history.
        rep.pass = false;
        rep.residual_max_abs_err = std::abs(p.schedule.norms[std::min(m, n - 1)]);
        note_failure(m + 1);
        return rep;
    }

    bool all_inf_match = true;
    for (std::size_t k = 0; k <= n; ++k) {
        const double prescribed = (k < n) ? p.schedule.norms[k] : 0.0;
        const double err = std::abs(measured.residual_history[k] - prescribed);
        rep.residual_max_abs_err = std::max(rep.residual_max_abs_err, err);
        if (err > tol_res) note_failure(k);
    }
    for (std::size_t k = 1; k <= n; ++k) {
        StepDetail detail{k, std::abs(measured.residual_history[k] -
                                      ((k < n) ? p.schedule.norms[k] : 0.0)),
                          0.0, true};

        RitzTuple got = measured.harmonic_ritz_per_step[k - 1];
        RitzTuple want = p.ritz.steps[k - 1];
        canonical_sort(got);
        canonical_sort(want);
        std::vector<Complex> got_f, want_f;
        std::size_t got_inf = 0, want_inf = 0;
        for (const auto& v : got) {
            if (v.is_infinite()) {
                ++got_inf;
            } else {
                got_f.push_back(v.value());
            }
        }
        for (const auto& v : want) {
            if (v.is_infinite()) {
                ++want_inf;
            } else {
                want_f.push_back(v.value());
            }
        }

        if (got_inf != want_inf) {
            detail.inf_count_match = false;
            all_inf_match = false;
            note_failure(k);
        }
        const std::size_t pairs = std::min(got_f.size(), want_f.size());
        if (pairs > 0) {
            std::vector<double> errs(pairs);
            for (std::size_t i = 0; i < pairs; ++i) errs[i] = rel_err(got_f[i], want_f[i]);
            // One repair sweep: undo adjacent order flips caused by
            // near-equal magnitudes.
            for (std::size_t i = 0; i + 1 < pairs; ++i) {
                const double cur = std::max(errs[i], errs[i + 1]);
                const double swapped = std::max(rel_err(got_f[i + 1], want_f[i]),
                                                rel_err(got_f[i], want_f[i + 1]));
                if (swapped < cur) {
                    std::swap(got_f[i], got_f[i + 1]);
                    errs[i] = rel_err(got_f[i], want_f[i]);
                    errs[i + 1] = rel_err(got_f[i + 1], want_f[i + 1]);
                }
            }
            for (std::size_t i = 0; i < pairs; ++i) {
                detail.ritz_rel_err = std::max(detail.ritz_rel_err, errs[i]);
            }
        }
        rep.ritz_max_rel_err = std::max(rep.ritz_max_rel_err, detail.ritz_rel_err);
        if (detail.ritz_rel_err > tol_ritz) note_failure(k);
        rep.per_step.push_back(detail);
    }

    rep.pass = all_inf_match && rep.residual_max_abs_err <= tol_res &&
               rep.ritz_max_rel_err <= tol_ritz;
    if (rep.pass) rep.first_failing_step.reset();
    return rep;
}

} // namespace ritzforge

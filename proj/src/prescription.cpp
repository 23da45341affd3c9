#include "ritzforge/prescription.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ritzforge/errors.hpp"

namespace ritzforge {

namespace {

std::string complex_str(Complex z) {
    std::ostringstream os;
    os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
    return os.str();
}

// Gap classification between consecutive squared norms.
enum class Gap { Plateau, Decrease, Invalid };

Gap classify_gap(double prev, double next) {
    const double d = prev * prev - next * next;
    if (std::abs(d) <= kPlateauTolSquared) return Gap::Plateau;
    if (d >= kDecreaseMinSquared) return Gap::Decrease;
    return Gap::Invalid;
}

bool finite_match(Complex a, Complex b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Greedy multiset match of `got` against `want`; true when every value
// of `want` is consumed by a distinct nearest value of `got` within tol.
bool tuples_match(const std::vector<Complex>& got, const std::vector<Complex>& want,
                  double tol) {
    if (got.size() != want.size()) return false;
    std::vector<bool> used(got.size(), false);
    for (const Complex& w : want) {
        double best = -1.0;
        std::size_t best_i = got.size();
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(got[i] - w);
            if (best_i == got.size() || d < best) {
                best = d;
                best_i = i;
            }
        }
        if (best_i == got.size() || !finite_match(got[best_i], w, tol)) return false;
        used[best_i] = true;
    }
    return true;
}

// Uniform double in [0, 1) that depends only on the engine sequence.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::set<std::size_t> ResidualSchedule::plateau_steps() const {
    std::set<std::size_t> steps;
    for (std::size_t k = 1; k < norms.size(); ++k) {
        if (classify_gap(norms[k - 1], norms[k]) == Gap::Plateau) steps.insert(k);
    }
    return steps;
}

void canonical_sort(RitzTuple& tuple) {
    std::stable_sort(tuple.begin(), tuple.end(),
                     [](const HarmonicRitzValue& a, const HarmonicRitzValue& b) {
                         if (a.is_infinite() || b.is_infinite())
                             return b.is_infinite() && !a.is_infinite();
                         const double ma = std::abs(a.value());
                         const double mb = std::abs(b.value());
                         if (ma != mb) return ma < mb;
                         return std::arg(a.value()) < std::arg(b.value());
                     });
}

std::vector<Violation> schedule_violations(const ResidualSchedule& s) {
    std::vector<Violation> out;
    const std::size_t n = s.size();
    if (n == 0) {
        out.push_back({0, "schedule is empty"});
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.norms[i])) {
            out.push_back({i, "residual norm is not finite"});
            return out;
        }
    }
    if (std::abs(s.norms[0] - 1.0) > kUnitTol) {
        out.push_back({0, "leading residual norm must equal 1"});
    }
    if (!(s.norms[n - 1] > 0.0)) {
        out.push_back({n - 1, "final residual norm must be positive"});
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (s.norms[k] < 0.0) {
            out.push_back({k, "residual norm is negative"});
            continue;
        }
        switch (classify_gap(s.norms[k - 1], s.norms[k])) {
        case Gap::Plateau:
        case Gap::Decrease:
            break;
        case Gap::Invalid: {
            const double d = s.norms[k - 1] * s.norms[k - 1] - s.norms[k] * s.norms[k];
            std::ostringstream os;
            if (d < 0.0) {
                os << "residual norms increase at step " << k;
            } else {
                os << "squared-norm gap at step " << k
                   << " falls between the plateau and decrease cutoffs";
            }
            out.push_back({k, os.str()});
            break;
        }
        }
    }
    return out;
}

AdmissibilityReport validate(const Prescription& p) {
    AdmissibilityReport rep;
    const std::size_t n = p.size();

    auto sched = schedule_violations(p.schedule);
    rep.violations.insert(rep.violations.end(), sched.begin(), sched.end());

    // Structural arity of the Ritz set.
    if (p.ritz.steps.size() != n) {
        rep.violations.push_back(
            {0, "harmonic Ritz set must provide one tuple per step"});
        return rep;
    }
    for (std::size_t k = 1; k <= n; ++k) {
        if (p.ritz.steps[k - 1].size() != k) {
            std::ostringstream os;
            os << "tuple at step " << k << " must have exactly " << k << " entries";
            rep.violations.push_back({k, os.str()});
        }
    }

    // Sign overrides, when present, must be unimodular and well-sized.
    if (p.first_row_signs) {
        if (p.first_row_signs->size() != n) {
            rep.violations.push_back({0, "first-row sign list must have length n"});
        }
        for (std::size_t i = 0; i < p.first_row_signs->size(); ++i) {
            if (std::abs(std::abs((*p.first_row_signs)[i]) - 1.0) > kUnitTol) {
                rep.violations.push_back({i + 1, "first-row sign is not unimodular"});
            }
        }
    }
    if (p.rho_signs) {
        if (p.rho_signs->size() + 1 != n) {
            rep.violations.push_back({0, "subdiagonal sign list must have length n-1"});
        }
        for (std::size_t i = 0; i < p.rho_signs->size(); ++i) {
            if (std::abs(std::abs((*p.rho_signs)[i]) - 1.0) > kUnitTol) {
                rep.violations.push_back({i + 1, "subdiagonal sign is not unimodular"});
            }
        }
    }

    // Per-value checks: finite values nonzero and pairwise distinct.
    for (std::size_t k = 1; k <= n && k <= p.ritz.steps.size(); ++k) {
        const RitzTuple& t = p.ritz.steps[k - 1];
        std::vector<Complex> finite;
        for (const HarmonicRitzValue& v : t) {
            if (v.is_finite()) {
                if (std::abs(v.value()) == 0.0) {
                    rep.violations.push_back({k, "harmonic Ritz value 0 is not allowed"});
                }
                if (!std::isfinite(v.value().real()) || !std::isfinite(v.value().imag())) {
                    rep.violations.push_back({k, "harmonic Ritz value is not finite"});
                }
                finite.push_back(v.value());
            }
        }
        for (std::size_t i = 0; i < finite.size(); ++i) {
            for (std::size_t j = i + 1; j < finite.size(); ++j) {
                const double sep = std::abs(finite[i] - finite[j]);
                if (sep < 1e-10 * std::max(std::abs(finite[i]), std::abs(finite[j]))) {
                    rep.violations.push_back(
                        {k, "coinciding harmonic Ritz values " + complex_str(finite[i]) +
                                " within one step"});
                }
            }
        }
    }

    // Plateau pattern: inside a run starting after step `base`, the tuple
    // at offset i repeats the base's finite values plus i infinities.
    const std::set<std::size_t> plateaus = p.schedule.plateau_steps();
    for (std::size_t k = 1; k <= n && k <= p.ritz.steps.size(); ++k) {
        const RitzTuple& t = p.ritz.steps[k - 1];
        if (t.size() != k) continue; // arity already reported
        std::size_t inf_count = 0;
        std::vector<Complex> finite;
        for (const HarmonicRitzValue& v : t) {
            if (v.is_infinite()) {
                ++inf_count;
            } else {
                finite.push_back(v.value());
            }
        }
        if (!plateaus.count(k)) {
            if (inf_count > 0) {
                std::ostringstream os;
                os << "infinite value at non-plateau step " << k;
                rep.violations.push_back({k, os.str()});
            }
            continue;
        }
        std::size_t base = k - 1;
        while (base > 0 && plateaus.count(base)) --base;
        const std::size_t offset = k - base;
        if (inf_count != offset) {
            std::ostringstream os;
            os << "plateau step " << k << " must carry exactly " << offset
               << " infinite value(s), found " << inf_count;
            rep.violations.push_back({k, os.str()});
            continue;
        }
        std::vector<Complex> want;
        if (base >= 1 && base <= p.ritz.steps.size()) {
            for (const HarmonicRitzValue& v : p.ritz.steps[base - 1]) {
                if (v.is_finite()) want.push_back(v.value());
            }
        }
        if (!tuples_match(finite, want, 1e-12)) {
            std::ostringstream os;
            os << "finite values at plateau step " << k
               << " must repeat the tuple of step " << base;
            rep.violations.push_back({k, os.str()});
        }
    }
    return rep;
}

Prescription random_prescription(std::size_t n, const std::set<std::size_t>& plateau_steps,
                                 std::uint64_t seed) {
    if (n < 1) throw ArgumentError("random_prescription requires n >= 1");
    for (std::size_t s : plateau_steps) {
        if (s < 1 || s >= n) {
            throw ArgumentError("plateau step " + std::to_string(s) +
                                " outside the admissible range 1..n-1");
        }
    }

    std::mt19937_64 rng(seed);
    Prescription p;
    p.schedule.norms.resize(n);
    p.schedule.norms[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        if (plateau_steps.count(k)) {
            p.schedule.norms[k] = p.schedule.norms[k - 1];
        } else {
            // Drop between 5% and 60% of the remaining squared budget.
            const double u = 0.05 + 0.55 * uniform01(rng);
            const double prev2 = p.schedule.norms[k - 1] * p.schedule.norms[k - 1];
            p.schedule.norms[k] = std::sqrt(prev2 * (1.0 - u));
        }
    }

    p.ritz.steps.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        RitzTuple& t = p.ritz.steps[k - 1];
        if (plateau_steps.count(k)) {
            std::size_t base = k - 1;
            while (base > 0 && plateau_steps.count(base)) --base;
            if (base >= 1) {
                for (const HarmonicRitzValue& v : p.ritz.steps[base - 1]) {
                    if (v.is_finite()) t.push_back(v);
                }
            }
            for (std::size_t i = 0; i < k - base; ++i) t.push_back(HarmonicRitzValue::infinity());
        } else {
            std::vector<Complex> drawn;
            while (drawn.size() < k) {
                const double mag = 0.5 + 4.5 * uniform01(rng);
                const double ang = 2.0 * M_PI * uniform01(rng);
                const Complex z = std::polar(mag, ang);
                bool separated = true;
                for (const Complex& w : drawn) {
                    if (std::abs(z - w) < 1e-3) {
                        separated = false;
                        break;
                    }
                }
                if (separated) drawn.push_back(z);
            }
            for (const Complex& z : drawn) t.push_back(HarmonicRitzValue::finite(z));
        }
        canonical_sort(t);
    }

    AdmissibilityReport rep = validate(p);
    if (!rep.ok()) {
        throw InternalConsistencyError("random_prescription produced an inadmissible set: " +
                                       rep.violations.front().message);
    }
    return p;
}

} // namespace ritzforge

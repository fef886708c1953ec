#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "helmrec/forward.hpp"
#include "helmrec/linalg.hpp"

namespace helmrec {

/// Bounds returned above this value are reported as capped; the cap exceeds
/// any physical contrast.
inline constexpr double kBetaCap = 1e6;

/// Closed-form monotonicity bound: the largest alpha >= 0 such that
/// Vd - alpha S keeps at most d eigenvalues below -delta.
/// Shift by alpha0 to reach a positive definite pivot matrix, Cholesky it,
/// and read the bound off the (d+1)-th congruence eigenvalue. Requires S
/// numerically positive definite.
inline double beta_closed_form(const SymMatrix& Vd, const SymMatrix& S, double delta, int d,
                               double* alpha0_out = nullptr) {
    const int n = Vd.n();
    if (S.n() != n) throw DimensionMismatch("beta dimension mismatch");
    if (!(d >= 0 && d < n)) throw ConfigError("d must lie in [0, N)");
    if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");

    const auto s_eigs = eigh_values(S);
    const double s_min = s_eigs.back();
    if (s_min <= 1e-14 * S.frobenius()) throw SemidefiniteSensitivity(s_min);

    SymMatrix shifted = Vd;
    for (int i = 0; i < n; ++i) shifted.add(i, i, delta);
    const double lam_n = eigh_values(shifted).back();
    const double alpha0 = std::max(0.0, (1.0 - lam_n) / s_min);
    if (alpha0_out) *alpha0_out = alpha0;

    SymMatrix pivot = shifted;
    pivot.add_scaled(S, alpha0);
    const LowerTriangular L = cholesky(pivot);
    const auto w = congruence_eigs(L, S);
    const double lam = w[static_cast<std::size_t>(d)];
    if (lam <= 1e-14) return kBetaCap;
    return std::max(0.0, 1.0 / lam - alpha0);
}

/// Independent verification path: bisection on the feasibility predicate
/// count_negative(Vd - alpha S + delta I) <= d. Valid because Vd - alpha S is
/// Loewner-decreasing in alpha, so the feasible alphas form an interval.
inline double beta_bisection(const SymMatrix& Vd, const SymMatrix& S, double delta, int d,
                             double tol = 1e-8) {
    const int n = Vd.n();
    if (S.n() != n) throw DimensionMismatch("beta dimension mismatch");
    if (!(d >= 0 && d < n)) throw ConfigError("d must lie in [0, N)");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");

    auto feasible = [&](double alpha) {
        SymMatrix r = Vd;
        r.add_scaled(S, -alpha);
        for (int i = 0; i < n; ++i) r.add(i, i, delta);
        return count_negative(r, 0.0) <= d;
    };

    if (!feasible(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (lo >= kBetaCap) return kBetaCap;
    }
    while (hi - lo > tol * (1.0 + lo)) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// Per-pixel monotonicity bounds plus the diagnostics that went into them.
struct BetaMap {
    std::vector<double> beta;
    std::vector<double> alpha0;         // shift used by the closed form (0 on fallback)
    std::vector<std::uint8_t> used_fallback;
    std::vector<std::uint8_t> capped;
    double delta = 0.0;                 // absolute
    int d = 0;

    int fallback_count() const {
        int c = 0;
        for (auto v : used_fallback) c += v;
        return c;
    }
};

/// Applies the closed form per pixel; numerically semidefinite sensitivity
/// blocks (single-triangle Gram matrices usually are) fall back to bisection
/// with a small diagonal ridge on S.
inline BetaMap compute_beta_map(const SymMatrix& Vd, const SensitivityStack& stack, double delta,
                                int d) {
    if (stack.N != Vd.n()) throw DimensionMismatch("stack/measurement dimension mismatch");
    BetaMap map;
    map.delta = delta;
    map.d = d;
    map.beta.resize(static_cast<std::size_t>(stack.M));
    map.alpha0.assign(static_cast<std::size_t>(stack.M), 0.0);
    map.used_fallback.assign(static_cast<std::size_t>(stack.M), 0);
    map.capped.assign(static_cast<std::size_t>(stack.M), 0);

    for (int m = 0; m < stack.M; ++m) {
        const SymMatrix& S = stack.blocks[static_cast<std::size_t>(m)];
        double beta;
        try {
            beta = beta_closed_form(Vd, S, delta, d, &map.alpha0[static_cast<std::size_t>(m)]);
        } catch (const SemidefiniteSensitivity&) {
            SymMatrix ridged = S;
            const double ridge = 1e-12 * S.frobenius();
            for (int i = 0; i < S.n(); ++i) ridged.add(i, i, ridge);
            beta = beta_bisection(Vd, ridged, delta, d);
            map.used_fallback[static_cast<std::size_t>(m)] = 1;
        }
        if (beta >= kBetaCap) {
            beta = kBetaCap;
            map.capped[static_cast<std::size_t>(m)] = 1;
        }
        map.beta[static_cast<std::size_t>(m)] = beta;
    }
    return map;
}

/// Per-pixel count of eigenvalues of Vd - alpha S_m + delta I below zero;
/// the contour data behind the monotonicity-test plots.
inline std::vector<int> negative_count_field(const SymMatrix& Vd, const SensitivityStack& stack,
                                             double alpha, double delta) {
    if (stack.N != Vd.n()) throw DimensionMismatch("stack/measurement dimension mismatch");
    std::vector<int> counts(static_cast<std::size_t>(stack.M));
    for (int m = 0; m < stack.M; ++m) {
        SymMatrix r = Vd;
        r.add_scaled(stack.blocks[static_cast<std::size_t>(m)], -alpha);
        for (int i = 0; i < r.n(); ++i) r.add(i, i, delta);
        counts[static_cast<std::size_t>(m)] = count_negative(r, 0.0);
    }
    return counts;
}

}  // namespace helmrec

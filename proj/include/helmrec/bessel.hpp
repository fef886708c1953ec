#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "helmrec/errors.hpp"

namespace helmrec {

namespace detail {

// Power series around x = 0. Safe from cancellation for x <= 8 (the peak
// term stays below ~1e2 there).
inline double bessel_j_series(int n, double x) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= n; ++i) term *= half / static_cast<double>(i);
    if (term == 0.0) return 0.0;
    const double m = -half * half;
    double sum = term;
    for (int k = 1; k <= 80; ++k) {
        term *= m / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// Miller's backward recurrence, normalized with J_0 + 2*sum_{m even} J_m = 1.
// Fills orders 0..nmax. Requires x > 0.
inline void bessel_j_miller(int nmax, double x, std::vector<double>& out) {
    const int start = 2 * (((nmax > static_cast<int>(x) ? nmax : static_cast<int>(x)) + 66) / 2);
    double above = 0.0;   // unnormalized J_{m+1}
    double cur = 1.0;     // unnormalized J_m, m = start
    double norm = 0.0;
    for (int m = start; m >= 0; --m) {
        if (m <= nmax) out[m] = cur;
        if (m == 0)
            norm += cur;
        else if (m % 2 == 0)
            norm += 2.0 * cur;
        if (m > 0) {
            double below = (2.0 * m / x) * cur - above;
            above = cur;
            cur = below;
            if (std::abs(cur) > 1e250) {
                const double s = 1e-250;
                cur *= s;
                above *= s;
                norm *= s;
                for (int i = m; i <= nmax; ++i) out[i] *= s;
            }
        }
    }
    for (int i = 0; i <= nmax; ++i) out[i] /= norm;
}

inline void check_bessel_domain(int n, double x) {
    if (n < 0 || n > 64) throw ConfigError("bessel order out of range [0,64]");
    if (!(x >= 0.0) || x > 100.0) throw ConfigError("bessel argument out of range [0,100]");
}

}  // namespace detail

/// J_0(x) .. J_nmax(x) in one sweep. Shared recurrence, cheaper than nmax+1
/// independent evaluations.
inline std::vector<double> bessel_j_all(int nmax, double x) {
    detail::check_bessel_domain(nmax, x);
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (x <= 8.0) {
        for (int n = 0; n <= nmax; ++n) out[n] = detail::bessel_j_series(n, x);
    } else {
        detail::bessel_j_miller(nmax, x, out);
    }
    return out;
}

/// Bessel function of the first kind, integer order.
inline double bessel_j(int n, double x) {
    detail::check_bessel_domain(n, x);
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x <= 8.0) return detail::bessel_j_series(n, x);
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    detail::bessel_j_miller(n, x, out);
    return out[n];
}

/// dJ_n/dx via the recurrence (J_{n-1} - J_{n+1})/2, with J'_0 = -J_1.
inline double bessel_j_prime(int n, double x) {
    detail::check_bessel_domain(n, x);
    if (n == 0) return -bessel_j(1, x);
    if (x == 0.0) return n == 1 ? 0.5 : 0.0;
    std::vector<double> out(static_cast<std::size_t>(n) + 2, 0.0);
    if (x <= 8.0) {
        out[n - 1] = detail::bessel_j_series(n - 1, x);
        out[n + 1] = detail::bessel_j_series(n + 1, x);
    } else {
        detail::bessel_j_miller(n + 1, x, out);
    }
    return 0.5 * (out[n - 1] - out[n + 1]);
}

}  // namespace helmrec

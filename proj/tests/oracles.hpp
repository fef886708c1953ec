// Independent reference computations used by the test suite. These stay
// deliberately separate from the library implementations they check.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "helmrec/geometry.hpp"
#include "helmrec/linalg.hpp"

namespace oracles {

// Bessel J_n by long-double power series; trustworthy to ~1e-13 absolute for
// x <= 15, any n <= 66.
inline double bessel_series(int n, double x) {
    const long double half = 0.5L * static_cast<long double>(x);
    long double term = 1.0L;
    for (int i = 1; i <= n; ++i) term *= half / i;
    const long double m = -half * half;
    long double sum = term;
    for (int k = 1; k <= 120; ++k) {
        term *= m / (static_cast<long double>(k) * (n + k));
        sum += term;
        if (std::abs(static_cast<double>(term)) < 1e-22 * (1.0 + std::abs(static_cast<double>(sum))))
            break;
    }
    return static_cast<double>(sum);
}

inline double bessel_series_prime(int n, double x) {
    if (n == 0) return -bessel_series(1, x);
    return 0.5 * (bessel_series(n - 1, x) - bessel_series(n + 1, x));
}

// Bisection root finder on [a, b] (requires a sign change).
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-13) {
    double fa = f(a);
    for (int i = 0; i < 200 && b - a > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fa < 0) == (fm < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Positive zeros of J'_n below x_max, by sign scanning of the series.
inline std::vector<double> jprime_zeros_below(int n, double x_max) {
    std::vector<double> zeros;
    const double step = 0.01;
    double prev_x = n == 0 ? 0.5 : 1e-3;  // skip the trivial x=0 critical point
    double prev = bessel_series_prime(n, prev_x);
    for (double x = prev_x + step; x <= x_max + step; x += step) {
        const double cur = bessel_series_prime(n, x);
        if ((prev < 0) != (cur < 0)) {
            const double z = bisect([n](double t) { return bessel_series_prime(n, t); },
                                    x - step, x);
            if (z <= x_max) zeros.push_back(z);
        }
        prev = cur;
    }
    return zeros;
}

// Number of Neumann eigenvalues of the unit-disk Laplacian strictly below
// `limit`: mu = 0 plus squared positive zeros of J'_n (double multiplicity
// for n >= 1). `reject_margin`: returns -1 when some eigenvalue sits within
// that relative margin of the threshold (mesh-sensitive regime).
inline int disk_neumann_count_below(double limit, double reject_margin = 0.0) {
    int count = 1;  // mu = 0
    const double xmax = std::sqrt(limit) + 1.0;
    for (int n = 0; n <= 40; ++n) {
        const auto zeros = jprime_zeros_below(n, xmax);
        bool any = false;
        for (double z : zeros) {
            const double mu = z * z;
            if (reject_margin > 0.0 && std::abs(mu - limit) < reject_margin * limit) return -1;
            if (mu < limit) {
                count += n == 0 ? 1 : 2;
                any = true;
            }
        }
        if (!any && n > 0 && (zeros.empty() || zeros.front() * zeros.front() >= limit)) {
            // first critical point of J_n grows with n; once past the limit, stop
            if (n * n >= limit) break;
        }
    }
    return count;
}

// Deterministic random symmetric / SPD matrices for property tests.
inline helmrec::SymMatrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (auto& v : a) v = u(rng);
    return helmrec::SymMatrix(n, a);
}

inline helmrec::SymMatrix random_spd(int n, std::mt19937_64& rng, double ridge = 0.1) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    for (auto& v : b) v = u(rng);
    helmrec::SymMatrix s(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k)
                dot += b[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(j) * n + k];
            s.set(i, j, dot + (i == j ? ridge : 0.0));
        }
    return s;
}

// Generalized eigenvalues of S x = mu (L L^T) x via the explicit symmetric
// square root of B = L L^T: eig(B^{-1/2} S B^{-1/2}).
inline std::vector<double> generalized_eigs(const helmrec::SymMatrix& S,
                                            const helmrec::LowerTriangular& L) {
    const int n = S.n();
    helmrec::SymMatrix B(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k <= std::min(i, j); ++k) s += L(i, k) * L(j, k);
            B.set(i, j, s);
        }
    const helmrec::EighResult eb = helmrec::eigh(B);
    // B^{-1/2}
    std::vector<double> r(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += eb.vec(i, k) * eb.vec(j, k) / std::sqrt(eb.eigenvalues[static_cast<std::size_t>(k)]);
            r[static_cast<std::size_t>(i) * n + j] = s;
        }
    helmrec::SymMatrix w(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    s += r[static_cast<std::size_t>(i) * n + k] * S(k, l) *
                         r[static_cast<std::size_t>(l) * n + j];
            w.set(i, j, s);
        }
    return helmrec::eigh_values(w);
}

// P1 interpolation of a nodal field at a point; naive triangle scan.
inline double interpolate_p1(const helmrec::TriMesh& mesh, const std::vector<double>& nodal,
                             double x, double y) {
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const auto& a = mesh.nodes[static_cast<std::size_t>(tri[0])];
        const auto& b = mesh.nodes[static_cast<std::size_t>(tri[1])];
        const auto& c = mesh.nodes[static_cast<std::size_t>(tri[2])];
        const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        const double l1 = ((x - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y - a[1])) / det;
        const double l2 = ((b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])) / det;
        const double l0 = 1.0 - l1 - l2;
        const double tol = -1e-10;
        if (l0 >= tol && l1 >= tol && l2 >= tol)
            return l0 * nodal[static_cast<std::size_t>(tri[0])] +
                   l1 * nodal[static_cast<std::size_t>(tri[1])] +
                   l2 * nodal[static_cast<std::size_t>(tri[2])];
    }
    return 0.0;  // outside the polygonal disk (thin boundary sliver)
}

// Discrete L2 norm of a nodal field over the mesh (mass-weighted).
inline double l2_norm(const helmrec::TriMesh& mesh, const std::vector<double>& nodal) {
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = mesh.signed_area(t);
        const double va = nodal[static_cast<std::size_t>(tri[0])];
        const double vb = nodal[static_cast<std::size_t>(tri[1])];
        const double vc = nodal[static_cast<std::size_t>(tri[2])];
        s += area / 6.0 * (va * va + vb * vb + vc * vc + va * vb + vb * vc + vc * va);
    }
    return std::sqrt(s);
}

// Composite Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace oracles

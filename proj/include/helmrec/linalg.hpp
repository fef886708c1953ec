#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "helmrec/errors.hpp"

namespace helmrec {

/// Dense real symmetric matrix. Construction symmetrizes via (A + A^T)/2 so
/// the stored entries satisfy A_ij == A_ji exactly.
class SymMatrix {
public:
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 1) throw ConfigError("SymMatrix dimension must be >= 1");
    }

    SymMatrix(int n, const std::vector<double>& entries) : SymMatrix(n) {
        if (entries.size() != a_.size())
            throw DimensionMismatch("SymMatrix entry count mismatch");
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                a_[idx(i, j)] = 0.5 * (entries[idx(i, j)] + entries[idx(j, i)]);
    }

    static SymMatrix diagonal(const std::vector<double>& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m.a_[m.idx(i, i)] = d[static_cast<std::size_t>(i)];
        return m;
    }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m.a_[m.idx(i, i)] = 1.0;
        return m;
    }

    int n() const { return n_; }
    double operator()(int i, int j) const { return a_[idx(i, j)]; }

    /// Symmetric write: assigns both (i,j) and (j,i).
    void set(int i, int j, double v) {
        a_[idx(i, j)] = v;
        a_[idx(j, i)] = v;
    }

    void add(int i, int j, double v) {
        a_[idx(i, j)] += v;
        if (i != j) a_[idx(j, i)] += v;
    }

    /// this += c * B
    void add_scaled(const SymMatrix& b, double c) {
        if (b.n_ != n_) throw DimensionMismatch("add_scaled dimension mismatch");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += c * b.a_[k];
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += a_[idx(i, i)];
        return t;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    /// Frobenius inner product <this, B>.
    double dot(const SymMatrix& b) const {
        if (b.n_ != n_) throw DimensionMismatch("dot dimension mismatch");
        double s = 0.0;
        for (std::size_t k = 0; k < a_.size(); ++k) s += a_[k] * b.a_[k];
        return s;
    }

    bool finite() const {
        for (double v : a_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    const std::vector<double>& raw() const { return a_; }
    std::vector<double>& raw() { return a_; }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * n_ + j;
    }
    int n_;
    std::vector<double> a_;
};

/// Lower-triangular factor, row-major dense storage (upper part zero).
struct LowerTriangular {
    int n = 0;
    std::vector<double> a;  // row-major n x n

    double operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * n + j];
    }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct EighResult {
    std::vector<double> eigenvalues;  // descending
    std::vector<double> vectors;      // row-major; column j is eigenvector j
    int n = 0;

    double vec(int i, int j) const {
        return vectors[static_cast<std::size_t>(i) * n + j];
    }
};

namespace detail {

// Cyclic Jacobi on a full square working copy. Rotates until the
// off-diagonal Frobenius mass drops below 1e-13 * ||A||_F.
inline void jacobi_sweeps(int n, std::vector<double>& a, std::vector<double>* q) {
    auto at = [n](std::vector<double>& m, int i, int j) -> double& {
        return m[static_cast<std::size_t>(i) * n + j];
    };
    double fro = 0.0;
    for (double v : a) fro += v * v;
    fro = std::sqrt(fro);
    if (fro == 0.0) return;
    const double target = 1e-13 * fro;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * at(a, i, j) * at(a, i, j);
        if (std::sqrt(off) <= target) return;

        for (int p = 0; p < n - 1; ++p) {
            for (int qq = p + 1; qq < n; ++qq) {
                const double apq = at(a, p, qq);
                if (apq == 0.0) continue;
                const double app = at(a, p, p);
                const double aqq = at(a, qq, qq);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                at(a, p, p) = app - t * apq;
                at(a, qq, qq) = aqq + t * apq;
                at(a, p, qq) = 0.0;
                at(a, qq, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == qq) continue;
                    const double aip = at(a, i, p);
                    const double aiq = at(a, i, qq);
                    at(a, i, p) = c * aip - s * aiq;
                    at(a, p, i) = at(a, i, p);
                    at(a, i, qq) = s * aip + c * aiq;
                    at(a, qq, i) = at(a, i, qq);
                }
                if (q) {
                    for (int i = 0; i < n; ++i) {
                        double& qip = (*q)[static_cast<std::size_t>(i) * n + p];
                        double& qiq = (*q)[static_cast<std::size_t>(i) * n + qq];
                        const double vp = qip, vq = qiq;
                        qip = c * vp - s * vq;
                        qiq = s * vp + c * vq;
                    }
                }
            }
        }
    }
}

inline std::vector<int> descending_order(const std::vector<double>& vals) {
    std::vector<int> idx(vals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&vals](int a, int b) {
        return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)];
    });
    return idx;
}

inline void check_eigh_input(const SymMatrix& m) {
    if (m.n() > 512) throw ConfigError("dense eigensolver capped at n = 512");
    if (!m.finite()) throw ConfigError("eigh input has NaN/Inf entries");
}

// Householder reduction to tridiagonal form (no transform accumulation).
// d gets the diagonal, e the subdiagonal (size n-1).
inline void tridiagonalize(int n, std::vector<double> a, std::vector<double>& d,
                           std::vector<double>& e) {
    auto at = [n, &a](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * n + j];
    };
    d.assign(static_cast<std::size_t>(n), 0.0);
    e.assign(static_cast<std::size_t>(n > 0 ? n - 1 : 0), 0.0);
    std::vector<double> v(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));

    for (int k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < n; ++i) scale += std::abs(at(i, k));
        if (scale == 0.0) {
            e[static_cast<std::size_t>(k)] = at(k + 1, k);
            continue;
        }
        double norm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            const double x = at(i, k) / scale;
            v[static_cast<std::size_t>(i)] = x;
            norm2 += x * x;
        }
        const double x0 = v[static_cast<std::size_t>(k + 1)];
        const double alpha = (x0 >= 0.0 ? -1.0 : 1.0) * std::sqrt(norm2);
        e[static_cast<std::size_t>(k)] = scale * alpha;
        v[static_cast<std::size_t>(k + 1)] = x0 - alpha;
        double vtv = 0.0;
        for (int i = k + 1; i < n; ++i)
            vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        if (vtv == 0.0) continue;
        const double beta = 2.0 / vtv;

        // p = beta * A * v on the trailing block
        for (int i = k + 1; i < n; ++i) {
            double s = 0.0;
            for (int j = k + 1; j < n; ++j) s += at(i, j) * v[static_cast<std::size_t>(j)];
            p[static_cast<std::size_t>(i)] = beta * s;
        }
        double vtp = 0.0;
        for (int i = k + 1; i < n; ++i)
            vtp += v[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
        const double kappa = 0.5 * beta * vtp;
        for (int i = k + 1; i < n; ++i)
            p[static_cast<std::size_t>(i)] -= kappa * v[static_cast<std::size_t>(i)];
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j <= i; ++j) {
                const double upd = v[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)] +
                                   p[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
                at(i, j) -= upd;
                if (i != j) at(j, i) -= upd;
            }
    }
    if (n >= 2) e[static_cast<std::size_t>(n - 2)] = at(n - 1, n - 2);
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
}

// Sturm count: eigenvalues of the tridiagonal (d, e) strictly below t.
inline int sturm_count_below(const std::vector<double>& d, const std::vector<double>& e,
                             double t) {
    const double pivmin = std::numeric_limits<double>::min() /
                          std::numeric_limits<double>::epsilon();
    int count = 0;
    double piv = d[0] - t;
    if (piv < 0.0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        double denom = piv;
        if (std::abs(denom) < pivmin) denom = denom < 0.0 ? -pivmin : pivmin;
        piv = (d[i] - t) - e[i - 1] * e[i - 1] / denom;
        if (piv < 0.0) ++count;
    }
    return count;
}

}  // namespace detail

/// Full symmetric eigendecomposition, eigenvalues descending, orthonormal
/// eigenvectors as columns.
inline EighResult eigh(const SymMatrix& m) {
    detail::check_eigh_input(m);
    const int n = m.n();
    std::vector<double> a = m.raw();
    std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i) * n + i] = 1.0;
    detail::jacobi_sweeps(n, a, &q);

    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * n + i];
    const std::vector<int> order = detail::descending_order(vals);

    EighResult r;
    r.n = n;
    r.eigenvalues.resize(static_cast<std::size_t>(n));
    r.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        r.eigenvalues[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        for (int i = 0; i < n; ++i)
            r.vectors[static_cast<std::size_t>(i) * n + j] =
                q[static_cast<std::size_t>(i) * n + order[static_cast<std::size_t>(j)]];
    }
    return r;
}

/// Eigenvalues only (descending); cheaper than eigh.
inline std::vector<double> eigh_values(const SymMatrix& m) {
    detail::check_eigh_input(m);
    const int n = m.n();
    std::vector<double> a = m.raw();
    detail::jacobi_sweeps(n, a, nullptr);
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * n + i];
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    return vals;
}

/// Sum of eigenvalues above the roundoff threshold 1e-12 * ||A||_F.
inline double sum_positive_eigs(const SymMatrix& m) {
    const double tau = 1e-12 * m.frobenius();
    double s = 0.0;
    for (double v : eigh_values(m))
        if (v > tau) s += v;
    return s;
}

/// Number of eigenvalues strictly below `threshold`. Computed by Householder
/// tridiagonalization plus a Sturm pivot count; no eigenvectors needed.
inline int count_negative(const SymMatrix& m, double threshold) {
    if (!m.finite()) throw ConfigError("count_negative input has NaN/Inf entries");
    const int n = m.n();
    if (n == 1) return m(0, 0) < threshold ? 1 : 0;
    std::vector<double> d, e;
    detail::tridiagonalize(n, m.raw(), d, e);
    return detail::sturm_count_below(d, e, threshold);
}

/// Cholesky factorization A = L L^T for positive definite A.
inline LowerTriangular cholesky(const SymMatrix& m) {
    const int n = m.n();
    const double tol = 1e-14 * m.frobenius();
    LowerTriangular L;
    L.n = n;
    L.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > tol)) throw NotPositiveDefinite(j, d);
        const double ljj = std::sqrt(d);
        L.at(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L.at(i, j) = s / ljj;
        }
    }
    return L;
}

/// Eigenvalues of L^{-1} S L^{-T} in descending order, via two triangular
/// solves and a symmetrized eigh.
inline std::vector<double> congruence_eigs(const LowerTriangular& L, const SymMatrix& S) {
    const int n = L.n;
    if (S.n() != n) throw DimensionMismatch("congruence_eigs dimension mismatch");
    for (int i = 0; i < n; ++i)
        if (std::abs(L(i, i)) <= 1e-14) throw SingularFactor(i, L(i, i));

    // Y = L^{-1} S  (forward substitution, all columns)
    std::vector<double> y(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = S(i, c);
            for (int k = 0; k < i; ++k) s -= L(i, k) * y[static_cast<std::size_t>(k) * n + c];
            y[static_cast<std::size_t>(i) * n + c] = s / L(i, i);
        }
    }
    // W^T = L^{-1} Y^T, then symmetrize W.
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = y[static_cast<std::size_t>(c) * n + i];  // (Y^T)(i, c)
            for (int k = 0; k < i; ++k) s -= L(i, k) * w[static_cast<std::size_t>(k) * n + c];
            w[static_cast<std::size_t>(i) * n + c] = s / L(i, i);
        }
    }
    SymMatrix W(n, w);  // constructor symmetrizes
    return eigh_values(W);
}

}  // namespace helmrec

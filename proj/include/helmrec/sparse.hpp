#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "helmrec/errors.hpp"

namespace helmrec {

/// Symmetric sparse matrix, lower triangle stored, assembled entry-by-entry.
class SparseSym {
public:
    explicit SparseSym(int n) : n_(n), rows_(static_cast<std::size_t>(n)) {
        if (n < 1) throw ConfigError("SparseSym dimension must be >= 1");
    }

    int n() const { return n_; }

    /// Symmetric add; only the lower triangle is stored.
    void add(int i, int j, double v) {
        if (i < j) std::swap(i, j);
        rows_[static_cast<std::size_t>(i)][j] += v;
    }

    double get(int i, int j) const {
        if (i < j) std::swap(i, j);
        const auto& r = rows_[static_cast<std::size_t>(i)];
        auto it = r.find(j);
        return it == r.end() ? 0.0 : it->second;
    }

    const std::map<int, double>& row_lower(int i) const {
        return rows_[static_cast<std::size_t>(i)];
    }

    /// y = A x with full symmetry.
    std::vector<double> matvec(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("matvec size");
        std::vector<double> y(x.size(), 0.0);
        for (int i = 0; i < n_; ++i) {
            for (const auto& [j, v] : rows_[static_cast<std::size_t>(i)]) {
                y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(j)];
                if (j != i) y[static_cast<std::size_t>(j)] += v * x[static_cast<std::size_t>(i)];
            }
        }
        return y;
    }

    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (const auto& [j, v] : rows_[static_cast<std::size_t>(i)])
                s += (j == i ? 1.0 : 2.0) * v * v;
        return std::sqrt(s);
    }

    /// C = ca * A + cb * B (patterns merged).
    static SparseSym combine(const SparseSym& a, double ca, const SparseSym& b, double cb) {
        if (a.n_ != b.n_) throw DimensionMismatch("combine dimension mismatch");
        SparseSym c(a.n_);
        for (int i = 0; i < a.n_; ++i) {
            auto& row = c.rows_[static_cast<std::size_t>(i)];
            for (const auto& [j, v] : a.rows_[static_cast<std::size_t>(i)]) row[j] += ca * v;
            for (const auto& [j, v] : b.rows_[static_cast<std::size_t>(i)]) row[j] += cb * v;
        }
        return c;
    }

private:
    int n_;
    std::vector<std::map<int, double>> rows_;
};

/// Profile (skyline) LDL^T factorization of a symmetric indefinite matrix.
/// No interchanges: a pivot falling below the caller's threshold aborts the
/// factorization, which for Helmholtz systems signals a near-resonant
/// wavenumber. Pivot signs give the matrix inertia (Sylvester).
class SkylineLDLT {
public:
    static SkylineLDLT factor(const SparseSym& a, double pivot_abs_tol) {
        SkylineLDLT f;
        const int n = a.n();
        f.n_ = n;
        f.first_.resize(static_cast<std::size_t>(n));
        f.off_.resize(static_cast<std::size_t>(n) + 1, 0);
        for (int i = 0; i < n; ++i) {
            int fi = i;
            const auto& row = a.row_lower(i);
            if (!row.empty()) fi = std::min(fi, row.begin()->first);
            f.first_[static_cast<std::size_t>(i)] = fi;
            f.off_[static_cast<std::size_t>(i) + 1] =
                f.off_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(i - fi);
        }
        f.data_.assign(f.off_[static_cast<std::size_t>(n)], 0.0);
        f.diag_.assign(static_cast<std::size_t>(n), 0.0);
        f.neg_ = 0;

        for (int i = 0; i < n; ++i) {
            const int fi = f.first_[static_cast<std::size_t>(i)];
            double* ri = f.data_.data() + f.off_[static_cast<std::size_t>(i)] - fi;
            for (const auto& [j, v] : a.row_lower(i)) {
                if (j < i) ri[j] = v;
            }
            // ri[j] holds c_ij = L_ij * D_j after this loop
            for (int j = fi; j < i; ++j) {
                const int fj = f.first_[static_cast<std::size_t>(j)];
                const double* rj = f.data_.data() + f.off_[static_cast<std::size_t>(j)] - fj;
                const int lo = fi > fj ? fi : fj;
                double s = ri[j];
                for (int k = lo; k < j; ++k) s -= ri[k] * rj[k];
                ri[j] = s;
            }
            double d = a.get(i, i);
            for (int k = fi; k < i; ++k) {
                const double lik = ri[k] / f.diag_[static_cast<std::size_t>(k)];
                d -= lik * ri[k];
                ri[k] = lik;
            }
            if (std::abs(d) < pivot_abs_tol)
                throw NearResonance("LDLT pivot " + std::to_string(i) + " magnitude " +
                                    std::to_string(d) + " below tolerance");
            if (d < 0.0) ++f.neg_;
            f.diag_[static_cast<std::size_t>(i)] = d;
        }
        return f;
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        if (static_cast<int>(b.size()) != n_) throw DimensionMismatch("solve rhs size");
        std::vector<double> x = b;
        for (int i = 0; i < n_; ++i) {
            const int fi = first_[static_cast<std::size_t>(i)];
            const double* ri = data_.data() + off_[static_cast<std::size_t>(i)] - fi;
            double s = x[static_cast<std::size_t>(i)];
            for (int k = fi; k < i; ++k) s -= ri[k] * x[static_cast<std::size_t>(k)];
            x[static_cast<std::size_t>(i)] = s;
        }
        for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] /= diag_[static_cast<std::size_t>(i)];
        for (int j = n_ - 1; j >= 0; --j) {
            const int fj = first_[static_cast<std::size_t>(j)];
            const double* rj = data_.data() + off_[static_cast<std::size_t>(j)] - fj;
            const double xj = x[static_cast<std::size_t>(j)];
            for (int k = fj; k < j; ++k) x[static_cast<std::size_t>(k)] -= rj[k] * xj;
        }
        return x;
    }

    /// Negative pivot count == number of negative eigenvalues.
    int negative_pivots() const { return neg_; }
    int n() const { return n_; }

private:
    int n_ = 0;
    int neg_ = 0;
    std::vector<int> first_;
    std::vector<std::size_t> off_;
    std::vector<double> data_;
    std::vector<double> diag_;
};

}  // namespace helmrec

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "helmrec/bessel.hpp"
#include "helmrec/errors.hpp"
#include "helmrec/geometry.hpp"
#include "helmrec/sparse.hpp"

namespace helmrec {

/// Piecewise-constant refractive index, one value per mesh triangle.
struct CoefficientField {
    std::vector<double> q;

    explicit CoefficientField(std::vector<double> values) : q(std::move(values)) {
        for (double v : q)
            if (!(v >= 1e-6 && v <= 1e3))
                throw ConfigError("coefficient value outside [1e-6, 1e3]");
    }

    static CoefficientField constant(const TriMesh& mesh, double value) {
        return CoefficientField(std::vector<double>(mesh.triangles.size(), value));
    }

    /// q0 background with q_inside on triangles whose centroid lies in D.
    static CoefficientField from_geometry(const TriMesh& mesh, const ScattererGeometry& geom,
                                          double q0, double q_inside) {
        std::vector<double> v(mesh.triangles.size(), q0);
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            const auto c = mesh.centroid(t);
            if (geom.contains(c[0], c[1])) v[static_cast<std::size_t>(t)] = q_inside;
        }
        return CoefficientField(std::move(v));
    }
};

/// The closed-form background solutions on the unit disk and the boundary
/// flux basis they belong to. Mode index j maps to the orthonormal set
/// 1/sqrt(2*pi), sin(m phi)/sqrt(pi), cos(m phi)/sqrt(pi), m = 1..N1,
/// ordered (const, sin 1, cos 1, sin 2, cos 2, ...). N = 2*N1 + 1.
class BackgroundBasis {
public:
    BackgroundBasis(double k, double q0, int n1) : k_(k), q0_(q0), n1_(n1) {
        if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
        if (!(q0 > 0.0)) throw ConfigError("background index must be positive");
        if (n1 < 1) throw ConfigError("basis order must be >= 1");
        x_ = k * std::sqrt(q0);
        const auto j = bessel_j_all(n1 + 1, x_);
        deriv_.resize(static_cast<std::size_t>(n1) + 1);
        for (int m = 0; m <= n1; ++m) {
            const double d = m == 0 ? -j[1]
                                    : 0.5 * (j[static_cast<std::size_t>(m - 1)] -
                                             j[static_cast<std::size_t>(m + 1)]);
            // relative cancellation guard: absolute smallness of J'_m is normal
            // for high orders, resonance shows as cancellation against the
            // recurrence terms
            const double scale = std::abs(j[static_cast<std::size_t>(m)]) +
                                 std::abs(j[static_cast<std::size_t>(m) + 1]) +
                                 (m > 0 ? (m / x_) * std::abs(j[static_cast<std::size_t>(m)]) : 0.0);
            if (std::abs(d) <= 1e-8 * scale) throw BackgroundResonance(m, d);
            deriv_[static_cast<std::size_t>(m)] = d;
        }
    }

    int n1() const { return n1_; }
    int size() const { return 2 * n1_ + 1; }
    double k() const { return k_; }
    double q0() const { return q0_; }

    /// Boundary flux basis function g_j at polar angle theta.
    double g(int j, double theta) const {
        if (j == 0) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
        const int m = (j + 1) / 2;
        const double a = 1.0 / std::sqrt(std::numbers::pi);
        return j % 2 == 1 ? a * std::sin(m * theta) : a * std::cos(m * theta);
    }

    /// Radial factor of mode j (normalization included).
    double radial(int j, double r) const {
        const int m = j == 0 ? 0 : (j + 1) / 2;
        const double num = bessel_j(m, x_ * r);
        const double den = deriv_[static_cast<std::size_t>(m)];
        if (j == 0) return num / (std::sqrt(2.0 * std::numbers::pi) * x_ * den);
        return num / (k_ * std::sqrt(q0_ * std::numbers::pi) * den);
    }

    /// All N background field values at a point of the closed unit disk.
    void eval_point(double x, double y, std::vector<double>& out) const {
        const double r = std::hypot(x, y);
        const double theta = std::atan2(y, x);
        out.resize(static_cast<std::size_t>(size()));
        const auto jv = bessel_j_all(n1_, x_ * r);
        out[0] = jv[0] / (std::sqrt(2.0 * std::numbers::pi) * x_ * deriv_[0]);
        for (int m = 1; m <= n1_; ++m) {
            const double rad = jv[static_cast<std::size_t>(m)] /
                               (k_ * std::sqrt(q0_ * std::numbers::pi) *
                                deriv_[static_cast<std::size_t>(m)]);
            out[static_cast<std::size_t>(2 * m - 1)] = rad * std::sin(m * theta);
            out[static_cast<std::size_t>(2 * m)] = rad * std::cos(m * theta);
        }
    }

private:
    double k_, q0_, x_;
    int n1_;
    std::vector<double> deriv_;  // J'_m(k sqrt(q0))
};

/// Stiffness matrix K_ij = integral of grad(phi_i) . grad(phi_j).
inline SparseSym assemble_stiffness(const TriMesh& mesh) {
    SparseSym K(static_cast<int>(mesh.nodes.size()));
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = mesh.signed_area(t);
        if (area < 1e-14) throw DegenerateTriangle(t, area);
        const auto& p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
        const auto& p1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
        const auto& p2 = mesh.nodes[static_cast<std::size_t>(tri[2])];
        const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j)
                K.add(tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
    }
    return K;
}

/// Weighted mass matrix M_ij = integral of q phi_i phi_j with the exact
/// P1 element matrix area/12 * [[2,1,1],[1,2,1],[1,1,2]].
inline SparseSym assemble_mass(const TriMesh& mesh, const CoefficientField& field) {
    if (field.q.size() != mesh.triangles.size())
        throw DimensionMismatch("coefficient field size != triangle count");
    SparseSym M(static_cast<int>(mesh.nodes.size()));
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = mesh.signed_area(t);
        if (area < 1e-14) throw DegenerateTriangle(t, area);
        const double s = field.q[static_cast<std::size_t>(t)] * area / 12.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j)
                M.add(tri[i], tri[j], s * (i == j ? 2.0 : 1.0));
    }
    return M;
}

namespace detail {

inline std::array<std::array<double, 2>, 3> midside_points(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const auto& a = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const auto& b = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const auto& c = mesh.nodes[static_cast<std::size_t>(tri[2])];
    return {{{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])},
             {0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])},
             {0.5 * (c[0] + a[0]), 0.5 * (c[1] + a[1])}}};
}

// P1 hat values at the three midside points: phi_v is 1/2 on the two
// midsides adjacent to vertex v and 0 on the opposite one.
inline double hat_at_midside(int vertex, int midside) {
    // midside 0 = (v0,v1), 1 = (v1,v2), 2 = (v2,v0)
    return (midside == vertex || (midside + 1) % 3 == vertex) ? 0.5 : 0.0;
}

}  // namespace detail

/// Factored Helmholtz Neumann system K - k^2 M_q with the load machinery for
/// the scattered-difference formulation. The factorization is shared across
/// all basis modes.
class HelmholtzSolver {
public:
    HelmholtzSolver(const TriMesh& mesh, const CoefficientField& q_system, double k,
                    double pivot_rel_tol = 1e-10)
        : fac_(make_factor(mesh, q_system, k, pivot_rel_tol, norm_K_)) {}

    std::vector<double> solve(const std::vector<double>& load) const { return fac_.solve(load); }
    double stiffness_norm() const { return norm_K_; }

private:
    static SkylineLDLT make_factor(const TriMesh& mesh, const CoefficientField& q, double k,
                                   double rel_tol, double& norm_out) {
        const SparseSym K = assemble_stiffness(mesh);
        const SparseSym M = assemble_mass(mesh, q);
        norm_out = K.frobenius();
        return SkylineLDLT::factor(SparseSym::combine(K, 1.0, M, -k * k), rel_tol * norm_out);
    }

    double norm_K_ = 0.0;
    SkylineLDLT fac_;
};

/// Volume load f_i = integral of k^2 (q - q0) u0_j phi_i over the triangles
/// where q differs from q0, by the quadratic-exact 3-point midside rule.
inline std::vector<double> difference_load(const TriMesh& mesh, const CoefficientField& q,
                                           double q0, const BackgroundBasis& basis, int j) {
    std::vector<double> f(mesh.nodes.size(), 0.0);
    std::vector<double> u;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const double dq = q.q[static_cast<std::size_t>(t)] - q0;
        if (dq == 0.0) continue;
        const double area = mesh.signed_area(t);
        const auto pts = detail::midside_points(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double w = basis.k() * basis.k() * dq * area / 3.0;
        for (int p = 0; p < 3; ++p) {
            u.resize(static_cast<std::size_t>(basis.size()));
            basis.eval_point(pts[static_cast<std::size_t>(p)][0],
                             pts[static_cast<std::size_t>(p)][1], u);
            const double uj = u[static_cast<std::size_t>(j)];
            for (int v = 0; v < 3; ++v)
                f[static_cast<std::size_t>(tri[v])] +=
                    w * uj * detail::hat_at_midside(v, p);
        }
    }
    return f;
}

/// All N loads in one pass over the source triangles; shares the basis
/// evaluations across modes.
inline std::vector<std::vector<double>> difference_loads_all(const TriMesh& mesh,
                                                             const CoefficientField& q,
                                                             double q0,
                                                             const BackgroundBasis& basis) {
    const int n = basis.size();
    std::vector<std::vector<double>> f(static_cast<std::size_t>(n),
                                       std::vector<double>(mesh.nodes.size(), 0.0));
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const double dq = q.q[static_cast<std::size_t>(t)] - q0;
        if (dq == 0.0) continue;
        const double area = mesh.signed_area(t);
        const auto pts = detail::midside_points(mesh, t);
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double w = basis.k() * basis.k() * dq * area / 3.0;
        for (int p = 0; p < 3; ++p) {
            basis.eval_point(pts[static_cast<std::size_t>(p)][0],
                             pts[static_cast<std::size_t>(p)][1], u);
            for (int j = 0; j < n; ++j) {
                const double wu = w * u[static_cast<std::size_t>(j)];
                for (int v = 0; v < 3; ++v)
                    f[static_cast<std::size_t>(j)][static_cast<std::size_t>(tri[v])] +=
                        wu * detail::hat_at_midside(v, p);
            }
        }
    }
    return f;
}

/// Scattered difference field v^j = u_q^j - u_q0^j: solves
/// (K - k^2 M_q) v = f with homogeneous Neumann boundary (natural).
inline std::vector<double> solve_difference_field(const TriMesh& mesh, const CoefficientField& q,
                                                  double q0, double k, int n1, int j) {
    const BackgroundBasis basis(k, q0, n1);
    const HelmholtzSolver solver(mesh, q, k);
    return solver.solve(difference_load(mesh, q, q0, basis, j));
}

/// Born-linearized variant: same load, system matrix frozen at q0. Output is
/// exactly linear in (q - q0); used for derivative checks.
inline std::vector<double> solve_born_field(const TriMesh& mesh, const CoefficientField& q,
                                            double q0, double k, int n1, int j) {
    const BackgroundBasis basis(k, q0, n1);
    const HelmholtzSolver solver(mesh, CoefficientField::constant(mesh, q0), k);
    return solver.solve(difference_load(mesh, q, q0, basis, j));
}

/// Boundary integral of g_i times a P1 boundary trace, 2-point Gauss per
/// boundary edge, g_i evaluated exactly at the quadrature angles.
inline double boundary_pairing(const TriMesh& mesh, const std::vector<double>& trace,
                               const BackgroundBasis& basis, int i) {
    if (trace.size() != mesh.nodes.size())
        throw DimensionMismatch("trace size != node count");
    const double t1 = 0.5 - 0.5 / std::sqrt(3.0);
    const double t2 = 0.5 + 0.5 / std::sqrt(3.0);
    double sum = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        const auto& a = mesh.nodes[static_cast<std::size_t>(e[0])];
        const auto& b = mesh.nodes[static_cast<std::size_t>(e[1])];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        const double va = trace[static_cast<std::size_t>(e[0])];
        const double vb = trace[static_cast<std::size_t>(e[1])];
        for (double t : {t1, t2}) {
            const double px = a[0] + t * (b[0] - a[0]);
            const double py = a[1] + t * (b[1] - a[1]);
            sum += 0.5 * len * basis.g(i, std::atan2(py, px)) * ((1.0 - t) * va + t * vb);
        }
    }
    return sum;
}

/// Boundary load vector f_i = integral of g_j phi_i ds over the boundary
/// edges; used for solving the background problem by FEM in verification.
inline std::vector<double> boundary_load(const TriMesh& mesh, const BackgroundBasis& basis,
                                         int j) {
    const double t1 = 0.5 - 0.5 / std::sqrt(3.0);
    const double t2 = 0.5 + 0.5 / std::sqrt(3.0);
    std::vector<double> f(mesh.nodes.size(), 0.0);
    for (const auto& e : mesh.boundary_edges) {
        const auto& a = mesh.nodes[static_cast<std::size_t>(e[0])];
        const auto& b = mesh.nodes[static_cast<std::size_t>(e[1])];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        for (double t : {t1, t2}) {
            const double px = a[0] + t * (b[0] - a[0]);
            const double py = a[1] + t * (b[1] - a[1]);
            const double g = basis.g(j, std::atan2(py, px));
            f[static_cast<std::size_t>(e[0])] += 0.5 * len * g * (1.0 - t);
            f[static_cast<std::size_t>(e[1])] += 0.5 * len * g * t;
        }
    }
    return f;
}

/// Negative-eigenvalue count of K - k^2 M_qtilde where qtilde equals qmax on
/// the concentric disk of radius r0 and q0 outside. Read off the LDLT pivots.
inline int dtilde_count(double k, double q0, double qmax, double r0, const TriMesh& mesh) {
    if (!(r0 > 0.0 && r0 <= 1.0)) throw ConfigError("r0 must lie in (0, 1]");
    if (!(k > 0.0) || !(qmax > 0.0)) throw ConfigError("k and qmax must be positive");
    std::vector<double> q(mesh.triangles.size(), q0);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto c = mesh.centroid(t);
        if (std::hypot(c[0], c[1]) < r0) q[static_cast<std::size_t>(t)] = qmax;
    }
    const CoefficientField field(std::move(q));
    const SparseSym K = assemble_stiffness(mesh);
    const SparseSym M = assemble_mass(mesh, field);
    const auto fac = SkylineLDLT::factor(SparseSym::combine(K, 1.0, M, -k * k),
                                         1e-12 * K.frobenius());
    return fac.negative_pivots();
}

}  // namespace helmrec

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "helmrec/fem.hpp"
#include "helmrec/geometry.hpp"
#include "helmrec/linalg.hpp"
#include "helmrec/rng.hpp"

namespace helmrec {

/// Full experiment description. `delta` is the noise level as a fraction of
/// ||V||_F; the absolute perturbation is delta * ||V||_F.
struct Scenario {
    double k = 0.0;
    double q0 = 0.0;
    ScattererGeometry geometry;
    double q_inclusion = 0.0;
    double q_min_assumed = 0.0;
    int n1 = 0;
    double delta = 0.0;
    int d_tilde = 0;
    std::uint64_t noise_seed = 0;
    double forward_h = 0.0;
    double inversion_h = 0.0;
    double r0 = 1.0;

    int basis_size() const { return 2 * n1 + 1; }

    void validate() const {
        if (!(k > 0.0)) throw ConfigError("k must be positive");
        if (!(q0 > 0.0)) throw ConfigError("q0 must be positive");
        if (!(q0 < q_min_assumed && q_min_assumed <= q_inclusion))
            throw ConfigError("need q0 < q_min_assumed <= q_inclusion");
        if (n1 < 1) throw ConfigError("N1 must be >= 1");
        if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");
        if (d_tilde < 0) throw ConfigError("d_tilde must be >= 0");
        if (!(forward_h >= 0.01 && forward_h <= 0.5))
            throw ConfigError("forward_h out of range [0.01, 0.5]");
        if (!(inversion_h >= 0.01 && inversion_h <= 0.5))
            throw ConfigError("inversion_h out of range [0.01, 0.5]");
        if (!(r0 > 0.0 && r0 <= 1.0)) throw ConfigError("r0 must lie in (0, 1]");
        geometry.validate();
    }
};

struct MeasuredV {
    SymMatrix V;
    double asymmetry = 0.0;  // ||V - V^T||_F / ||V||_F before symmetrization
};

/// One symmetric N x N sensitivity block per inversion pixel.
struct SensitivityStack {
    int M = 0;
    int N = 0;
    std::vector<SymMatrix> blocks;
};

/// Boundary measurement difference V_ij = <g_i, trace v^j> on the given
/// forward mesh. The raw matrix is symmetrized; the relative asymmetry is
/// reported as a resolution diagnostic.
inline MeasuredV compute_V(const Scenario& sc, const TriMesh& forward_mesh) {
    sc.validate();
    const BackgroundBasis basis(sc.k, sc.q0, sc.n1);
    const int n = basis.size();
    const CoefficientField q =
        CoefficientField::from_geometry(forward_mesh, sc.geometry, sc.q0, sc.q_inclusion);
    const HelmholtzSolver solver(forward_mesh, q, sc.k);
    const auto loads = difference_loads_all(forward_mesh, q, sc.q0, basis);

    std::vector<double> raw(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        const auto v = solver.solve(loads[static_cast<std::size_t>(j)]);
        for (int i = 0; i < n; ++i)
            raw[static_cast<std::size_t>(i) * n + j] = boundary_pairing(forward_mesh, v, basis, i);
    }

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = raw[static_cast<std::size_t>(i) * n + j];
            const double b = raw[static_cast<std::size_t>(j) * n + i];
            num += (a - b) * (a - b);
            den += a * a;
        }
    const double asym = den > 0.0 ? std::sqrt(num / den) : 0.0;
    if (asym > 0.05) throw AsymmetryTooLarge(asym);
    return {SymMatrix(n, raw), asym};
}

inline MeasuredV compute_V(const Scenario& sc) {
    return compute_V(sc, build_disk_mesh(sc.forward_h));
}

/// Sensitivity blocks S_m from the analytic background fields, 3-point
/// midside quadrature per pixel. Each block is a Gram matrix, PSD by
/// construction.
inline SensitivityStack compute_S(const Scenario& sc, const TriMesh& inversion_mesh) {
    sc.validate();
    const BackgroundBasis basis(sc.k, sc.q0, sc.n1);
    const int n = basis.size();
    SensitivityStack stack;
    stack.M = static_cast<int>(inversion_mesh.triangles.size());
    stack.N = n;
    stack.blocks.reserve(static_cast<std::size_t>(stack.M));
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int t = 0; t < stack.M; ++t) {
        const double area = inversion_mesh.signed_area(t);
        const auto pts = detail::midside_points(inversion_mesh, t);
        SymMatrix S(n);
        const double w = sc.k * sc.k * area / 3.0;
        for (int p = 0; p < 3; ++p) {
            basis.eval_point(pts[static_cast<std::size_t>(p)][0],
                             pts[static_cast<std::size_t>(p)][1], u);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j)
                    S.add(i, j, w * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)]);
        }
        stack.blocks.push_back(std::move(S));
    }
    return stack;
}

inline SensitivityStack compute_S(const Scenario& sc) {
    return compute_S(sc, build_disk_mesh(sc.inversion_h));
}

/// V + delta * E / ||E||_F with E iid uniform on [-1, 1) from SplitMix64,
/// then symmetrized. delta here is the absolute Frobenius perturbation.
/// delta = 0 returns the input unchanged.
inline SymMatrix add_noise(const SymMatrix& V, double delta, std::uint64_t seed) {
    if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");
    if (delta == 0.0) return V;
    const int n = V.n();
    SplitMix64 rng(seed);
    std::vector<double> e(static_cast<std::size_t>(n) * n);
    double norm = 0.0;
    for (auto& v : e) {
        v = rng.next_symmetric();
        norm += v * v;
    }
    norm = std::sqrt(norm);
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = V.raw()[i] + delta * e[i] / norm;
    return SymMatrix(n, out);
}

struct FrechetResult {
    std::vector<double> epsilons;
    std::vector<double> residuals;       // ||F(q0+eps chi) - F(q0) - eps F'(q0)chi||_F
    SymMatrix first_order_born;          // derivative of the discrete forward map
    SymMatrix first_order_analytic;      // quadrature Gram matrix over the region
};

/// Taylor remainder of the forward map for a perturbation supported on the
/// forward-mesh triangles whose centroid lies in the disk (center, radius).
/// The first-order term is the Born-linearized solve on the same mesh, so the
/// residual isolates the second-order remainder instead of discretization
/// error.
inline FrechetResult frechet_check(const Scenario& sc, const std::vector<double>& epsilons,
                                   std::array<double, 2> region_center, double region_radius) {
    sc.validate();
    const TriMesh mesh = build_disk_mesh(sc.forward_h);
    const BackgroundBasis basis(sc.k, sc.q0, sc.n1);
    const int n = basis.size();

    std::vector<int> region;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto c = mesh.centroid(t);
        const double dx = c[0] - region_center[0], dy = c[1] - region_center[1];
        if (dx * dx + dy * dy < region_radius * region_radius) region.push_back(t);
    }
    if (region.empty()) throw ConfigError("perturbation region contains no triangles");

    auto region_field = [&](double value) {
        std::vector<double> q(mesh.triangles.size(), sc.q0);
        for (int t : region) q[static_cast<std::size_t>(t)] = sc.q0 + value;
        return CoefficientField(std::move(q));
    };

    // unit-contrast loads; load(eps) = eps * load(1)
    const CoefficientField unit = region_field(1.0);
    const auto loads = difference_loads_all(mesh, unit, sc.q0, basis);

    auto pair_all = [&](const HelmholtzSolver& solver, double scale) {
        std::vector<double> raw(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> load(mesh.nodes.size());
        for (int j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < load.size(); ++i)
                load[i] = scale * loads[static_cast<std::size_t>(j)][i];
            const auto v = solver.solve(load);
            for (int i = 0; i < n; ++i)
                raw[static_cast<std::size_t>(i) * n + j] = boundary_pairing(mesh, v, basis, i);
        }
        return SymMatrix(n, raw);
    };

    FrechetResult r{epsilons, {}, SymMatrix(n), SymMatrix(n)};

    const HelmholtzSolver born_solver(mesh, CoefficientField::constant(mesh, sc.q0), sc.k);
    r.first_order_born = pair_all(born_solver, 1.0);

    std::vector<double> u(static_cast<std::size_t>(n));
    for (int t : region) {
        const double area = mesh.signed_area(t);
        const auto pts = detail::midside_points(mesh, t);
        const double w = sc.k * sc.k * area / 3.0;
        for (int p = 0; p < 3; ++p) {
            basis.eval_point(pts[static_cast<std::size_t>(p)][0],
                             pts[static_cast<std::size_t>(p)][1], u);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j)
                    r.first_order_analytic.add(i, j, w * u[static_cast<std::size_t>(i)] *
                                                         u[static_cast<std::size_t>(j)]);
        }
    }

    for (double eps : epsilons) {
        if (eps == 0.0) {
            r.residuals.push_back(0.0);
            continue;
        }
        const HelmholtzSolver solver(mesh, region_field(eps), sc.k);
        const SymMatrix v_eps = pair_all(solver, eps);
        SymMatrix rem = v_eps;
        rem.add_scaled(r.first_order_born, -eps);
        r.residuals.push_back(rem.frobenius());
    }
    return r;
}

}  // namespace helmrec

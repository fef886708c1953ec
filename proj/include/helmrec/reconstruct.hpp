#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "helmrec/forward.hpp"
#include "helmrec/geometry.hpp"
#include "helmrec/linalg.hpp"

namespace helmrec {

enum class Variant { EigsumPenalized, EigsumPlain, Frobenius };

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::EigsumPenalized: return "eigsum_penalized";
        case Variant::EigsumPlain: return "eigsum_plain";
        case Variant::Frobenius: return "frobenius";
    }
    return "?";
}

inline Variant parse_variant(const std::string& s) {
    if (s == "eigsum_penalized") return Variant::EigsumPenalized;
    if (s == "eigsum_plain") return Variant::EigsumPlain;
    if (s == "frobenius") return Variant::Frobenius;
    throw ConfigError("unknown variant: " + s);
}

struct SolverSettings {
    int max_iterations = 2000;
    double improvement_tol = 1e-8;  // relative, over `patience` iterations
    int patience = 200;
    double warn_improvement = 1e-4;  // still-moving threshold at the iteration cap
};

/// Box-constrained convex problem: minimize the chosen functional of
/// R(a) = Vd - sum_m a_m S_m over 0 <= a_m <= upper_m.
struct ReconProblem {
    SymMatrix Vd;
    const SensitivityStack* stack = nullptr;
    std::vector<double> upper;
    double delta = 0.0;  // Frobenius penalty weight (absolute)
    Variant variant = Variant::EigsumPenalized;
    SolverSettings settings;

    void validate() const {
        if (!stack) throw ConfigError("missing sensitivity stack");
        if (stack->N != Vd.n()) throw DimensionMismatch("stack/measurement dimension mismatch");
        if (static_cast<int>(upper.size()) != stack->M)
            throw DimensionMismatch("upper bound count != pixel count");
        for (double u : upper)
            if (!(u >= 0.0) || !std::isfinite(u))
                throw ConfigError("upper bounds must be finite and >= 0");
    }
};

struct ReconResult {
    std::vector<double> a;
    std::vector<double> upper;
    double objective_value = 0.0;
    std::vector<double> trace;  // best objective so far, per iteration
    int iterations = 0;
    bool converged = false;
};

inline SymMatrix residual_matrix(const ReconProblem& p, const std::vector<double>& a) {
    SymMatrix r = p.Vd;
    for (int m = 0; m < p.stack->M; ++m) {
        const double am = a[static_cast<std::size_t>(m)];
        if (am != 0.0) r.add_scaled(p.stack->blocks[static_cast<std::size_t>(m)], -am);
    }
    return r;
}

inline double objective(const ReconProblem& p, const std::vector<double>& a) {
    const SymMatrix r = residual_matrix(p, a);
    switch (p.variant) {
        case Variant::EigsumPlain: return sum_positive_eigs(r);
        case Variant::EigsumPenalized: return sum_positive_eigs(r) + p.delta * r.frobenius();
        case Variant::Frobenius: return r.frobenius();
    }
    return 0.0;
}

/// One subgradient of the objective. Component m is
///   -sum_{lambda_j(R) > tau} q_j^T S_m q_j  - delta <R, S_m>_F / ||R||_F
/// with the eigenvalue sum dropped for the Frobenius variant and the
/// Frobenius term dropped for the plain variant or when ||R||_F is tiny.
inline std::vector<double> subgradient(const ReconProblem& p, const std::vector<double>& a) {
    const SymMatrix r = residual_matrix(p, a);
    const int n = r.n();
    const int M = p.stack->M;
    std::vector<double> g(static_cast<std::size_t>(M), 0.0);

    if (p.variant != Variant::Frobenius) {
        const EighResult eg = eigh(r);
        const double tau = 1e-12 * r.frobenius();
        // projector onto the positive eigenspace
        SymMatrix proj(n);
        bool any = false;
        for (int j = 0; j < n; ++j) {
            if (eg.eigenvalues[static_cast<std::size_t>(j)] <= tau) continue;
            any = true;
            for (int i = 0; i < n; ++i)
                for (int l = 0; l <= i; ++l)
                    proj.add(i, l, eg.vec(i, j) * eg.vec(l, j));
        }
        if (any)
            for (int m = 0; m < M; ++m)
                g[static_cast<std::size_t>(m)] -=
                    p.stack->blocks[static_cast<std::size_t>(m)].dot(proj);
    }

    if (p.variant != Variant::EigsumPlain) {
        const double fro = r.frobenius();
        if (fro > 1e-14) {
            const double w = p.variant == Variant::Frobenius ? 1.0 : p.delta;
            if (w != 0.0)
                for (int m = 0; m < M; ++m)
                    g[static_cast<std::size_t>(m)] -=
                        w * r.dot(p.stack->blocks[static_cast<std::size_t>(m)]) / fro;
        }
    }
    return g;
}

/// Projected subgradient descent with diminishing steps s_t = s0 / sqrt(t),
/// s0 = box diameter / initial subgradient norm. Tracks and returns the best
/// iterate; the reported trace is the best-so-far sequence.
inline ReconResult solve(const ReconProblem& p) {
    p.validate();
    const int M = p.stack->M;
    ReconResult res;
    res.upper = p.upper;
    res.a.assign(static_cast<std::size_t>(M), 0.0);

    double diam = 0.0;
    for (double u : p.upper) diam += u * u;
    diam = std::sqrt(diam);

    std::vector<double> a(static_cast<std::size_t>(M), 0.0);
    double f = objective(p, a);
    res.objective_value = f;
    res.trace.push_back(f);

    std::vector<double> g = subgradient(p, a);
    double gnorm = 0.0;
    for (double v : g) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    if (diam == 0.0 || gnorm == 0.0) {
        res.converged = true;
        return res;
    }
    const double s0 = diam / gnorm;

    const auto& st = p.settings;
    int t = 0;
    bool stopped_early = false;
    while (t < st.max_iterations) {
        ++t;
        if (t > 1) g = subgradient(p, a);
        const double step = s0 / std::sqrt(static_cast<double>(t));
        for (int m = 0; m < M; ++m) {
            double v = a[static_cast<std::size_t>(m)] - step * g[static_cast<std::size_t>(m)];
            if (v < 0.0) v = 0.0;
            const double u = p.upper[static_cast<std::size_t>(m)];
            if (v > u) v = u;
            a[static_cast<std::size_t>(m)] = v;
        }
        f = objective(p, a);
        if (f < res.objective_value) {
            res.objective_value = f;
            res.a = a;
        }
        res.trace.push_back(res.objective_value);
        if (t >= st.patience) {
            const double before = res.trace[static_cast<std::size_t>(t - st.patience)];
            if (before - res.objective_value <
                st.improvement_tol * (1.0 + std::abs(res.objective_value))) {
                stopped_early = true;
                break;
            }
        }
    }
    res.iterations = t;
    if (stopped_early) {
        res.converged = true;
    } else {
        const int win = std::min(st.patience, t);
        const double before = res.trace[static_cast<std::size_t>(t - win)];
        res.converged = before - res.objective_value <=
                        st.warn_improvement * (1.0 + std::abs(res.objective_value));
    }
    return res;
}

struct SupportInfo {
    std::vector<std::uint8_t> mask;
    std::vector<int> component;  // component id per pixel, -1 outside the mask
    int n_components = 0;
    std::vector<double> component_area;
    std::vector<std::array<double, 2>> centroids;  // area-weighted
};

/// Threshold the coefficients at threshold_fraction * max(upper) and report
/// connected components over shared triangle edges.
inline SupportInfo extract_support(const ReconResult& result, const TriMesh& mesh,
                                   double threshold_fraction = 0.5) {
    const int M = static_cast<int>(mesh.triangles.size());
    if (static_cast<int>(result.a.size()) != M)
        throw DimensionMismatch("result/mesh pixel count mismatch");
    double umax = 0.0;
    for (double u : result.upper) umax = std::max(umax, u);
    const double thr = threshold_fraction * umax;

    SupportInfo info;
    info.mask.assign(static_cast<std::size_t>(M), 0);
    bool empty = true;
    for (int m = 0; m < M; ++m) {
        if (result.upper[static_cast<std::size_t>(m)] > 0.0 && umax > 0.0 &&
            result.a[static_cast<std::size_t>(m)] >= thr) {
            info.mask[static_cast<std::size_t>(m)] = 1;
            empty = false;
        }
    }
    if (empty) throw EmptySupport();

    // adjacency over shared edges
    std::map<std::pair<int, int>, int> edge_owner;
    std::vector<std::array<int, 3>> neighbor(static_cast<std::size_t>(M), {-1, -1, -1});
    for (int t = 0; t < M; ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        for (int e = 0; e < 3; ++e) {
            int aN = tri[e], bN = tri[(e + 1) % 3];
            if (aN > bN) std::swap(aN, bN);
            auto [it, inserted] = edge_owner.try_emplace({aN, bN}, t);
            if (!inserted) {
                const int other = it->second;
                for (int s = 0; s < 3; ++s) {
                    if (neighbor[static_cast<std::size_t>(t)][s] == -1) {
                        neighbor[static_cast<std::size_t>(t)][s] = other;
                        break;
                    }
                }
                for (int s = 0; s < 3; ++s) {
                    if (neighbor[static_cast<std::size_t>(other)][s] == -1) {
                        neighbor[static_cast<std::size_t>(other)][s] = t;
                        break;
                    }
                }
            }
        }
    }

    info.component.assign(static_cast<std::size_t>(M), -1);
    std::vector<int> queue;
    for (int seed = 0; seed < M; ++seed) {
        if (!info.mask[static_cast<std::size_t>(seed)] ||
            info.component[static_cast<std::size_t>(seed)] != -1)
            continue;
        const int id = info.n_components++;
        double area = 0.0, cx = 0.0, cy = 0.0;
        queue.assign(1, seed);
        info.component[static_cast<std::size_t>(seed)] = id;
        while (!queue.empty()) {
            const int t = queue.back();
            queue.pop_back();
            const double at = mesh.signed_area(t);
            const auto c = mesh.centroid(t);
            area += at;
            cx += at * c[0];
            cy += at * c[1];
            for (int nb : neighbor[static_cast<std::size_t>(t)]) {
                if (nb < 0 || !info.mask[static_cast<std::size_t>(nb)] ||
                    info.component[static_cast<std::size_t>(nb)] != -1)
                    continue;
                info.component[static_cast<std::size_t>(nb)] = id;
                queue.push_back(nb);
            }
        }
        info.component_area.push_back(area);
        info.centroids.push_back({cx / area, cy / area});
    }
    return info;
}

}  // namespace helmrec

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "helmrec/errors.hpp"

namespace helmrec {

/// Conforming P1 triangulation of the unit disk. Triangles are
/// counterclockwise; boundary edges run counterclockwise around |x| = 1.
struct TriMesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 2>> boundary_edges;

    double signed_area(int t) const {
        const auto& tri = triangles[static_cast<std::size_t>(t)];
        const auto& a = nodes[static_cast<std::size_t>(tri[0])];
        const auto& b = nodes[static_cast<std::size_t>(tri[1])];
        const auto& c = nodes[static_cast<std::size_t>(tri[2])];
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    }

    std::array<double, 2> centroid(int t) const {
        const auto& tri = triangles[static_cast<std::size_t>(t)];
        const auto& a = nodes[static_cast<std::size_t>(tri[0])];
        const auto& b = nodes[static_cast<std::size_t>(tri[1])];
        const auto& c = nodes[static_cast<std::size_t>(tri[2])];
        return {(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0};
    }

    double total_area() const {
        double s = 0.0;
        for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += signed_area(t);
        return s;
    }
};

/// Scatterer region inside the unit disk. Membership is a strict interior
/// test and fully deterministic.
struct ScattererGeometry {
    enum class Kind { Disk, Pear, Union };

    Kind kind = Kind::Disk;
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;            // disk
    double base_radius = 0.2;       // pear
    double perturbation = 0.03;     // pear
    int lobes = 3;                  // pear
    std::vector<ScattererGeometry> parts;  // union

    static ScattererGeometry disk(std::array<double, 2> c, double r) {
        ScattererGeometry g;
        g.kind = Kind::Disk;
        g.center = c;
        g.radius = r;
        g.validate();
        return g;
    }

    static ScattererGeometry pear(std::array<double, 2> c) {
        ScattererGeometry g;
        g.kind = Kind::Pear;
        g.center = c;
        g.validate();
        return g;
    }

    static ScattererGeometry union_of(std::vector<ScattererGeometry> gs) {
        ScattererGeometry g;
        g.kind = Kind::Union;
        g.parts = std::move(gs);
        g.validate();
        return g;
    }

    void validate() const {
        const double c = std::hypot(center[0], center[1]);
        switch (kind) {
            case Kind::Disk:
                if (!(radius > 0.0)) throw ConfigError("disk radius must be positive");
                if (c + radius >= 1.0) throw ConfigError("disk not inside the unit disk");
                break;
            case Kind::Pear:
                if (c + base_radius + perturbation >= 1.0)
                    throw ConfigError("pear not inside the unit disk");
                break;
            case Kind::Union:
                if (parts.empty()) throw ConfigError("union geometry is empty");
                for (const auto& p : parts) p.validate();
                break;
        }
    }

    bool contains(double x, double y) const {
        const double dx = x - center[0];
        const double dy = y - center[1];
        switch (kind) {
            case Kind::Disk:
                return dx * dx + dy * dy < radius * radius;
            case Kind::Pear: {
                const double r = std::hypot(dx, dy);
                const double t = std::atan2(dy, dx);
                return r < base_radius + perturbation * std::cos(lobes * t);
            }
            case Kind::Union:
                for (const auto& p : parts)
                    if (p.contains(x, y)) return true;
                return false;
        }
        return false;
    }
};

enum class PixelLabel { Inside, Outside, Cut };

namespace detail {

// Nodes of ring i (of n) sit at radius i/n, 6*i of them, angles 2*pi*j/(6i).
// Ring 0 is the single center node.
inline int ring_start(int i) { return i == 0 ? 0 : 1 + 3 * i * (i - 1); }
inline int ring_count(int i) { return i == 0 ? 1 : 6 * i; }

}  // namespace detail

/// Structured polar-ring triangulation of the unit disk. Deterministic for a
/// fixed target_h; boundary nodes lie exactly on the unit circle. Adjacent
/// rings are stitched by an angular merge, giving 6*n^2 triangles for n rings.
inline TriMesh build_disk_mesh(double target_h) {
    if (!(target_h >= 0.01 && target_h <= 0.5))
        throw ConfigError("mesh size out of range [0.01, 0.5]");
    const int n = static_cast<int>(std::ceil(1.45 / target_h));

    TriMesh mesh;
    mesh.nodes.reserve(static_cast<std::size_t>(detail::ring_start(n) + detail::ring_count(n)));
    mesh.nodes.push_back({0.0, 0.0});
    for (int i = 1; i <= n; ++i) {
        const double r = static_cast<double>(i) / n;
        const int m = detail::ring_count(i);
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * std::numbers::pi * j / m;
            mesh.nodes.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }

    mesh.triangles.reserve(static_cast<std::size_t>(6) * n * n);
    // center fan
    for (int j = 0; j < 6; ++j)
        mesh.triangles.push_back({0, 1 + j, 1 + (j + 1) % 6});
    // annuli
    for (int i = 2; i <= n; ++i) {
        const int sa = detail::ring_start(i - 1), ma = detail::ring_count(i - 1);
        const int sb = detail::ring_start(i), mb = detail::ring_count(i);
        int a = 0, b = 0;
        const double inf = std::numeric_limits<double>::infinity();
        while (a < ma || b < mb) {
            const double next_a = a < ma ? 2.0 * std::numbers::pi * (a + 1) / ma : inf;
            const double next_b = b < mb ? 2.0 * std::numbers::pi * (b + 1) / mb : inf;
            if (next_b <= next_a) {
                mesh.triangles.push_back({sa + a % ma, sb + b % mb, sb + (b + 1) % mb});
                ++b;
            } else {
                mesh.triangles.push_back({sa + a % ma, sb + b % mb, sa + (a + 1) % ma});
                ++a;
            }
        }
    }

    const int sb = detail::ring_start(n), mb = detail::ring_count(n);
    mesh.boundary_edges.reserve(static_cast<std::size_t>(mb));
    for (int j = 0; j < mb; ++j)
        mesh.boundary_edges.push_back({sb + j, sb + (j + 1) % mb});
    return mesh;
}

/// Label every triangle against the scatterer: Inside when all three vertices
/// and the centroid are inside, Outside when none are, Cut otherwise.
inline std::vector<PixelLabel> classify_pixels(const TriMesh& mesh,
                                               const ScattererGeometry& geom) {
    std::vector<PixelLabel> labels(mesh.triangles.size());
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        int inside = 0;
        for (int v = 0; v < 3; ++v) {
            const auto& p = mesh.nodes[static_cast<std::size_t>(tri[v])];
            if (geom.contains(p[0], p[1])) ++inside;
        }
        const auto c = mesh.centroid(t);
        if (geom.contains(c[0], c[1])) ++inside;
        labels[static_cast<std::size_t>(t)] =
            inside == 4 ? PixelLabel::Inside
                        : (inside == 0 ? PixelLabel::Outside : PixelLabel::Cut);
    }
    return labels;
}

}  // namespace helmrec

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "helmrec/forward.hpp"
#include "helmrec/geometry.hpp"
#include "helmrec/linalg.hpp"
#include "helmrec/monotonicity.hpp"
#include "helmrec/reconstruct.hpp"

namespace helmrec {

static_assert(std::endian::native == std::endian::little,
              "binary stack format assumes a little-endian host");

/// Full-precision decimal formatting (17 significant digits).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw DataFormatError("cannot open for writing: " + path);
    return f;
}

inline std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw DataFormatError("cannot open for reading: " + path);
    return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// measurement matrix CSV: first line "# n=<N>", then N rows of N doubles
// ---------------------------------------------------------------------------

inline void write_matrix_csv(const std::string& path, const SymMatrix& m) {
    auto f = detail::open_out(path);
    f << "# n=" << m.n() << "\n";
    for (int i = 0; i < m.n(); ++i) {
        for (int j = 0; j < m.n(); ++j) {
            if (j) f << ",";
            f << fmt17(m(i, j));
        }
        f << "\n";
    }
}

inline SymMatrix read_matrix_csv(const std::string& path) {
    auto f = detail::open_in(path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("# n=", 0) != 0)
        throw DataFormatError("missing '# n=' header in " + path);
    const int n = std::atoi(line.c_str() + 4);
    if (n < 1) throw DataFormatError("bad dimension in " + path);
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(n) * n);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (static_cast<int>(vals.size()) != n * n)
        throw DataFormatError("expected " + std::to_string(n * n) + " values in " + path);
    return SymMatrix(n, vals);
}

// ---------------------------------------------------------------------------
// sensitivity stack binary: "SMST", u32 M, u32 N, M*N*N float64, block-major
// ---------------------------------------------------------------------------

inline void write_stack(const std::string& path, const SensitivityStack& stack) {
    auto f = detail::open_out(path, true);
    f.write("SMST", 4);
    const std::uint32_t m = static_cast<std::uint32_t>(stack.M);
    const std::uint32_t n = static_cast<std::uint32_t>(stack.N);
    f.write(reinterpret_cast<const char*>(&m), 4);
    f.write(reinterpret_cast<const char*>(&n), 4);
    for (const auto& block : stack.blocks)
        f.write(reinterpret_cast<const char*>(block.raw().data()),
                static_cast<std::streamsize>(block.raw().size() * sizeof(double)));
}

inline SensitivityStack read_stack(const std::string& path) {
    auto f = detail::open_in(path, true);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "SMST", 4) != 0)
        throw DataFormatError("bad magic in " + path);
    std::uint32_t m = 0, n = 0;
    f.read(reinterpret_cast<char*>(&m), 4);
    f.read(reinterpret_cast<char*>(&n), 4);
    if (!f || m == 0 || n == 0) throw DataFormatError("bad header in " + path);
    SensitivityStack stack;
    stack.M = static_cast<int>(m);
    stack.N = static_cast<int>(n);
    stack.blocks.reserve(m);
    std::vector<double> buf(static_cast<std::size_t>(n) * n);
    for (std::uint32_t b = 0; b < m; ++b) {
        f.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!f) throw DataFormatError("truncated stack in " + path);
        stack.blocks.emplace_back(static_cast<int>(n), buf);
    }
    return stack;
}

// ---------------------------------------------------------------------------
// mesh JSON
// ---------------------------------------------------------------------------

inline nlohmann::json mesh_to_json(const TriMesh& mesh) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& p : mesh.nodes) j["nodes"].push_back({p[0], p[1]});
    j["triangles"] = nlohmann::json::array();
    for (const auto& t : mesh.triangles) j["triangles"].push_back({t[0], t[1], t[2]});
    j["boundary_edges"] = nlohmann::json::array();
    for (const auto& e : mesh.boundary_edges) j["boundary_edges"].push_back({e[0], e[1]});
    return j;
}

inline TriMesh mesh_from_json(const nlohmann::json& j) {
    TriMesh mesh;
    try {
        for (const auto& p : j.at("nodes"))
            mesh.nodes.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        for (const auto& t : j.at("triangles"))
            mesh.triangles.push_back(
                {t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
        for (const auto& e : j.at("boundary_edges"))
            mesh.boundary_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    } catch (const nlohmann::json::exception& ex) {
        throw DataFormatError(std::string("bad mesh JSON: ") + ex.what());
    }
    return mesh;
}

inline void write_mesh_json(const std::string& path, const TriMesh& mesh) {
    auto f = detail::open_out(path);
    f << mesh_to_json(mesh).dump() << "\n";
}

inline TriMesh read_mesh_json(const std::string& path) {
    auto f = detail::open_in(path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw DataFormatError(std::string("bad JSON in ") + path + ": " + ex.what());
    }
    return mesh_from_json(j);
}

// ---------------------------------------------------------------------------
// per-pixel CSVs
// ---------------------------------------------------------------------------

inline void write_beta_csv(const std::string& path, const TriMesh& mesh, const BetaMap& map) {
    if (static_cast<int>(map.beta.size()) != static_cast<int>(mesh.triangles.size()))
        throw DimensionMismatch("beta map / mesh pixel count mismatch");
    auto f = detail::open_out(path);
    f << "pixel,centroid_x,centroid_y,beta\n";
    for (int m = 0; m < static_cast<int>(map.beta.size()); ++m) {
        const auto c = mesh.centroid(m);
        f << m << "," << fmt17(c[0]) << "," << fmt17(c[1]) << ","
          << fmt17(map.beta[static_cast<std::size_t>(m)]) << "\n";
    }
}

inline void write_count_csv(const std::string& path, const TriMesh& mesh,
                            const std::vector<int>& counts) {
    if (counts.size() != mesh.triangles.size())
        throw DimensionMismatch("count field / mesh pixel count mismatch");
    auto f = detail::open_out(path);
    f << "pixel,centroid_x,centroid_y,count\n";
    for (int m = 0; m < static_cast<int>(counts.size()); ++m) {
        const auto c = mesh.centroid(m);
        f << m << "," << fmt17(c[0]) << "," << fmt17(c[1]) << ","
          << counts[static_cast<std::size_t>(m)] << "\n";
    }
}

inline void write_recon_csv(const std::string& path, const TriMesh& mesh,
                            const ReconResult& result, const std::vector<std::uint8_t>& mask) {
    auto f = detail::open_out(path);
    f << "pixel,centroid_x,centroid_y,a,upper_bound,in_support\n";
    for (int m = 0; m < static_cast<int>(result.a.size()); ++m) {
        const auto c = mesh.centroid(m);
        f << m << "," << fmt17(c[0]) << "," << fmt17(c[1]) << ","
          << fmt17(result.a[static_cast<std::size_t>(m)]) << ","
          << fmt17(result.upper[static_cast<std::size_t>(m)]) << ","
          << (mask.empty() ? 0 : static_cast<int>(mask[static_cast<std::size_t>(m)])) << "\n";
    }
}

/// Generic per-pixel field reader: picks the "a", "beta" or "count" column.
inline std::vector<double> read_field_csv(const std::string& path) {
    auto f = detail::open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw DataFormatError("empty field CSV: " + path);
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
    }
    int value_col = -1;
    for (const char* name : {"a", "beta", "count"}) {
        for (int c = 0; c < static_cast<int>(cols.size()); ++c)
            if (cols[static_cast<std::size_t>(c)] == name) {
                value_col = c;
                break;
            }
        if (value_col >= 0) break;
    }
    if (value_col < 0) throw DataFormatError("no value column (a/beta/count) in " + path);
    std::vector<double> values;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c <= value_col; ++c)
            if (!std::getline(ss, cell, ','))
                throw DataFormatError("short row in " + path);
        values.push_back(std::strtod(cell.c_str(), nullptr));
    }
    return values;
}

inline std::vector<double> read_beta_csv(const std::string& path) { return read_field_csv(path); }

// ---------------------------------------------------------------------------
// raster rendering: binary PPM plus a value-scale sidecar
// ---------------------------------------------------------------------------

/// Rasterize a per-triangle field over [-1,1]^2. Values map linearly from
/// [0, max] to ink (max value = full intensity); points outside the disk stay
/// white. Writes P6 PPM and a JSON sidecar with the value scale.
inline void render_field_ppm(const TriMesh& mesh, const std::vector<double>& values,
                             int resolution, const std::string& ppm_path,
                             const std::string& sidecar_path) {
    if (values.size() != mesh.triangles.size())
        throw DimensionMismatch("field size != triangle count");
    if (resolution <= 0) throw ConfigError("resolution must be positive");

    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);

    // coarse spatial grid over triangle bounding boxes
    const int G = 64;
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(G) * G);
    auto bin_of = [&](double x) {
        int b = static_cast<int>((x + 1.0) * 0.5 * G);
        return b < 0 ? 0 : (b >= G ? G - 1 : b);
    };
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        double xmin = 2, xmax = -2, ymin = 2, ymax = -2;
        for (int v = 0; v < 3; ++v) {
            const auto& p = mesh.nodes[static_cast<std::size_t>(tri[v])];
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
            ymin = std::min(ymin, p[1]);
            ymax = std::max(ymax, p[1]);
        }
        for (int bx = bin_of(xmin); bx <= bin_of(xmax); ++bx)
            for (int by = bin_of(ymin); by <= bin_of(ymax); ++by)
                bins[static_cast<std::size_t>(by) * G + bx].push_back(t);
    }

    auto inside_tri = [&](int t, double x, double y) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const auto& a = mesh.nodes[static_cast<std::size_t>(tri[0])];
        const auto& b = mesh.nodes[static_cast<std::size_t>(tri[1])];
        const auto& c = mesh.nodes[static_cast<std::size_t>(tri[2])];
        const double d1 = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
        const double d2 = (c[0] - b[0]) * (y - b[1]) - (c[1] - b[1]) * (x - b[0]);
        const double d3 = (a[0] - c[0]) * (y - c[1]) - (a[1] - c[1]) * (x - c[0]);
        const double tol = -1e-12;
        return d1 >= tol && d2 >= tol && d3 >= tol;
    };

    auto f = detail::open_out(ppm_path, true);
    f << "P6\n" << resolution << " " << resolution << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(resolution) * 3);
    for (int py = 0; py < resolution; ++py) {
        const double y = 1.0 - (py + 0.5) * 2.0 / resolution;  // top row = y near 1
        for (int px = 0; px < resolution; ++px) {
            const double x = -1.0 + (px + 0.5) * 2.0 / resolution;
            unsigned char gray = 255;
            if (x * x + y * y <= 1.0) {
                const auto& bin = bins[static_cast<std::size_t>(bin_of(y)) * G + bin_of(x)];
                for (int t : bin) {
                    if (inside_tri(t, x, y)) {
                        const double v = values[static_cast<std::size_t>(t)];
                        const double intensity = vmax > 0.0 ? std::min(1.0, std::max(0.0, v / vmax)) : 0.0;
                        gray = static_cast<unsigned char>(255.5 - 255.0 * intensity);
                        break;
                    }
                }
            }
            row[static_cast<std::size_t>(px) * 3] = gray;
            row[static_cast<std::size_t>(px) * 3 + 1] = gray;
            row[static_cast<std::size_t>(px) * 3 + 2] = gray;
        }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }

    nlohmann::json side;
    side["vmin"] = 0.0;
    side["vmax"] = vmax;
    side["resolution"] = resolution;
    side["outside_value"] = "white";
    auto sf = detail::open_out(sidecar_path);
    sf << side.dump(2) << "\n";
}

}  // namespace helmrec

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "helmrec/io.hpp"
#include "helmrec/monotonicity.hpp"
#include "helmrec/reconstruct.hpp"

namespace helmrec {

inline nlohmann::json geometry_to_json(const ScattererGeometry& g) {
    nlohmann::json j;
    switch (g.kind) {
        case ScattererGeometry::Kind::Disk:
            j["type"] = "disk";
            j["center"] = {g.center[0], g.center[1]};
            j["radius"] = g.radius;
            break;
        case ScattererGeometry::Kind::Pear:
            j["type"] = "pear";
            j["center"] = {g.center[0], g.center[1]};
            break;
        case ScattererGeometry::Kind::Union: {
            j["type"] = "union";
            j["parts"] = nlohmann::json::array();
            for (const auto& p : g.parts) j["parts"].push_back(geometry_to_json(p));
            break;
        }
    }
    return j;
}

inline ScattererGeometry geometry_from_json(const nlohmann::json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "disk")
            return ScattererGeometry::disk(
                {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()},
                j.at("radius").get<double>());
        if (type == "pear")
            return ScattererGeometry::pear(
                {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()});
        if (type == "union") {
            std::vector<ScattererGeometry> parts;
            for (const auto& p : j.at("parts")) parts.push_back(geometry_from_json(p));
            return ScattererGeometry::union_of(std::move(parts));
        }
        throw ConfigError("unknown geometry type: " + type);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("bad geometry: ") + ex.what());
    }
}

/// Complete run description. Every physics field must be present in the
/// config file; there are no silent defaults.
struct RunConfig {
    Scenario sc;
    std::vector<double> dtilde_r0_list;
};

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("bad config JSON: ") + ex.what());
    }
    RunConfig cfg;
    try {
        cfg.sc.k = j.at("k").get<double>();
        cfg.sc.q0 = j.at("q0").get<double>();
        cfg.sc.geometry = geometry_from_json(j.at("geometry"));
        cfg.sc.q_inclusion = j.at("q_inclusion").get<double>();
        cfg.sc.q_min_assumed = j.at("q_min_assumed").get<double>();
        cfg.sc.n1 = j.at("N1").get<int>();
        cfg.sc.delta = j.at("delta").get<double>();
        cfg.sc.d_tilde = j.at("d_tilde").get<int>();
        cfg.sc.noise_seed = j.at("noise_seed").get<std::uint64_t>();
        cfg.sc.forward_h = j.at("forward_h").get<double>();
        cfg.sc.inversion_h = j.at("inversion_h").get<double>();
        cfg.sc.r0 = j.at("r0").get<double>();
        if (j.contains("dtilde_r0_list"))
            cfg.dtilde_r0_list = j.at("dtilde_r0_list").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("missing/bad config field: ") + ex.what());
    }
    cfg.sc.validate();
    return cfg;
}

namespace detail {

inline std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline nlohmann::json read_meta(const std::string& dir) {
    std::ifstream f(join(dir, "meta.json"));
    if (!f) throw DataFormatError("missing meta.json in " + dir);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw DataFormatError(std::string("bad meta.json: ") + ex.what());
    }
    return j;
}

}  // namespace detail

/// Generate all measurement artifacts for a scenario into `outdir`:
/// mesh_fine.json, mesh_inv.json, V.csv, Vdelta.csv, S.bin, meta.json.
inline void run_gen(const RunConfig& cfg, const std::string& outdir,
                    std::optional<std::uint64_t> seed_override = {}) {
    Scenario sc = cfg.sc;
    if (seed_override) sc.noise_seed = *seed_override;
    sc.validate();
    std::filesystem::create_directories(outdir);

    const TriMesh fine = build_disk_mesh(sc.forward_h);
    const TriMesh inv = build_disk_mesh(sc.inversion_h);
    const MeasuredV mv = compute_V(sc, fine);
    const double delta_abs = sc.delta * mv.V.frobenius();
    const SymMatrix vd = add_noise(mv.V, delta_abs, sc.noise_seed);
    const SensitivityStack stack = compute_S(sc, inv);

    write_mesh_json(detail::join(outdir, "mesh_fine.json"), fine);
    write_mesh_json(detail::join(outdir, "mesh_inv.json"), inv);
    write_matrix_csv(detail::join(outdir, "V.csv"), mv.V);
    write_matrix_csv(detail::join(outdir, "Vdelta.csv"), vd);
    write_stack(detail::join(outdir, "S.bin"), stack);

    nlohmann::json meta;
    meta["format"] = "helmrec-meta-1";
    meta["k"] = sc.k;
    meta["q0"] = sc.q0;
    meta["geometry"] = geometry_to_json(sc.geometry);
    meta["q_inclusion"] = sc.q_inclusion;
    meta["q_min_assumed"] = sc.q_min_assumed;
    meta["N1"] = sc.n1;
    meta["N"] = sc.basis_size();
    meta["M"] = stack.M;
    meta["delta"] = sc.delta;
    meta["delta_abs"] = delta_abs;
    meta["norm_V"] = mv.V.frobenius();
    meta["d_tilde"] = sc.d_tilde;
    meta["noise_seed"] = sc.noise_seed;
    meta["forward_h"] = sc.forward_h;
    meta["inversion_h"] = sc.inversion_h;
    meta["r0"] = sc.r0;
    meta["asymmetry"] = mv.asymmetry;
    if (!cfg.dtilde_r0_list.empty()) meta["dtilde_r0_list"] = cfg.dtilde_r0_list;
    auto mf = detail::open_out(detail::join(outdir, "meta.json"));
    mf << meta.dump(2) << "\n";
}

struct DtildeRow {
    double r0 = 0.0;
    int count = -1;  // -1 marks a near-resonant row
};

/// Negative-eigenvalue counts for a sweep of comparison-disk radii; rows with
/// a near-resonant factorization carry count -1.
inline std::vector<DtildeRow> run_dtilde(double k, double q0, double qmax,
                                         const std::vector<double>& r0_list, double mesh_h,
                                         const std::string& out_csv) {
    const TriMesh mesh = build_disk_mesh(mesh_h);
    std::vector<DtildeRow> rows;
    for (double r0 : r0_list) {
        DtildeRow row{r0, -1};
        try {
            row.count = dtilde_count(k, q0, qmax, r0, mesh);
        } catch (const NearResonance&) {
            row.count = -1;
        }
        rows.push_back(row);
    }
    auto f = detail::open_out(out_csv);
    f << "r0,count\n";
    for (const auto& r : rows) f << fmt17(r.r0) << "," << r.count << "\n";
    return rows;
}

struct BetaRunResult {
    BetaMap map;
    double delta_abs = 0.0;
    int d = 0;
};

/// Monotonicity bounds from generated artifacts. `delta_fraction` and `d`
/// default to the values recorded at generation time. When `alpha` is given,
/// also writes the per-pixel negative-eigenvalue count field.
inline BetaRunResult run_beta(const std::string& datadir, std::optional<double> delta_fraction,
                              std::optional<int> d_override, std::optional<double> alpha = {}) {
    const auto meta = detail::read_meta(datadir);
    const SymMatrix v = read_matrix_csv(detail::join(datadir, "V.csv"));
    const SymMatrix vd = read_matrix_csv(detail::join(datadir, "Vdelta.csv"));
    const SensitivityStack stack = read_stack(detail::join(datadir, "S.bin"));
    const TriMesh inv = read_mesh_json(detail::join(datadir, "mesh_inv.json"));
    if (stack.M != static_cast<int>(inv.triangles.size()))
        throw DataFormatError("stack pixel count does not match inversion mesh");

    const double frac = delta_fraction.value_or(meta.at("delta").get<double>());
    const int d = d_override.value_or(meta.at("d_tilde").get<int>());
    const double delta_abs = frac * v.frobenius();

    BetaRunResult out;
    out.map = compute_beta_map(vd, stack, delta_abs, d);
    out.delta_abs = delta_abs;
    out.d = d;
    write_beta_csv(detail::join(datadir, "beta.csv"), inv, out.map);
    if (alpha) {
        const auto counts = negative_count_field(vd, stack, *alpha, delta_abs);
        write_count_csv(detail::join(datadir, "negcount.csv"), inv, counts);
    }
    return out;
}

struct ReconRunResult {
    ReconResult result;
    bool empty_support = false;
    int n_components = 0;
    std::vector<std::array<double, 2>> centroids;
};

/// Box-constrained convex reconstruction from generated artifacts plus
/// beta.csv. Writes recon.csv and recon.json.
inline ReconRunResult run_reconstruct(const std::string& datadir,
                                      std::optional<double> delta_fraction,
                                      std::optional<int> d_override, Variant variant,
                                      SolverSettings settings = {}) {
    const auto meta = detail::read_meta(datadir);
    const SymMatrix v = read_matrix_csv(detail::join(datadir, "V.csv"));
    const SymMatrix vd = read_matrix_csv(detail::join(datadir, "Vdelta.csv"));
    const SensitivityStack stack = read_stack(detail::join(datadir, "S.bin"));
    const TriMesh inv = read_mesh_json(detail::join(datadir, "mesh_inv.json"));
    const auto beta = read_beta_csv(detail::join(datadir, "beta.csv"));
    if (static_cast<int>(beta.size()) != stack.M)
        throw DataFormatError("beta.csv pixel count does not match stack");

    const double frac = delta_fraction.value_or(meta.at("delta").get<double>());
    const double delta_abs = frac * v.frobenius();
    const double cap = meta.at("q_min_assumed").get<double>() - meta.at("q0").get<double>();

    ReconProblem problem{vd, &stack, {}, delta_abs, variant, settings};
    problem.upper.resize(beta.size());
    for (std::size_t m = 0; m < beta.size(); ++m)
        problem.upper[m] = std::min(cap, beta[m]);

    ReconRunResult out;
    out.result = solve(problem);

    std::vector<std::uint8_t> mask;
    try {
        const SupportInfo support = extract_support(out.result, inv);
        mask = support.mask;
        out.n_components = support.n_components;
        out.centroids = support.centroids;
    } catch (const EmptySupport&) {
        out.empty_support = true;
        mask.assign(static_cast<std::size_t>(stack.M), 0);
    }

    write_recon_csv(detail::join(datadir, "recon.csv"), inv, out.result, mask);

    nlohmann::json rj;
    rj["objective"] = out.result.objective_value;
    rj["iterations"] = out.result.iterations;
    rj["converged"] = out.result.converged;
    rj["empty_support"] = out.empty_support;
    rj["n_components"] = out.n_components;
    rj["variant"] = variant_name(variant);
    rj["delta"] = frac;
    rj["delta_abs"] = delta_abs;
    rj["d"] = d_override.value_or(meta.at("d_tilde").get<int>());
    rj["settings"] = {{"max_iterations", settings.max_iterations},
                      {"improvement_tol", settings.improvement_tol},
                      {"patience", settings.patience}};
    auto f = detail::open_out(detail::join(datadir, "recon.json"));
    f << rj.dump(2) << "\n";
    return out;
}

inline void run_render(const std::string& field_csv, const std::string& mesh_json,
                       const std::string& out_ppm, int resolution) {
    const TriMesh mesh = read_mesh_json(mesh_json);
    const auto values = read_field_csv(field_csv);
    if (values.size() != mesh.triangles.size())
        throw DimensionMismatch("field pixel count does not match mesh");
    render_field_ppm(mesh, values, resolution, out_ppm, out_ppm + ".scale.json");
}

}  // namespace helmrec

// Command-line front end: scenario-driven data generation, monotonicity
// bounds, reconstruction and rendering.
//
// Exit codes: 0 success (possibly with warnings), 2 config error,
// 3 resonance, 4 data-format error, 5 empty support.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "helmrec/helmrec.hpp"

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Shape reconstruction for penetrable scatterers in the unit disk"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", field_csv, mesh_json, out_file;
    double delta = -1.0, alpha = 0.0;
    int d = -1, resolution = 512;
    std::string variant_str = "eigsum_penalized";
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;

    auto* gen = app.add_subcommand("gen", "generate meshes, measurements and sensitivities");
    gen->add_option("--config", config_path, "scenario config (JSON)")->required();
    gen->add_option("--out", out_dir, "output directory")->required();
    auto* seed_opt = gen->add_option("--seed", seed_value, "override the config noise seed");

    auto* dtilde = app.add_subcommand("dtilde", "negative-eigenvalue counts over an r0 sweep");
    dtilde->add_option("--config", config_path, "scenario config (JSON, needs dtilde_r0_list)")
        ->required();
    dtilde->add_option("--out", out_dir, "output directory")->required();

    auto* beta = app.add_subcommand("beta", "per-pixel monotonicity bounds");
    beta->add_option("--out", out_dir, "data directory (from gen)")->required();
    auto* beta_delta = beta->add_option("--delta", delta, "noise level as a fraction of ||V||_F");
    auto* beta_d = beta->add_option("--d", d, "eigenvalue count bound");
    auto* beta_alpha =
        beta->add_option("--alpha", alpha, "also write the negative-count field at this alpha");

    auto* rec = app.add_subcommand("reconstruct", "solve the convex shape reconstruction");
    rec->add_option("--out", out_dir, "data directory (from gen + beta)")->required();
    auto* rec_delta = rec->add_option("--delta", delta, "noise level as a fraction of ||V||_F");
    auto* rec_d = rec->add_option("--d", d, "eigenvalue count bound");
    rec->add_option("--variant", variant_str, "objective variant")
        ->check(CLI::IsMember({"eigsum_penalized", "eigsum_plain", "frobenius"}));

    auto* render = app.add_subcommand("render", "rasterize a per-pixel field to PPM");
    render->add_option("field_csv", field_csv, "per-pixel field CSV")->required();
    render->add_option("mesh_json", mesh_json, "matching mesh JSON")->required();
    render->add_option("--out", out_file, "output PPM path")->required();
    render->add_option("--resolution", resolution, "raster width/height");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: code=config msg=" << e.what() << "\n";
        return 2;
    }

    try {
        if (*gen) {
            if (*seed_opt) seed = seed_value;
            helmrec::run_gen(helmrec::load_config(config_path), out_dir, seed);
        } else if (*dtilde) {
            const auto cfg = helmrec::load_config(config_path);
            if (cfg.dtilde_r0_list.empty())
                throw helmrec::ConfigError("config has no dtilde_r0_list");
            std::filesystem::create_directories(out_dir);
            const auto rows = helmrec::run_dtilde(
                cfg.sc.k, cfg.sc.q0, cfg.sc.q_inclusion, cfg.dtilde_r0_list, cfg.sc.inversion_h,
                (std::filesystem::path(out_dir) / "dtilde.csv").string());
            for (const auto& r : rows)
                if (r.count < 0)
                    std::cerr << "warning: near-resonant factorization at r0=" << r.r0 << "\n";
        } else if (*beta) {
            std::optional<double> df;
            std::optional<int> dd;
            std::optional<double> al;
            if (*beta_delta) df = delta;
            if (*beta_d) dd = d;
            if (*beta_alpha) al = alpha;
            const auto out = helmrec::run_beta(out_dir, df, dd, al);
            std::cout << "beta map: " << out.map.beta.size() << " pixels, "
                      << out.map.fallback_count() << " via bisection fallback\n";
        } else if (*rec) {
            std::optional<double> df;
            std::optional<int> dd;
            if (*rec_delta) df = delta;
            if (*rec_d) dd = d;
            const auto out = helmrec::run_reconstruct(out_dir, df, dd,
                                                      helmrec::parse_variant(variant_str));
            if (!out.result.converged)
                std::cerr << "warning: iteration cap reached while still improving\n";
            if (out.empty_support) {
                std::cerr << "error: code=empty_support msg=no pixel reached the support threshold\n";
                return 5;
            }
            std::cout << "objective " << out.result.objective_value << ", "
                      << out.n_components << " component(s)\n";
        } else if (*render) {
            helmrec::run_render(field_csv, mesh_json, out_file, resolution);
        }
    } catch (const helmrec::ConfigError& e) {
        std::cerr << "error: code=config msg=" << e.what() << "\n";
        return 2;
    } catch (const helmrec::NearResonance& e) {
        std::cerr << "error: code=resonance msg=" << e.what() << "\n";
        return 3;
    } catch (const helmrec::BackgroundResonance& e) {
        std::cerr << "error: code=resonance msg=" << e.what() << "\n";
        return 3;
    } catch (const helmrec::DataFormatError& e) {
        std::cerr << "error: code=data_format msg=" << e.what() << "\n";
        return 4;
    } catch (const helmrec::EmptySupport& e) {
        std::cerr << "error: code=empty_support msg=" << e.what() << "\n";
        return 5;
    } catch (const helmrec::Error& e) {
        std::cerr << "error: code=internal msg=" << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }

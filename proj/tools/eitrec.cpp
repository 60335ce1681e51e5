#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "eit/disk_oracle.hpp"
#include "eit/runner.hpp"
#include "eit/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--jobs", args.jobs, "worker count for direction/tau sweeps");
    cmd->add_option("--seed", args.seed, "seed recorded in outputs (overrides config)");
}

eit::ExperimentConfig load(const CommonArgs& args) {
    eit::ExperimentConfig cfg = eit::load_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (args.jobs > 0) cfg.jobs = args.jobs;
    if (args.seed >= 0) cfg.seed = (unsigned long long)args.seed;
    std::filesystem::create_directories(cfg.output_dir);
    return cfg;
}

void print_condition_banner(const eit::ExperimentConfig& cfg) {
    auto gc = cfg.geometric_condition();
    if (!gc.satisfied) {
        std::cerr << "WARNING: geometric condition diam(D) < dist(D, boundary) violated (diam="
                  << gc.diam << ", dist=" << gc.dist << "); estimates carry no guarantee\n";
    }
}

int cmd_mesh(const CommonArgs& args) {
    eit::ExperimentConfig cfg = load(args);
    print_condition_banner(cfg);
    eit::Mesh m = eit::generate_mesh(cfg.domain, cfg.inclusions, cfg.h_target);
    eit::MeshQuality q = eit::validate_mesh(m);
    std::string path = cfg.output_dir + "/mesh.txt";
    eit::write_mesh_file(m, path);
    std::cout << "mesh: " << m.nodes.size() << " nodes, " << m.triangles.size() << " triangles, "
              << m.boundary_edges.size() << " boundary edges -> " << path << "\n";
    std::cout << "quality: min angle " << q.min_angle_deg << " deg, max circumradius "
              << q.max_circumradius << ", conformity violations " << q.conformity_violations
              << ", orientation violations " << q.orientation_violations << "\n";
    if (!q.ok()) {
        std::cerr << "mesh invariants violated\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_indicator(const CommonArgs& args) {
    eit::ExperimentConfig cfg = load(args);
    print_condition_banner(cfg);
    eit::Mesh m;
    std::string mesh_path = cfg.output_dir + "/mesh.txt";
    if (std::filesystem::exists(mesh_path)) {
        m = eit::read_mesh_file(mesh_path);
    } else {
        m = eit::generate_mesh(cfg.domain, cfg.inclusions, cfg.h_target);
    }
    eit::ReconstructionResult rec = eit::reconstruct_support(cfg, m);
    std::string csv = cfg.output_dir + "/indicator.csv";
    eit::write_indicator_csv(csv, cfg, rec.sweeps);

    std::vector<eit::SvgSeries> series;
    static const char* palette[] = {"#1f6fb4", "#c23b22", "#2e8b57", "#8a2be2",
                                    "#d2691e", "#2f4f4f", "#b8860b", "#4682b4"};
    for (size_t d = 0; d < rec.sweeps.size(); ++d) {
        eit::SvgSeries s;
        char lbl[48];
        std::snprintf(lbl, sizeof lbl, "angle %.3f", rec.sweeps[d].plan.used_angle);
        s.label = lbl;
        s.color = palette[d % 8];
        for (const auto& smp : rec.sweeps[d].samples) {
            if (smp.failed) continue;
            double a = std::abs(smp.value);
            if (a > 0) s.points.push_back({smp.tau, std::log(a)});
        }
        series.push_back(std::move(s));
    }
    eit::write_text_file(cfg.output_dir + "/indicator.svg",
                         eit::svg_line_plot("indicator decay", "tau", "log |I|", series,
                                            eit::output_stamp(cfg)));
    std::cout << "indicator sweep written to " << csv << "\n";
    bool all_below = true;
    for (const auto& e : rec.table.entries)
        if (!e.below_noise) all_below = false;
    if (all_below) std::cout << "all samples below noise floor (no inclusion signal)\n";
    return kExitOk;
}

int cmd_reconstruct(const CommonArgs& args) {
    eit::ExperimentConfig cfg = load(args);
    print_condition_banner(cfg);
    eit::Mesh m = eit::generate_mesh(cfg.domain, cfg.inclusions, cfg.h_target);
    eit::ReconstructionResult rec = eit::reconstruct_support(cfg, m);

    eit::write_support_csv(cfg.output_dir + "/support.csv", cfg, rec);
    eit::write_indicator_csv(cfg.output_dir + "/indicator.csv", cfg, rec.sweeps);

    if (!rec.inclusion_detected) {
        std::cout << "no inclusion detected (all slope fits below the noise floor); no hull emitted\n";
        return kExitOk;
    }
    eit::write_hull_file(cfg.output_dir + "/hull.txt", cfg, *rec.hull);

    std::vector<eit::SvgPolygon> polys;
    {
        eit::SvgPolygon dom;
        dom.label = "domain boundary";
        dom.color = "#888888";
        dom.points = cfg.domain.boundary_polygon();
        polys.push_back(std::move(dom));
        for (const auto& c : cfg.inclusions.components) {
            eit::SvgPolygon ip;
            ip.label = "true inclusion";
            ip.color = "#2e8b57";
            ip.points = c.shape.vertices;
            polys.push_back(std::move(ip));
        }
        if (!cfg.inclusions.empty()) {
            eit::SvgPolygon th;
            th.label = "true convex hull";
            th.color = "#1f6fb4";
            th.points = eit::convex_hull(cfg.inclusions).vertices;
            polys.push_back(std::move(th));
        }
        eit::SvgPolygon est;
        est.label = "estimated hull";
        est.color = "#c23b22";
        est.points = rec.hull->vertices;
        polys.push_back(std::move(est));
    }
    eit::write_text_file(cfg.output_dir + "/hull.svg",
                         eit::svg_overlay_plot("support reconstruction", polys,
                                               eit::output_stamp(cfg)));

    std::cout << "hull with " << rec.hull->vertices.size() << " vertices written to "
              << cfg.output_dir << "/hull.txt\n";
    if (rec.hausdorff_to_true)
        std::cout << "Hausdorff distance to true hull: " << *rec.hausdorff_to_true << "\n";
    return kExitOk;
}

int cmd_verify(const CommonArgs& args, bool flip_normals) {
    eit::ExperimentConfig cfg = load(args);
    print_condition_banner(cfg);
    eit::Mesh m = eit::generate_mesh(cfg.domain, cfg.inclusions, cfg.h_target);
    int p_node = eit::snap_angle_node(m, cfg.p_angle);
    int q_node = eit::snap_angle_node(m, cfg.q_angle);

    eit::SolveOptions opts;
    opts.rel_tol = cfg.tolerances.cg_rel_tol;
    opts.mean_rel_tol = cfg.tolerances.mean_rel_tol;

    std::vector<std::pair<std::string, double>> weak;
    {
        eit::DipoleField dip = eit::build_dipole(m, cfg.inclusions, p_node, q_node, opts);
        for (const auto& phi : eit::standard_test_functions())
            weak.push_back({phi.name, eit::verify_weak_form(m, cfg.inclusions, dip, phi)});
    }

    std::vector<eit::ProbeParams> probes;
    eit::Direction d0 = eit::Direction::from_angle(0.0);
    for (double tau : cfg.tau_grid)
        if (tau <= 10.0) probes.push_back({d0, tau, 0.0});
    if (probes.empty()) probes.push_back({d0, 2.0, 0.0});
    eit::RepresentationReport rep =
        eit::verify_representation(m, cfg.inclusions, p_node, q_node, probes, opts, cfg.jobs,
                                   flip_normals);

    double vol_gap = 0.0;
    if (!cfg.inclusions.empty()) {
        eit::DipoleField dip = eit::build_dipole(m, cfg.inclusions, p_node, q_node, opts);
        eit::ProbeParams mid{d0, 6.0, 0.0};
        auto vol = eit::rep_formula_volume(m, cfg.inclusions, dip, mid, 0);
        auto bnd = eit::rep_formula_boundary_component(m, cfg.inclusions, dip, mid, 0);
        vol_gap = std::abs(vol - bnd) / std::max(std::abs(bnd), 1e-300);
    }

    double worst_weak = 0.0;
    for (const auto& [name, r] : weak) worst_weak = std::max(worst_weak, r);
    bool empty_gap_ok = cfg.inclusions.empty() || vol_gap <= 0.05;
    bool passed = worst_weak <= 5e-2 &&
                  (cfg.inclusions.empty() || rep.median_rel <= 0.05) && empty_gap_ok;

    std::string path = cfg.output_dir + "/verify.json";
    eit::write_text_file(path, eit::representation_report_json(cfg, rep, weak, vol_gap, passed));
    std::cout << "verification report written to " << path << "\n";
    std::cout << "weak-form worst residual: " << worst_weak
              << ", representation median discrepancy: " << rep.median_rel
              << ", volume/boundary gap: " << vol_gap << "\n";
    if (!passed) {
        std::cerr << "verification FAILED\n";
        return kExitVerification;
    }
    std::cout << "verification passed\n";
    return kExitOk;
}

int cmd_oracle(const CommonArgs& args) {
    eit::ExperimentConfig cfg = load(args);
    eit::DiskPhantom phantom;
    eit::OracleComparisonParams params;
    params.h_target = cfg.h_target;
    params.boundary_resolution = cfg.domain.boundary_resolution;
    params.cg_rel_tol = cfg.tolerances.cg_rel_tol;
    auto rows = eit::compare_fem_oracle(params, phantom);
    std::string path = cfg.output_dir + "/oracle.csv";
    eit::write_oracle_csv(path, cfg, rows);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.rel_error);
    std::cout << "oracle error table written to " << path << " (worst relative error " << worst
              << ")\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"enclosure-method reconstruction bench: forward solver, indicator sweeps, "
                 "support estimation, structural verification"};
    app.require_subcommand(1);

    CommonArgs args;
    bool flip_normals = false;

    CLI::App* mesh = app.add_subcommand("mesh", "generate, validate and write the mesh");
    add_common(mesh, args);
    CLI::App* indicator =
        app.add_subcommand("indicator", "tau sweeps of the indicator; CSV columns: "
                                        "direction_angle, tau, t, re_I, im_I, abs_I, log_abs_I");
    add_common(indicator, args);
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "support table CSV, hull polygon file and SVG overlay");
    add_common(reconstruct, args);
    CLI::App* verify =
        app.add_subcommand("verify", "weak-form and representation-formula verification (JSON)");
    add_common(verify, args);
    verify->add_flag("--flip-normals", flip_normals,
                     "debug: flip inclusion-edge normals to demonstrate the sign test");
    CLI::App* oracle = app.add_subcommand("oracle", "FEM vs analytic disk oracle error table");
    add_common(oracle, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (mesh->parsed()) return cmd_mesh(args);
        if (indicator->parsed()) return cmd_indicator(args);
        if (reconstruct->parsed()) return cmd_reconstruct(args);
        if (verify->parsed()) return cmd_verify(args, flip_normals);
        if (oracle->parsed()) return cmd_oracle(args);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& ex) {
        std::cerr << "numerical failure: " << ex.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

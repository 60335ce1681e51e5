#include "eit/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eit/disk_oracle.hpp"
#include "eit/parallel.hpp"

namespace eit {

std::vector<DirectionPlan> plan_directions(const InclusionSet& incl, int count) {
    std::vector<DirectionPlan> plans;
    plans.reserve((size_t)count);
    const double two_deg = 2.0 * M_PI / 180.0;
    for (int i = 0; i < count; ++i) {
        DirectionPlan p;
        p.requested_angle = 2.0 * M_PI * i / count;
        p.used_angle = p.requested_angle;
        if (!incl.empty() && !is_regular(incl, Direction::from_angle(p.requested_angle))) {
            p.perturbed = true;
            if (is_regular(incl, Direction::from_angle(p.requested_angle + two_deg))) {
                p.used_angle = p.requested_angle + two_deg;
            } else if (is_regular(incl, Direction::from_angle(p.requested_angle - two_deg))) {
                p.used_angle = p.requested_angle - two_deg;
            }
        }
        p.direction = Direction::from_angle(p.used_angle);
        p.regular = incl.empty() ? false : is_regular(incl, p.direction);
        plans.push_back(p);
    }
    return plans;
}

int snap_angle_node(const Mesh& m, double angle) {
    Vec2 p{m.domain.center.x + m.domain.radius * std::cos(angle),
           m.domain.center.y + m.domain.radius * std::sin(angle)};
    return snap_boundary_point(m, p);
}

ReconstructionResult reconstruct_support(const ExperimentConfig& cfg, const Mesh& m) {
    ReconstructionResult rec;
    rec.condition = cfg.geometric_condition();

    int p_node = snap_angle_node(m, cfg.p_angle);
    int q_node = snap_angle_node(m, cfg.q_angle);
    if (p_node == q_node) throw std::invalid_argument("reconstruct: P and Q snap to the same node");

    LinearSystem sys_gamma = assemble(m, ConductivityMap::from_inclusions(cfg.inclusions));
    LinearSystem sys_one =
        assemble(m, ConductivityMap::homogeneous(cfg.inclusions.components.size()));
    SolveOptions opts;
    opts.rel_tol = cfg.tolerances.cg_rel_tol;
    opts.mean_rel_tol = cfg.tolerances.mean_rel_tol;

    std::vector<DirectionPlan> plans = plan_directions(cfg.inclusions, cfg.direction_count);
    const double t0 = cfg.t_values.empty() ? 0.0 : cfg.t_values.front();

    // direction x tau task grid over shared immutable systems
    rec.sweeps.resize(plans.size());
    for (size_t d = 0; d < plans.size(); ++d) {
        rec.sweeps[d].plan = plans[d];
        rec.sweeps[d].samples.resize(cfg.tau_grid.size());
    }
    size_t total = plans.size() * cfg.tau_grid.size();
    parallel_for(total, cfg.jobs, [&](size_t idx) {
        size_t d = idx / cfg.tau_grid.size();
        size_t k = idx % cfg.tau_grid.size();
        ProbeParams params{plans[d].direction, cfg.tau_grid[k], t0};
        auto& slot = rec.sweeps[d].samples[k];
        try {
            slot = indicator(sys_gamma, sys_one, p_node, q_node, params, opts);
        } catch (const std::exception& ex) {
            slot.tau = params.tau;
            slot.t = t0;
            slot.failed = true;
            slot.error = ex.what();
        }
    });

    SlopeFitOptions fit_opts;
    fit_opts.noise_floor = cfg.tolerances.noise_floor;
    for (auto& sweep : rec.sweeps) {
        SupportEntry entry;
        entry.direction = sweep.plan.direction;
        entry.regular = sweep.plan.regular;
        entry.perturbed = sweep.plan.perturbed;
        try {
            SupportEntry fit = estimate_support_slope(sweep.samples, t0, fit_opts);
            entry.h_estimate = fit.h_estimate;
            entry.r_squared = fit.r_squared;
            entry.mu_hat = fit.mu_hat;
            entry.window_tau_min = fit.window_tau_min;
            entry.window_tau_max = fit.window_tau_max;
            entry.method = fit.method;
            entry.trusted = sweep.plan.regular;
        } catch (const std::exception&) {
            entry.below_noise = true;
            entry.trusted = false;
            entry.method = "slope-fit";
        }
        rec.table.entries.push_back(entry);
    }

    rec.inclusion_detected = false;
    for (const auto& e : rec.table.entries)
        if (!e.below_noise) rec.inclusion_detected = true;
    if (!rec.inclusion_detected) return rec; // no spurious hull

    SupportTable usable;
    for (const auto& e : rec.table.entries)
        if (!e.below_noise) usable.entries.push_back(e);
    rec.hull = hull_from_support(usable);
    if (!cfg.inclusions.empty())
        rec.hausdorff_to_true = hausdorff_distance(*rec.hull, convex_hull(cfg.inclusions));
    return rec;
}

namespace {
std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}
} // namespace

void write_indicator_csv(const std::string& path, const ExperimentConfig& cfg,
                         const std::vector<SweepResult>& sweeps) {
    auto os = open_output(path);
    os << "# " << output_stamp(cfg) << "\n";
    if (!cfg.geometric_condition().satisfied)
        os << "# WARNING: geometric condition diam(D) < dist(D, boundary) violated; no guarantee\n";
    os << "direction_angle,tau,t,re_I,im_I,abs_I,log_abs_I\n";
    for (const auto& sweep : sweeps) {
        for (const auto& s : sweep.samples) {
            if (s.failed) continue;
            double a = std::abs(s.value);
            os << format_double(sweep.plan.used_angle) << ',' << format_double(s.tau) << ','
               << format_double(s.t) << ',' << format_double(s.value.real()) << ','
               << format_double(s.value.imag()) << ',' << format_double(a) << ','
               << format_double(a > 0 ? std::log(a) : -std::numeric_limits<double>::infinity())
               << "\n";
        }
    }
}

void write_support_csv(const std::string& path, const ExperimentConfig& cfg,
                       const ReconstructionResult& rec) {
    auto os = open_output(path);
    os << "# " << output_stamp(cfg) << "\n";
    if (!rec.condition.satisfied)
        os << "# WARNING: geometric condition diam(D) < dist(D, boundary) violated; no guarantee\n";
    if (!rec.inclusion_detected) os << "# no inclusion detected\n";
    os << "direction_angle,h_estimate,regular,perturbed,trusted,below_noise,r_squared,mu_hat,"
          "window_tau_min,window_tau_max,method\n";
    for (const auto& e : rec.table.entries) {
        os << format_double(e.direction.angle()) << ',' << format_double(e.h_estimate) << ','
           << (e.regular ? 1 : 0) << ',' << (e.perturbed ? 1 : 0) << ',' << (e.trusted ? 1 : 0)
           << ',' << (e.below_noise ? 1 : 0) << ',' << format_double(e.r_squared) << ','
           << format_double(e.mu_hat) << ',' << format_double(e.window_tau_min) << ','
           << format_double(e.window_tau_max) << ',' << e.method << "\n";
    }
}

void write_hull_file(const std::string& path, const ExperimentConfig& cfg, const Polygon& hull) {
    auto os = open_output(path);
    os << "# " << output_stamp(cfg) << "\n";
    os << "HULL " << hull.vertices.size() << "\n";
    for (const auto& v : hull.vertices)
        os << format_double(v.x) << ' ' << format_double(v.y) << "\n";
}

void write_oracle_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<OracleComparisonRow>& rows) {
    auto os = open_output(path);
    os << "# " << output_stamp(cfg) << "\n";
    os << "mode,theta_p,theta_q,fem_re,fem_im,oracle_re,rel_error\n";
    for (const auto& r : rows) {
        os << r.mode << ',' << format_double(r.theta_p) << ',' << format_double(r.theta_q) << ','
           << format_double(r.fem.real()) << ',' << format_double(r.fem.imag()) << ','
           << format_double(r.oracle.real()) << ',' << format_double(r.rel_error) << "\n";
    }
}

std::string representation_report_json(const ExperimentConfig& cfg,
                                       const RepresentationReport& rep,
                                       const std::vector<std::pair<std::string, double>>& weak_form,
                                       double volume_boundary_gap, bool passed) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"tool\": \"eitrec " << kToolVersion << "\",\n";
    os << "  \"config_hash\": \"" << config_hash(cfg) << "\",\n";
    os << "  \"mesh_h_target\": " << format_double(cfg.h_target) << ",\n";
    os << "  \"boundary_resolution\": " << cfg.domain.boundary_resolution << ",\n";
    os << "  \"weak_form_residuals\": {";
    for (size_t i = 0; i < weak_form.size(); ++i) {
        os << (i ? ", " : "") << "\"" << weak_form[i].first << "\": "
           << format_double(weak_form[i].second);
    }
    os << "},\n";
    os << "  \"representation_probes\": [\n";
    for (size_t i = 0; i < rep.probes.size(); ++i) {
        const auto& r = rep.probes[i];
        os << "    {\"tau\": " << format_double(r.tau) << ", \"t\": " << format_double(r.t)
           << ", \"forward_re\": " << format_double(r.forward.real())
           << ", \"forward_im\": " << format_double(r.forward.imag())
           << ", \"dipole_re\": " << format_double(r.dipole.real())
           << ", \"dipole_im\": " << format_double(r.dipole.imag())
           << ", \"rel_discrepancy\": " << format_double(r.rel_discrepancy) << "}"
           << (i + 1 < rep.probes.size() ? "," : "") << "\n";
    }
    os << "  ],\n";
    os << "  \"representation_max_rel\": " << format_double(rep.max_rel) << ",\n";
    os << "  \"representation_median_rel\": " << format_double(rep.median_rel) << ",\n";
    os << "  \"volume_boundary_gap\": " << format_double(volume_boundary_gap) << ",\n";
    os << "  \"passed\": " << (passed ? "true" : "false") << "\n";
    os << "}\n";
    return os.str();
}

} // namespace eit

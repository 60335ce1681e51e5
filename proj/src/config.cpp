#include "eit/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace eit {

using nlohmann::json;

void ExperimentConfig::validate() const {
    domain.validate();
    if (!inclusions.empty()) inclusions.validate();
    if (tau_grid.empty()) throw std::invalid_argument("config: tau_grid must not be empty");
    for (size_t i = 0; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > 0)) throw std::invalid_argument("config: tau values must be positive");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
            throw std::invalid_argument("config: tau_grid must be strictly increasing");
    }
    if (!(bisection_tau_low > 0) || !(bisection_tau_high > bisection_tau_low))
        throw std::invalid_argument("config: bisection tau pair must satisfy 0 < low < high");
    if (direction_count < 3) throw std::invalid_argument("config: direction_count must be >= 3");
    if (!(h_target > 0)) throw std::invalid_argument("config: h_target must be positive");
    if (h_target >= 2.0 * domain.radius) throw std::invalid_argument("config: h_target larger than domain");
    for (const auto& c : inclusions.components)
        if (h_target >= c.shape.shortest_edge())
            throw std::invalid_argument("config: h_target must be smaller than the shortest inclusion edge");
    if (!inclusions.empty() && domain.clearance(inclusions) <= 0.0)
        throw std::invalid_argument("config: inclusions must lie strictly inside the domain");
    if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
    if (!(tolerances.cg_rel_tol > 0) || !(tolerances.noise_floor > 0))
        throw std::invalid_argument("config: tolerances must be positive");
}

GeometricCondition ExperimentConfig::geometric_condition() const {
    if (inclusions.empty()) return GeometricCondition{true, 0.0, domain.radius};
    return check_geometric_condition(inclusions, domain);
}

namespace {

json vec2_to_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("config: expected [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["domain"] = {{"center", vec2_to_json(cfg.domain.center)},
                   {"radius", cfg.domain.radius},
                   {"boundary_resolution", cfg.domain.boundary_resolution}};
    json incl = json::array();
    for (const auto& c : cfg.inclusions.components) {
        json verts = json::array();
        for (const auto& v : c.shape.vertices) verts.push_back(vec2_to_json(v));
        incl.push_back({{"vertices", verts}, {"conductivity", c.conductivity}});
    }
    j["inclusions"] = incl;
    j["p_angle"] = cfg.p_angle;
    j["q_angle"] = cfg.q_angle;
    j["tau_grid"] = cfg.tau_grid;
    j["t_values"] = cfg.t_values;
    j["bisection_tau_pair"] = json::array({cfg.bisection_tau_low, cfg.bisection_tau_high});
    j["direction_count"] = cfg.direction_count;
    j["mesh"] = {{"h_target", cfg.h_target}};
    j["tolerances"] = {{"cg_rel_tol", cfg.tolerances.cg_rel_tol},
                       {"mean_rel_tol", cfg.tolerances.mean_rel_tol},
                       {"noise_floor", cfg.tolerances.noise_floor},
                       {"bisection_t_tol", cfg.tolerances.bisection_t_tol},
                       {"dead_band", cfg.tolerances.dead_band}};
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["jobs"] = cfg.jobs;
    return j.dump(2);
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& ex) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + ex.what());
    }
    ExperimentConfig cfg;
    try {
        const auto& jd = j.at("domain");
        if (jd.contains("center")) cfg.domain.center = vec2_from_json(jd.at("center"));
        cfg.domain.radius = jd.value("radius", 1.0);
        cfg.domain.boundary_resolution = jd.value("boundary_resolution", 256);

        cfg.inclusions.components.clear();
        for (const auto& jc : j.value("inclusions", json::array())) {
            InclusionComponent c;
            for (const auto& jv : jc.at("vertices")) c.shape.vertices.push_back(vec2_from_json(jv));
            c.conductivity = jc.at("conductivity").get<double>();
            cfg.inclusions.components.push_back(std::move(c));
        }
        cfg.p_angle = j.value("p_angle", 0.0);
        cfg.q_angle = j.value("q_angle", M_PI);
        if (j.contains("tau_grid")) cfg.tau_grid = j.at("tau_grid").get<std::vector<double>>();
        if (j.contains("t_values")) cfg.t_values = j.at("t_values").get<std::vector<double>>();
        if (j.contains("bisection_tau_pair")) {
            const auto& p = j.at("bisection_tau_pair");
            cfg.bisection_tau_low = p.at(0).get<double>();
            cfg.bisection_tau_high = p.at(1).get<double>();
        }
        cfg.direction_count = j.value("direction_count", 16);
        if (j.contains("mesh")) cfg.h_target = j.at("mesh").value("h_target", 0.05);
        if (j.contains("tolerances")) {
            const auto& jt = j.at("tolerances");
            cfg.tolerances.cg_rel_tol = jt.value("cg_rel_tol", cfg.tolerances.cg_rel_tol);
            cfg.tolerances.mean_rel_tol = jt.value("mean_rel_tol", cfg.tolerances.mean_rel_tol);
            cfg.tolerances.noise_floor = jt.value("noise_floor", cfg.tolerances.noise_floor);
            cfg.tolerances.bisection_t_tol =
                jt.value("bisection_t_tol", cfg.tolerances.bisection_t_tol);
            cfg.tolerances.dead_band = jt.value("dead_band", cfg.tolerances.dead_band);
        }
        cfg.output_dir = j.value("output_dir", std::string("out"));
        cfg.seed = j.value("seed", 0ULL);
        cfg.jobs = j.value("jobs", 1);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& ex) {
        throw std::invalid_argument(std::string("config: invalid schema: ") + ex.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::string canon = config_to_json_text(cfg);
    unsigned long long h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

std::string output_stamp(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "eitrec " << kToolVersion << " config=" << config_hash(cfg) << " seed=" << cfg.seed;
    return os.str();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

} // namespace eit

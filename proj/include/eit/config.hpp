#pragma once

#include <string>
#include <vector>

#include "eit/geometry.hpp"

namespace eit {

inline constexpr const char* kToolVersion = "0.1.0";

struct Tolerances {
    double cg_rel_tol = 1e-12;
    double mean_rel_tol = 1e-2;
    double noise_floor = 1e-10;
    double bisection_t_tol = 0.01;
    double dead_band = 0.10;
};

// Batch experiment description; JSON on disk (angles in radians, lengths in
// domain units).
struct ExperimentConfig {
    DomainSpec domain;
    InclusionSet inclusions;
    double p_angle = 0.0;
    double q_angle = M_PI;
    std::vector<double> tau_grid = {2, 4, 6, 8, 10, 12, 14, 16};
    std::vector<double> t_values = {0.0};
    double bisection_tau_low = 4.0;
    double bisection_tau_high = 12.0;
    int direction_count = 16;
    double h_target = 0.05;
    Tolerances tolerances;
    std::string output_dir = "out";
    unsigned long long seed = 0;
    int jobs = 1;

    void validate() const;

    // condition diam D < dist(D, boundary); a violation is a warning, the
    // reconstruction formulas then carry no guarantee
    GeometricCondition geometric_condition() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON serialization; embedded in every output file
std::string config_hash(const ExperimentConfig& cfg);

// "# eitrec <version> config=<hash> seed=<seed>"
std::string output_stamp(const ExperimentConfig& cfg);

std::string format_double(double v); // 17 significant digits, deterministic

} // namespace eit

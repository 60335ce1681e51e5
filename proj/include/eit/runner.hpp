#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eit/config.hpp"
#include "eit/dipole.hpp"
#include "eit/probe.hpp"

namespace eit {

struct DirectionPlan {
    Direction direction;
    double requested_angle = 0.0;
    double used_angle = 0.0;
    bool regular = true;    // at the used angle
    bool perturbed = false; // non-regular requested angle replaced by +-2 degrees
};

// Uniform direction fan; non-regular directions are perturbed by +-2 degrees
// (first +, then -); still-non-regular ones are kept but flagged.
std::vector<DirectionPlan> plan_directions(const InclusionSet& incl, int count);

struct SweepResult {
    DirectionPlan plan;
    std::vector<IndicatorSample> samples; // one per tau, at common t
};

struct ReconstructionResult {
    SupportTable table;
    std::vector<SweepResult> sweeps;
    bool inclusion_detected = false;
    std::optional<Polygon> hull;
    std::optional<double> hausdorff_to_true; // set when the true shape is known
    GeometricCondition condition;
};

// Full support-scan pipeline: mesh, per-direction tau sweeps at t = 0 in a
// worker pool, slope estimates, bisection cross-checks, hull assembly.
ReconstructionResult reconstruct_support(const ExperimentConfig& cfg, const Mesh& m);

// CSV writers; every file starts with the output stamp comment.
void write_indicator_csv(const std::string& path, const ExperimentConfig& cfg,
                         const std::vector<SweepResult>& sweeps);
void write_support_csv(const std::string& path, const ExperimentConfig& cfg,
                       const ReconstructionResult& rec);
void write_hull_file(const std::string& path, const ExperimentConfig& cfg, const Polygon& hull);
void write_oracle_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<struct OracleComparisonRow>& rows);
std::string representation_report_json(const ExperimentConfig& cfg,
                                       const RepresentationReport& rep,
                                       const std::vector<std::pair<std::string, double>>& weak_form,
                                       double volume_boundary_gap, bool passed);

int snap_angle_node(const Mesh& m, double angle);

} // namespace eit

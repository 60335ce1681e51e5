#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eit/config.hpp"
#include "eit/runner.hpp"
#include "eit/svg.hpp"

using namespace eit;

namespace {

const char* kDiamondConfig = R"json({
  "domain": {"center": [0.0, 0.0], "radius": 1.0, "boundary_resolution": 128},
  "inclusions": [
    {"vertices": [[0.2, 0.0], [0.0, 0.2], [-0.2, 0.0], [0.0, -0.2]], "conductivity": 2.0}
  ],
  "p_angle": 0.0,
  "q_angle": 3.141592653589793,
  "tau_grid": [2, 4, 6, 8],
  "t_values": [0.0],
  "direction_count": 4,
  "mesh": {"h_target": 0.1},
  "output_dir": "out",
  "seed": 7,
  "jobs": 2
})json";

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config round-trip preserves the hash") {
    ExperimentConfig cfg = config_from_json_text(kDiamondConfig);
    CHECK(cfg.domain.boundary_resolution == 128);
    CHECK(cfg.inclusions.components.size() == 1);
    CHECK(cfg.tau_grid.size() == 4);
    CHECK(cfg.seed == 7);

    std::string text = config_to_json_text(cfg);
    ExperimentConfig again = config_from_json_text(text);
    CHECK(config_hash(cfg) == config_hash(again));
    CHECK(output_stamp(cfg).find("eitrec") == 0);
    CHECK(output_stamp(cfg).find("seed=7") != std::string::npos);
}

TEST_CASE("config validation rejects bad setups") {
    // overlapping inclusions
    CHECK_THROWS(config_from_json_text(R"json({
      "domain": {"radius": 1.0, "boundary_resolution": 64},
      "inclusions": [
        {"vertices": [[-0.2,-0.2],[0.2,-0.2],[0.2,0.2],[-0.2,0.2]], "conductivity": 2.0},
        {"vertices": [[0.0,0.0],[0.4,0.0],[0.4,0.4],[0.0,0.4]], "conductivity": 3.0}
      ],
      "mesh": {"h_target": 0.05}
    })json"));

    // h_target too large for the inclusion edges
    CHECK_THROWS(config_from_json_text(R"json({
      "domain": {"radius": 1.0, "boundary_resolution": 64},
      "inclusions": [
        {"vertices": [[0.2,0.0],[0.0,0.2],[-0.2,0.0],[0.0,-0.2]], "conductivity": 2.0}
      ],
      "mesh": {"h_target": 0.5}
    })json"));

    // malformed JSON
    CHECK_THROWS(config_from_json_text("{ not json"));
}

TEST_CASE("geometric condition reported as a warning state, not an error") {
    ExperimentConfig cfg = config_from_json_text(R"json({
      "domain": {"radius": 1.0, "boundary_resolution": 64},
      "inclusions": [
        {"vertices": [[0.6,-0.35],[0.6,0.35],[-0.6,0.35],[-0.6,-0.35]], "conductivity": 2.0}
      ],
      "mesh": {"h_target": 0.1}
    })json");
    auto gc = cfg.geometric_condition();
    CHECK_FALSE(gc.satisfied); // diam 1.39 > dist 0.31, still a valid config
}

TEST_CASE("deterministic CSV output: identical config and seed, byte-identical files") {
    ExperimentConfig cfg = config_from_json_text(kDiamondConfig);
    auto dir = std::filesystem::temp_directory_path() / "eitrec_det_test";
    std::filesystem::create_directories(dir);

    Mesh m = generate_mesh(cfg.domain, cfg.inclusions, cfg.h_target);
    auto run = [&](const std::string& name) {
        ReconstructionResult rec = reconstruct_support(cfg, m);
        std::string path = (dir / name).string();
        write_support_csv(path, cfg, rec);
        write_indicator_csv((dir / ("i_" + name)).string(), cfg, rec.sweeps);
        return slurp(path) + slurp((dir / ("i_" + name)).string());
    };
    std::string a = run("a.csv");
    std::string b = run("b.csv");
    CHECK(a == b);
    CHECK(a.find(config_hash(cfg)) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("svg writers produce well-formed minimal documents") {
    SvgSeries s;
    s.label = "demo";
    s.points = {{0, 0}, {1, 1}, {2, 0.5}};
    std::string plot = svg_line_plot("title", "x", "y", {s}, "stamp-test");
    CHECK(plot.find("<svg") != std::string::npos);
    CHECK(plot.find("stamp-test") != std::string::npos);
    CHECK(plot.find("polyline") != std::string::npos);
    CHECK(plot.rfind("</svg>\n") == plot.size() - 7);

    SvgPolygon p;
    p.label = "hull";
    p.points = {{0, 0}, {1, 0}, {0.5, 1}};
    std::string overlay = svg_overlay_plot("overlay", {p}, "stamp-test");
    CHECK(overlay.find("polygon") != std::string::npos);
}

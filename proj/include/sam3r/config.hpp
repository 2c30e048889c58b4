#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sam3r/detection.hpp"
#include "sam3r/los.hpp"
#include "sam3r/schedule.hpp"

namespace sam3r {

// One JSON document drives the whole pipeline; every constant the source
// material leaves open lives here with its default.
struct ToolkitConfig {
    std::string config_hash;  // FNV-1a of the raw config bytes, hex
    std::uint64_t seed = 0;
    bool has_seed = false;

    struct Paths {
        std::filesystem::path dsm_csv;
        std::filesystem::path catalog;         // optional; builtin catalog otherwise
        std::filesystem::path schedule;        // generated or external schedule CSV
        std::filesystem::path surge_schedule;  // robustness traffic scenario
        std::filesystem::path scenario;        // resiliency scenario JSON
        std::filesystem::path plan;            // existing plan for augmentation
        std::filesystem::path out_dir = ".";
    } paths;

    // terrain
    double grid_cell_m = 50.0;
    double reclassify_radius_m = 30.0;

    // los + detection chain
    DecayShape decay;
    LosParams los;
    AcousticParams acoustic = AcousticParams::defaults();
    NetworkReliabilityParams net;

    // planners
    double reliability_target = 0.95;  // H
    bool per_aircraft_rows = false;
    double sigma = 0.9;
    int max_vert = 6;
    double site_spacing_m = 500.0;
    double mast_height_m = 10.0;
    int site_capacity = 10;
    std::vector<double> plot_thresholds = {0.80, 0.85, 0.90, 0.95, 0.99};

    // schedule generation
    TrajectoryOptions trajectory;
    DemandProfile demand;
    std::array<TemporalDistribution, kNumUseCases> distributions = {
        TemporalDistribution::air_metro_default(), TemporalDistribution::emergency_default(),
        TemporalDistribution::cargo_default()};
    std::optional<CorridorPath> corridor;

    // solver budgets
    std::uint64_t node_budget = 2000000;
    std::uint64_t exhaustive_budget = 1u << 22;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Relative paths in the file resolve against the config's directory.
ToolkitConfig load_config(const std::filesystem::path& path);

}  // namespace sam3r

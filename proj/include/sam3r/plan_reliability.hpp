#pragma once

#include <vector>

#include "sam3r/detection.hpp"
#include "sam3r/ip.hpp"
#include "sam3r/schedule.hpp"

namespace sam3r {

struct DeploymentPlan {
    // sets[i][s]: installed sets of type s at site i (n_i^s).
    std::vector<std::vector<int>> sets;
    std::vector<uint8_t> active;  // beta_i
    double total_cost = 0.0;      // Z
    // Achieved reliability per step; steps with no traffic report 0 and are
    // exempt from the threshold.
    std::vector<double> achieved;
    double min_achieved = 0.0;  // over steps with traffic (1.0 if none)

    int total_sets() const;
    int total_sensors(const std::vector<SensorSpec>& catalog) const;
};

struct ReliabilityOptions {
    double target = 0.95;  // H
    // One aggregate row per step (the model as formulated) or one row per
    // (aircraft, step) for comparison runs.
    bool per_aircraft_rows = false;
    std::uint64_t node_budget = 2000000;
};

// Candidate sites sampled along the corridor at fixed spacing. Site altitude
// comes from the terrain's local ground estimate when available.
std::vector<CandidateSite> sample_candidate_sites(const CorridorPath& corridor,
                                                  double spacing_m, double mast_height_m,
                                                  int capacity, const TerrainCloud* cloud,
                                                  double ground_radius_m = 30.0);

// Minimum-cost placement meeting the reliability threshold: objective
// sum(c_s * C_s * n_i^s); per-step pooled log-miss rows; site capacity,
// linking and min-deployment rows.
IntegerProgram build_reliability_model(const DetectionTensor& tensor,
                                       const std::vector<SensorSpec>& catalog,
                                       const std::vector<CandidateSite>& sites,
                                       const ReliabilityOptions& opts);

DeploymentPlan plan_reliability(const DetectionTensor& tensor,
                                const std::vector<SensorSpec>& catalog,
                                const std::vector<CandidateSite>& sites,
                                const ReliabilityOptions& opts);

// Achieved per-step reliability rho_u(t) * (1 - prod m^(n_i^s)) recomputed
// directly from the tensor, independent of the solver. In per-aircraft mode
// the step value is the minimum over aircraft present at that step.
std::vector<double> validate_plan(const DeploymentPlan& plan, const DetectionTensor& tensor,
                                  bool per_aircraft_rows = false);

}  // namespace sam3r

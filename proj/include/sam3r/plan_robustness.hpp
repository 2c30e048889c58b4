#pragma once

#include <vector>

#include "sam3r/detection.hpp"
#include "sam3r/ip.hpp"
#include "sam3r/plan_reliability.hpp"

namespace sam3r {

// Inputs to the augmentation model. theta holds the per-unit miss
// probability of a hypothetical sensor of type s at site i against aircraft
// k at step t (same chain as the detection tensor; 1 when out of range).
struct RobustnessParams {
    double sigma = 0.9;  // per-aircraft detection threshold
    std::vector<double> R_u;  // server reliability per step
    int max_vert = 6;         // MaxVert
    std::vector<int> vert;            // vert_s per type
    std::vector<int> max_sets;        // MaxSets_s per type
    std::vector<double> unit_cost;    // cost_s per type
    int num_sites = 0, num_types = 0, num_aircraft = 0, num_steps = 0;
    std::vector<double> theta;        // (i,s,k,t), row-major like the tensor
    std::vector<uint8_t> present;     // (k,t)

    double theta_at(int i, int s, int k, int t) const {
        return theta[((static_cast<std::size_t>(i) * num_types + s) * num_aircraft + k) *
                         num_steps + t];
    }
    bool present_at(int k, int t) const { return present[k * num_steps + t] != 0; }
    void validate() const;
};

RobustnessParams robustness_params_from_tensor(const DetectionTensor& tensor,
                                               const std::vector<SensorSpec>& catalog,
                                               double sigma, int max_vert);

struct AugmentationPlan {
    std::vector<std::vector<int>> n_exist, n_add, n_total;  // [site][type]
    std::vector<uint8_t> active;                            // beta
    double add_cost = 0.0;
};

// Minimum-cost additional sensors keeping every present (aircraft, step)
// above the detection threshold, with existing sensors held fixed.
IntegerProgram build_robustness_model(const DeploymentPlan& existing,
                                      const RobustnessParams& params);

AugmentationPlan augment(const DeploymentPlan& existing, const RobustnessParams& params,
                         std::uint64_t node_budget = 2000000);

struct AugmentationRow {
    int aircraft = 0;
    int step = 0;
    bool present = false;
    double lhs = 0.0;  // sum n_total * log(theta)
    double rhs = 0.0;  // log(1 - sigma / R_u)
    bool satisfied = true;
};

struct AugmentationCheck {
    bool ok = true;
    std::vector<AugmentationRow> rows;  // one per (aircraft, step)
};

// Direct recheck of every coverage row without the solver.
AugmentationCheck validate_augmentation(const AugmentationPlan& plan,
                                        const RobustnessParams& params);

}  // namespace sam3r

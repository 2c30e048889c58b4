#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sam3r/geo.hpp"
#include "sam3r/ip.hpp"

namespace sam3r {

struct Hub {
    int id = 0;
    GeoPoint position;
};

enum class BackupPlatform { UAV, GroundVehicle };

struct BackupUnit {
    int id = 0;
    std::string name;
    BackupPlatform platform = BackupPlatform::UAV;
    double detect_prob = 0.9;  // prob_b
    double speed_mps = 15.0;
    int home_hub = -1;         // hub id; must be set before scheduling
    double range_m = 0.0;      // informational
    int tracking_capacity = -1;  // informational, -1 = unlimited
    std::string prob_note;     // flags midpoint choices for spans

    void validate() const;
};

// Table of commercial backup sensor units (no home hubs assigned). Span
// detection probabilities are recorded at their midpoint (see prob_note).
std::vector<BackupUnit> builtin_backup_catalog();

struct FailedPrimary {
    int site_id = 0;
    GeoPoint position;
    int fail_step = 0;     // fail_times[o]
    int repair_steps = 1;  // repair_times[o]
};

struct FailureScenario {
    std::vector<FailedPrimary> primaries;
    int horizon = 0;  // |T|
    double step_seconds = 600.0;
    double ground_detour_factor = 1.4;

    void validate() const;
    // Failure window [fail_step, fail_end): truncated at the horizon.
    int fail_end(int o) const;
    bool failed_at(int o, int t) const;
};

// Travel steps from every hub to every failed primary for one unit.
// UAVs fly straight lines; ground vehicles get a road-detour factor.
// Always at least 1 step.
struct TravelTimes {
    std::vector<std::vector<int>> steps;  // [hub][primary]
};
TravelTimes compute_travel_times(const std::vector<Hub>& hubs,
                                 const std::vector<FailedPrimary>& primaries,
                                 const BackupUnit& unit, double step_seconds,
                                 double ground_detour_factor);

struct DispatchDecision {
    int backup = 0;   // index into the backups list
    int hub = 0;      // index into the hubs list
    int primary = 0;  // index into scenario.primaries
    int step = 0;
};

struct ActiveDecision {
    int backup = 0;
    int primary = 0;
    int step = 0;
};

struct DispatchSchedule {
    std::vector<DispatchDecision> dispatches;
    std::vector<ActiveDecision> actives;
    double objective = 0.0;
};

struct ResiliencyModel {
    IntegerProgram ip;
    std::vector<DispatchDecision> dispatch_vars;  // variable i <-> dispatch_vars[i]
    std::vector<ActiveDecision> active_vars;      // after the dispatch block
    std::vector<TravelTimes> travel;              // per backup
};

ResiliencyModel build_resiliency_model(const FailureScenario& scenario,
                                       const std::vector<Hub>& hubs,
                                       const std::vector<BackupUnit>& backups);

DispatchSchedule schedule_backups(const FailureScenario& scenario, const std::vector<Hub>& hubs,
                                  const std::vector<BackupUnit>& backups,
                                  std::uint64_t node_budget = 4000000);

// The dispatch model's constraint families, mirrored by the validator.
enum class DispatchRule {
    ActivationLink,     // active service requires an already-arrived dispatch
    ServiceWindow,      // dispatch and service confined to the failure window
    ExclusiveDispatch,  // no re-dispatch while a served failure is under repair
    SingleAssignment,   // at most one active primary per unit per step
    SingleDispatch,     // at most one dispatch per unit-failure pair
    Coverage,           // every failure receives a dispatch
};
const char* dispatch_rule_name(DispatchRule r);

struct ScheduleViolation {
    DispatchRule rule = DispatchRule::Coverage;
    std::string detail;
};

struct ScheduleCheck {
    bool ok = true;
    std::vector<ScheduleViolation> violations;
};

// Re-evaluates each constraint family directly on the schedule.
ScheduleCheck validate_schedule(const DispatchSchedule& schedule,
                                const FailureScenario& scenario, const std::vector<Hub>& hubs,
                                const std::vector<BackupUnit>& backups);

struct DispatchSummaryRow {
    std::string unit;
    int hub_id = 0;
    int site_id = 0;
    int dispatch_step = 0;
    int travel_steps = 0;
    int arrival_step = 0;
    int active_start = -1;
    int active_end = -1;  // inclusive
    int active_periods = 0;
};

std::vector<DispatchSummaryRow> summarize(const DispatchSchedule& schedule,
                                          const FailureScenario& scenario,
                                          const std::vector<Hub>& hubs,
                                          const std::vector<BackupUnit>& backups);

// Scenario JSON: hubs, backups, failed primaries with fail/repair steps.
struct ResiliencyScenario {
    FailureScenario scenario;
    std::vector<Hub> hubs;
    std::vector<BackupUnit> backups;
};
ResiliencyScenario load_scenario_json(const std::filesystem::path& path);
void save_scenario_json(const ResiliencyScenario& sc, const std::filesystem::path& path);

// Gantt-style CSV (unit, site, start, end) of active service intervals.
void write_gantt_csv(const DispatchSchedule& schedule, const FailureScenario& scenario,
                     const std::vector<Hub>& hubs, const std::vector<BackupUnit>& backups,
                     std::ostream& out);

}  // namespace sam3r

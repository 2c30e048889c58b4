#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sam3r/detection.hpp"
#include "sam3r/plan_reliability.hpp"
#include "sam3r/plan_resiliency.hpp"
#include "sam3r/plan_robustness.hpp"

namespace sam3r {

// Every artifact carries the config hash and seed so identical inputs
// reproduce identical bytes.
struct ArtifactMeta {
    std::string config_hash;
    std::uint64_t seed = 0;
};

void write_plan_json(const DeploymentPlan& plan, const std::vector<SensorSpec>& catalog,
                     const std::vector<CandidateSite>& sites, double target,
                     const ArtifactMeta& meta, const std::filesystem::path& path);

// Rebuilds the sets matrix against the given catalog/site list; entries in
// the file are matched by site id and sensor type id.
DeploymentPlan load_plan_json(const std::filesystem::path& path,
                              const std::vector<SensorSpec>& catalog,
                              const std::vector<CandidateSite>& sites);

void write_augmentation_json(const AugmentationPlan& plan,
                             const std::vector<SensorSpec>& catalog,
                             const std::vector<CandidateSite>& sites, double sigma,
                             const ArtifactMeta& meta, const std::filesystem::path& path);

AugmentationPlan load_augmentation_json(const std::filesystem::path& path,
                                        const std::vector<SensorSpec>& catalog,
                                        const std::vector<CandidateSite>& sites);

void write_dispatch_json(const DispatchSchedule& schedule, const FailureScenario& scenario,
                         const std::vector<Hub>& hubs, const std::vector<BackupUnit>& backups,
                         const ArtifactMeta& meta, const std::filesystem::path& path);

DispatchSchedule load_dispatch_json(const std::filesystem::path& path,
                                    const FailureScenario& scenario,
                                    const std::vector<Hub>& hubs,
                                    const std::vector<BackupUnit>& backups);

// GeoJSON FeatureCollections. Roles: existing | added | backup-hub.
std::string plan_geojson(const DeploymentPlan& plan, const std::vector<SensorSpec>& catalog,
                         const std::vector<CandidateSite>& sites, const ArtifactMeta& meta);
std::string augmentation_geojson(const AugmentationPlan& plan,
                                 const std::vector<SensorSpec>& catalog,
                                 const std::vector<CandidateSite>& sites,
                                 const ArtifactMeta& meta);
std::string hubs_geojson(const std::vector<Hub>& hubs, const ArtifactMeta& meta);

struct PlotPoint {
    double threshold = 0.0;
    int sensor_count = 0;
    double total_cost = 0.0;
};

// (threshold, sensor count, total cost) series for one corridor.
void write_plot_csv(const std::string& corridor, const std::vector<PlotPoint>& points,
                    const ArtifactMeta& meta, const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sam3r

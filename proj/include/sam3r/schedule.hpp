#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sam3r/geo.hpp"

namespace sam3r {

enum class UseCase : int { AirMetro = 0, Emergency = 1, Cargo = 2 };
constexpr int kNumUseCases = 3;
const char* use_case_name(UseCase u);

struct CorridorPath {
    std::string name;
    std::vector<GeoPoint> waypoints;          // altitude ignored
    std::vector<double> cumulative_length_m;  // per waypoint, strictly increasing

    // Computes cumulative lengths in a frame centered on the waypoint centroid.
    static CorridorPath from_waypoints(std::string name, std::vector<GeoPoint> waypoints);

    double length_m() const { return cumulative_length_m.back(); }
    // Point at arc length s from the first waypoint (clamped to [0, length]).
    GeoPoint point_at(double s) const;
};

struct DemandProfile {
    int air_metro = 0;
    int emergency = 0;
    int cargo = 0;

    int for_use_case(UseCase u) const;
};

struct TemporalDistribution {
    enum class Kind { Bimodal, Trimodal };
    Kind kind = Kind::Bimodal;
    std::vector<double> mode_centers;  // hour of day
    std::vector<double> mode_weights;  // nonnegative, sum to 1
    double spread_hours = 1.5;

    void validate() const;
    double density(double hour) const;

    static TemporalDistribution air_metro_default();  // trimodal commute peaks
    static TemporalDistribution emergency_default();  // late morning + evening
    static TemporalDistribution cargo_default();      // business-day bimodal
};

// Apportions daily_count across hours [start_hour, end_hour) proportionally to
// the mixture density, using largest-remainder rounding; sums exactly to
// daily_count.
std::vector<int> hourly_allocation(int daily_count, const TemporalDistribution& dist,
                                   int start_hour, int end_hour);

struct FlightSchedule {
    double step_seconds = 600.0;
    std::vector<double> step_time_s;  // seconds from midnight, uniformly spaced
    std::vector<std::string> aircraft_names;
    std::vector<UseCase> aircraft_use_case;
    // positions[a][t]; nullopt = not en route at that step
    std::vector<std::vector<std::optional<GeoPoint>>> positions;

    int num_aircraft() const { return static_cast<int>(aircraft_names.size()); }
    int num_steps() const { return static_cast<int>(step_time_s.size()); }
    bool present(int a, int t) const { return positions[a][t].has_value(); }
};

struct TrajectoryOptions {
    double speed_mps = 45.0;
    double step_seconds = 600.0;
    double cruise_alt_m = 121.92;  // 400 ft
    int window_start_hour = 9;
    int window_end_hour = 18;
    std::uint64_t seed = 0;
};

struct HourlyCounts {
    int start_hour = 9;
    std::vector<int> counts;
};

// Each flight departs at a seeded-random minute within its hour (snapped to
// the next schedule step), alternates corridor direction per use case, and
// flies the polyline at constant speed and cruise altitude. Flights are
// packed into reusable logical aircraft slots per use case.
FlightSchedule generate_trajectories(const CorridorPath& corridor,
                                     const std::array<HourlyCounts, kNumUseCases>& hourly,
                                     const TrajectoryOptions& opts);

// Allocation + generation in one call.
FlightSchedule build_schedule(const CorridorPath& corridor, const DemandProfile& demand,
                              const std::array<TemporalDistribution, kNumUseCases>& dists,
                              const TrajectoryOptions& opts);

// Table-style schedule CSV: first column "Time" as H:MM, one column per
// aircraft holding "lon, lat, alt_ft" (quoted) or "-" when absent.
void write_schedule_csv(const FlightSchedule& schedule, std::ostream& out);
FlightSchedule parse_schedule_csv(std::istream& in);
FlightSchedule parse_schedule_csv_file(const std::filesystem::path& path);

}  // namespace sam3r

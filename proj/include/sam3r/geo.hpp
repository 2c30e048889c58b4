#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sam3r {

constexpr double kFeetToMeters = 0.3048;
constexpr double kMetersPerDegLat = 111320.0;

struct GeoPoint {
    double lon_deg = 0.0;
    double lat_deg = 0.0;
    double alt_m = 0.0;
};

// LAS classification codes as they appear in the DSM CSVs.
enum class TerrainClass : int {
    Unclassified = 1,
    Ground = 2,
    LowVegetation = 3,
    MediumVegetation = 4,
    HighVegetation = 5,
    Building = 6,
};

bool is_valid_terrain_class(int code);
const char* terrain_class_name(TerrainClass c);

struct TerrainPoint {
    GeoPoint position;
    TerrainClass cls = TerrainClass::Unclassified;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

// Equirectangular projection about a fixed origin. Good to well under 0.5%
// against great-circle distances at the <= few-km scales LOS cares about.
struct LocalFrame {
    GeoPoint origin;
    double m_per_deg_lat = kMetersPerDegLat;
    double m_per_deg_lon = kMetersPerDegLat;  // m_per_deg_lat * cos(origin latitude)

    static LocalFrame centered_at(const GeoPoint& origin);

    Vec3 to_local(const GeoPoint& g) const {
        return {(g.lon_deg - origin.lon_deg) * m_per_deg_lon,
                (g.lat_deg - origin.lat_deg) * m_per_deg_lat, g.alt_m};
    }
    GeoPoint to_geo(const Vec3& v) const {
        return {origin.lon_deg + v.x / m_per_deg_lon, origin.lat_deg + v.y / m_per_deg_lat, v.z};
    }
};

// Classified point cloud in a local metric frame with a uniform XY grid index.
// Immutable after construction; safe for concurrent reads.
class TerrainCloud {
public:
    TerrainCloud() = default;
    static TerrainCloud build(std::vector<TerrainPoint> points, double grid_cell_m = 50.0);

    const std::vector<TerrainPoint>& points() const { return points_; }
    const std::vector<Vec3>& local_xyz() const { return local_; }
    const LocalFrame& frame() const { return frame_; }
    double grid_cell_m() const { return cell_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    // Ids of every point whose XY projection might lie within `radius` of
    // segment ab's XY projection. Guaranteed superset; callers re-filter.
    std::vector<int> query_cylinder(const Vec3& a, const Vec3& b, double radius) const;

    // Ids of points within `radius` (XY) of (x, y).
    std::vector<int> query_disk(double x, double y, double radius) const;

    // Minimum Ground-class altitude within `radius` of (x,y); falls back to
    // the nearest Ground point anywhere. nullopt if the cloud has no Ground.
    std::optional<double> ground_altitude(double x, double y, double radius) const;

private:
    std::vector<TerrainPoint> points_;
    std::vector<Vec3> local_;
    LocalFrame frame_;
    double cell_ = 50.0;
    double min_x_ = 0.0, min_y_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;

    int cell_index(int cx, int cy) const { return cy * nx_ + cx; }
};

// DSM CSV: header "Longitude,Latitude,Altitude_ft,Classification", one point
// per line, altitude in feet (converted to meters on ingest).
TerrainCloud parse_dsm_csv(std::istream& in, double grid_cell_m = 50.0);
TerrainCloud parse_dsm_csv_file(const std::filesystem::path& path, double grid_cell_m = 50.0);
void write_dsm_csv(const TerrainCloud& cloud, std::ostream& out);

// Infers classes 3/4/6 for Unclassified points from height above the local
// ground estimate: <0.5 m -> LowVegetation, 0.5..5 m inclusive ->
// MediumVegetation, >5 m -> Building. Boundary heights (exactly 0.5 / 5.0 m)
// go to MediumVegetation; that assignment is a documented choice, the source
// data only pins the open intervals. Already-classified points are untouched.
TerrainCloud reclassify(const TerrainCloud& cloud, double neighborhood_radius_m = 30.0);

// Versioned binary cache of an indexed cloud (magic "SAM3RTC1").
void save_terrain_cache(const TerrainCloud& cloud, const std::filesystem::path& path);
TerrainCloud load_terrain_cache(const std::filesystem::path& path);

}  // namespace sam3r

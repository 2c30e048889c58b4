#include "sam3r/geo.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "sam3r/errors.hpp"

namespace sam3r {

bool is_valid_terrain_class(int code) { return code >= 1 && code <= 6; }

const char* terrain_class_name(TerrainClass c) {
    switch (c) {
        case TerrainClass::Unclassified: return "Unclassified";
        case TerrainClass::Ground: return "Ground";
        case TerrainClass::LowVegetation: return "LowVegetation";
        case TerrainClass::MediumVegetation: return "MediumVegetation";
        case TerrainClass::HighVegetation: return "HighVegetation";
        case TerrainClass::Building: return "Building";
    }
    return "?";
}

LocalFrame LocalFrame::centered_at(const GeoPoint& origin) {
    LocalFrame f;
    f.origin = origin;
    f.m_per_deg_lat = kMetersPerDegLat;
    f.m_per_deg_lon = kMetersPerDegLat * std::cos(origin.lat_deg * M_PI / 180.0);
    return f;
}

TerrainCloud TerrainCloud::build(std::vector<TerrainPoint> points, double grid_cell_m) {
    if (grid_cell_m <= 0.0) throw ConfigError("grid cell size must be > 0");
    TerrainCloud c;
    c.points_ = std::move(points);
    c.cell_ = grid_cell_m;

    GeoPoint centroid;
    for (const auto& p : c.points_) {
        centroid.lon_deg += p.position.lon_deg;
        centroid.lat_deg += p.position.lat_deg;
        centroid.alt_m += p.position.alt_m;
    }
    if (!c.points_.empty()) {
        const double n = static_cast<double>(c.points_.size());
        centroid.lon_deg /= n;
        centroid.lat_deg /= n;
        centroid.alt_m /= n;
    }
    c.frame_ = LocalFrame::centered_at(centroid);

    c.local_.reserve(c.points_.size());
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    for (std::size_t i = 0; i < c.points_.size(); ++i) {
        Vec3 v = c.frame_.to_local(c.points_[i].position);
        if (i == 0) {
            min_x = max_x = v.x;
            min_y = max_y = v.y;
        } else {
            min_x = std::min(min_x, v.x);
            max_x = std::max(max_x, v.x);
            min_y = std::min(min_y, v.y);
            max_y = std::max(max_y, v.y);
        }
        c.local_.push_back(v);
    }

    c.min_x_ = min_x;
    c.min_y_ = min_y;
    c.nx_ = c.points_.empty() ? 0 : static_cast<int>((max_x - min_x) / c.cell_) + 1;
    c.ny_ = c.points_.empty() ? 0 : static_cast<int>((max_y - min_y) / c.cell_) + 1;
    c.buckets_.assign(static_cast<std::size_t>(c.nx_) * c.ny_, {});
    for (std::size_t i = 0; i < c.local_.size(); ++i) {
        int cx = std::min(c.nx_ - 1, static_cast<int>((c.local_[i].x - min_x) / c.cell_));
        int cy = std::min(c.ny_ - 1, static_cast<int>((c.local_[i].y - min_y) / c.cell_));
        c.buckets_[c.cell_index(cx, cy)].push_back(static_cast<int>(i));
    }
    return c;
}

namespace {

// Squared XY distance from p to segment ab.
double segment_dist2_xy(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
    const double cx = ax + t * vx, cy = ay + t * vy;
    const double dx = px - cx, dy = py - cy;
    return dx * dx + dy * dy;
}

}  // namespace

std::vector<int> TerrainCloud::query_cylinder(const Vec3& a, const Vec3& b, double radius) const {
    std::vector<int> out;
    if (points_.empty()) return out;

    const double x0 = std::min(a.x, b.x) - radius, x1 = std::max(a.x, b.x) + radius;
    const double y0 = std::min(a.y, b.y) - radius, y1 = std::max(a.y, b.y) + radius;
    int cx0 = std::clamp(static_cast<int>(std::floor((x0 - min_x_) / cell_)), 0, nx_ - 1);
    int cx1 = std::clamp(static_cast<int>(std::floor((x1 - min_x_) / cell_)), 0, nx_ - 1);
    int cy0 = std::clamp(static_cast<int>(std::floor((y0 - min_y_) / cell_)), 0, ny_ - 1);
    int cy1 = std::clamp(static_cast<int>(std::floor((y1 - min_y_) / cell_)), 0, ny_ - 1);

    // A bucket is kept if its center is within radius + half the cell diagonal
    // of the segment; that bounds every point the bucket can hold.
    const double keep = radius + cell_ * M_SQRT1_2 + 1e-9;
    const double keep2 = keep * keep;
    for (int cy = cy0; cy <= cy1; ++cy) {
        for (int cx = cx0; cx <= cx1; ++cx) {
            const auto& bucket = buckets_[cell_index(cx, cy)];
            if (bucket.empty()) continue;
            const double ccx = min_x_ + (cx + 0.5) * cell_;
            const double ccy = min_y_ + (cy + 0.5) * cell_;
            if (segment_dist2_xy(ccx, ccy, a.x, a.y, b.x, b.y) > keep2) continue;
            out.insert(out.end(), bucket.begin(), bucket.end());
        }
    }
    return out;
}

std::vector<int> TerrainCloud::query_disk(double x, double y, double radius) const {
    std::vector<int> out;
    if (points_.empty()) return out;
    int cx0 = std::clamp(static_cast<int>(std::floor((x - radius - min_x_) / cell_)), 0, nx_ - 1);
    int cx1 = std::clamp(static_cast<int>(std::floor((x + radius - min_x_) / cell_)), 0, nx_ - 1);
    int cy0 = std::clamp(static_cast<int>(std::floor((y - radius - min_y_) / cell_)), 0, ny_ - 1);
    int cy1 = std::clamp(static_cast<int>(std::floor((y + radius - min_y_) / cell_)), 0, ny_ - 1);
    const double r2 = radius * radius;
    for (int cy = cy0; cy <= cy1; ++cy) {
        for (int cx = cx0; cx <= cx1; ++cx) {
            for (int id : buckets_[cell_index(cx, cy)]) {
                const double dx = local_[id].x - x, dy = local_[id].y - y;
                if (dx * dx + dy * dy <= r2) out.push_back(id);
            }
        }
    }
    return out;
}

std::optional<double> TerrainCloud::ground_altitude(double x, double y, double radius) const {
    double best = std::numeric_limits<double>::infinity();
    for (int id : query_disk(x, y, radius)) {
        if (points_[id].cls == TerrainClass::Ground) best = std::min(best, local_[id].z);
    }
    if (std::isfinite(best)) return best;

    // Fallback: nearest Ground point anywhere.
    double best_d2 = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].cls != TerrainClass::Ground) continue;
        const double dx = local_[i].x - x, dy = local_[i].y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = local_[i].z;
            found = true;
        }
    }
    if (found) return best;
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double_field(std::string_view field, int line_no, const char* what) {
    field = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
        throw ParseError("DSM CSV line " + std::to_string(line_no) + ": bad " + what + " '" +
                         std::string(field) + "'");
    return value;
}

}  // namespace

TerrainCloud parse_dsm_csv(std::istream& in, double grid_cell_m) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("DSM CSV: empty file");
    int line_no = 1;
    while (!line.empty() && line[0] == '#') {  // metadata comment lines
        if (!std::getline(in, line)) throw ParseError("DSM CSV: missing header");
        ++line_no;
    }

    std::array<std::string_view, 4> expect = {"Longitude", "Latitude", "Altitude_ft",
                                              "Classification"};
    {
        std::string_view rest = line;
        for (std::size_t i = 0; i < expect.size(); ++i) {
            auto comma = rest.find(',');
            std::string_view field = trim(rest.substr(0, comma));
            if (field != expect[i])
                throw ParseError("DSM CSV: bad header, expected '" + std::string(expect[i]) +
                                 "', got '" + std::string(field) + "'");
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }

    std::vector<TerrainPoint> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::array<std::string_view, 4> fields;
        std::string_view rest = line;
        for (int i = 0; i < 4; ++i) {
            auto comma = rest.find(',');
            if (i < 3 && comma == std::string_view::npos)
                throw ParseError("DSM CSV line " + std::to_string(line_no) + ": expected 4 fields");
            fields[i] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (!trim(rest).empty())
            throw ParseError("DSM CSV line " + std::to_string(line_no) + ": expected 4 fields");

        TerrainPoint p;
        p.position.lon_deg = parse_double_field(fields[0], line_no, "longitude");
        p.position.lat_deg = parse_double_field(fields[1], line_no, "latitude");
        p.position.alt_m = parse_double_field(fields[2], line_no, "altitude") * kFeetToMeters;
        const double cls = parse_double_field(fields[3], line_no, "classification");
        const int code = static_cast<int>(cls);
        if (cls != code || !is_valid_terrain_class(code))
            throw ParseError("DSM CSV line " + std::to_string(line_no) +
                             ": unknown classification code '" + std::string(trim(fields[3])) + "'");
        p.cls = static_cast<TerrainClass>(code);
        if (p.position.lon_deg < -180.0 || p.position.lon_deg > 180.0 ||
            p.position.lat_deg < -90.0 || p.position.lat_deg > 90.0)
            throw ParseError("DSM CSV line " + std::to_string(line_no) + ": lon/lat out of range");
        points.push_back(p);
    }
    if (points.empty()) throw ParseError("DSM CSV: no data rows");
    return TerrainCloud::build(std::move(points), grid_cell_m);
}

TerrainCloud parse_dsm_csv_file(const std::filesystem::path& path, double grid_cell_m) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open DSM CSV: " + path.string());
    return parse_dsm_csv(in, grid_cell_m);
}

void write_dsm_csv(const TerrainCloud& cloud, std::ostream& out) {
    out << "Longitude,Latitude,Altitude_ft,Classification\n";
    char buf[128];
    for (const auto& p : cloud.points()) {
        std::snprintf(buf, sizeof(buf), "%.8f,%.8f,%.4f,%d\n", p.position.lon_deg,
                      p.position.lat_deg, p.position.alt_m / kFeetToMeters,
                      static_cast<int>(p.cls));
        out << buf;
    }
}

TerrainCloud reclassify(const TerrainCloud& cloud, double neighborhood_radius_m) {
    bool has_ground = false;
    for (const auto& p : cloud.points())
        if (p.cls == TerrainClass::Ground) { has_ground = true; break; }
    if (!has_ground) throw ConfigError("reclassify: no ground reference (no class-2 points)");

    std::vector<TerrainPoint> pts = cloud.points();
    const auto& xyz = cloud.local_xyz();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].cls != TerrainClass::Unclassified) continue;
        auto ground = cloud.ground_altitude(xyz[i].x, xyz[i].y, neighborhood_radius_m);
        const double h = xyz[i].z - *ground;
        if (h < 0.5)
            pts[i].cls = TerrainClass::LowVegetation;
        else if (h <= 5.0)
            pts[i].cls = TerrainClass::MediumVegetation;
        else
            pts[i].cls = TerrainClass::Building;
    }
    return TerrainCloud::build(std::move(pts), cloud.grid_cell_m());
}

namespace {

constexpr char kCacheMagic[8] = {'S', 'A', 'M', '3', 'R', 'T', 'C', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError("terrain cache: truncated file");
}

}  // namespace

void save_terrain_cache(const TerrainCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open terrain cache for writing: " + path.string());
    out.write(kCacheMagic, sizeof(kCacheMagic));
    write_raw(out, cloud.grid_cell_m());
    const uint64_t n = cloud.size();
    write_raw(out, n);
    for (const auto& p : cloud.points()) {
        write_raw(out, p.position.lon_deg);
        write_raw(out, p.position.lat_deg);
        write_raw(out, p.position.alt_m);
        const uint8_t cls = static_cast<uint8_t>(p.cls);
        write_raw(out, cls);
    }
    if (!out) throw ParseError("terrain cache: write failure: " + path.string());
}

TerrainCloud load_terrain_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open terrain cache: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
        throw ParseError("terrain cache: bad magic (expected SAM3RTC1): " + path.string());
    double cell = 0.0;
    read_raw(in, cell);
    uint64_t n = 0;
    read_raw(in, n);
    std::vector<TerrainPoint> pts;
    pts.reserve(n);
    for (uint64_t i = 0; i < n; ++i) {
        TerrainPoint p;
        read_raw(in, p.position.lon_deg);
        read_raw(in, p.position.lat_deg);
        read_raw(in, p.position.alt_m);
        uint8_t cls = 0;
        read_raw(in, cls);
        if (!is_valid_terrain_class(cls))
            throw ParseError("terrain cache: invalid classification code");
        p.cls = static_cast<TerrainClass>(cls);
        pts.push_back(p);
    }
    return TerrainCloud::build(std::move(pts), cell);
}

}  // namespace sam3r

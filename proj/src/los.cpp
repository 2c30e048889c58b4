#include "sam3r/los.hpp"

#include <algorithm>
#include <cmath>

#include "sam3r/errors.hpp"

namespace sam3r {

void RangeDecayParams::validate() const {
    if (!(r > 0.0)) throw ConfigError("range decay: r must be > 0");
    if (!(e >= 0.0)) throw ConfigError("range decay: e must be >= 0");
    if (!(e < r)) throw ConfigError("range decay: e must be < r");
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("range decay: a and b must be > 0");
}

double range_check(const Vec3& sensor, const Vec3& target, const RangeDecayParams& params) {
    const double d = distance(sensor, target);
    if (d <= params.r - params.e) return 1.0;
    if (d < params.r + params.e)
        return std::exp(-params.a * std::pow(d - (params.r - params.e), params.b));
    return 0.0;
}

void LosParams::validate() const {
    if (!(R > 0.0)) throw ConfigError("los: R must be > 0");
    if (!(Z >= 0.0)) throw ConfigError("los: Z must be >= 0");
}

LosDetail geometric_los_detail(const Vec3& sensor, const Vec3& target, const TerrainCloud& cloud,
                               const LosParams& params) {
    LosDetail detail;
    if (sensor.x == target.x && sensor.y == target.y && sensor.z == target.z) return detail;

    const double vx = target.x - sensor.x, vy = target.y - sensor.y;
    const double len = std::hypot(vx, vy);
    const auto& xyz = cloud.local_xyz();

    if (len < 1e-9) {
        // Vertical segment: the interpolated line height degenerates; any point
        // near the shared XY column at or above the lower endpoint blocks.
        const double h = std::min(sensor.z, target.z);
        for (int id : cloud.query_disk(sensor.x, sensor.y, params.R)) {
            ++detail.candidates;
            if (xyz[id].z >= h - params.Z) {
                ++detail.blocked;
                detail.blocked_ids.push_back(id);
            }
        }
    } else {
        for (int id : cloud.query_cylinder(sensor, target, params.R)) {
            const double px = xyz[id].x - sensor.x, py = xyz[id].y - sensor.y;
            const double proj = (px * vx + py * vy) / len;
            if (proj < 0.0 || proj > len) continue;
            const double cx = sensor.x + (proj / len) * vx, cy = sensor.y + (proj / len) * vy;
            const double d_line = std::hypot(xyz[id].x - cx, xyz[id].y - cy);
            if (d_line > params.R) continue;
            ++detail.candidates;
            const double tau = proj / len;
            const double h = sensor.z + tau * (target.z - sensor.z);
            if (xyz[id].z >= h - params.Z) {
                ++detail.blocked;
                detail.blocked_ids.push_back(id);
            }
        }
    }
    if (detail.candidates > 0)
        detail.fraction = 1.0 - static_cast<double>(detail.blocked) / detail.candidates;
    return detail;
}

double geometric_los(const Vec3& sensor, const Vec3& target, const TerrainCloud& cloud,
                     const LosParams& params) {
    return geometric_los_detail(sensor, target, cloud, params).fraction;
}

AcousticParams AcousticParams::defaults() {
    AcousticParams p;
    // R_p midpoints of the tabulated per-class ranges; Unclassified treated as
    // ground. F(omega) held at 0.99 for every class.
    p.R_p = {{TerrainClass::Unclassified, 0.6}, {TerrainClass::Ground, 0.6},
             {TerrainClass::LowVegetation, 0.3}, {TerrainClass::MediumVegetation, 0.2},
             {TerrainClass::HighVegetation, 0.125}, {TerrainClass::Building, 0.95}};
    for (const auto& [cls, rp] : p.R_p) {
        (void)rp;
        p.F_omega[cls] = 0.99;
    }
    return p;
}

void AcousticParams::validate() const {
    if (!(f_hz > 0.0)) throw ConfigError("acoustic: f must be > 0");
    if (!(c_mps > 0.0)) throw ConfigError("acoustic: c must be > 0");
    if (!(delta_m > 0.0)) throw ConfigError("acoustic: delta must be > 0");
    if (!(R > 0.0) || !(Z >= 0.0)) throw ConfigError("acoustic: bad R/Z");
    for (const auto& [cls, f] : F_omega) {
        if (f < 0.975 || f > 0.999)
            throw ConfigError(std::string("acoustic: F(omega) for ") + terrain_class_name(cls) +
                              " outside [0.975, 0.999]");
    }
    // Tabulated reflection-coefficient ranges per class.
    static const std::map<TerrainClass, std::pair<double, double>> kRanges = {
        {TerrainClass::Ground, {0.5, 0.7}},
        {TerrainClass::LowVegetation, {0.2, 0.4}},
        {TerrainClass::MediumVegetation, {0.1, 0.3}},
        {TerrainClass::HighVegetation, {0.05, 0.2}},
        {TerrainClass::Building, {0.9, 1.0}},
    };
    for (const auto& [cls, rp] : R_p) {
        if (rp < 0.0 || rp > 1.0)
            throw ConfigError(std::string("acoustic: R_p for ") + terrain_class_name(cls) +
                              " outside [0, 1]");
        auto it = kRanges.find(cls);
        if (it != kRanges.end() && (rp < it->second.first || rp > it->second.second))
            throw ConfigError(std::string("acoustic: R_p for ") + terrain_class_name(cls) +
                              " outside its tabulated range");
    }
}

double reflection_factor(TerrainClass cls, const AcousticParams& params) {
    auto rp = params.R_p.find(cls);
    auto fo = params.F_omega.find(cls);
    if (rp == params.R_p.end() || fo == params.F_omega.end())
        throw ConfigError(std::string("acoustic: no R_p/F(omega) configured for class ") +
                          terrain_class_name(cls));
    return rp->second + (1.0 - rp->second) * fo->second;
}

AcousticBreakdown acoustic_los_detail(const Vec3& sensor, const Vec3& target,
                                      const TerrainCloud& cloud, const AcousticParams& params) {
    AcousticBreakdown out;
    out.r = distance(sensor, target);
    if (out.r < params.delta_m) {
        out.los = 1.0;
        return out;
    }
    out.wavenumber = 2.0 * M_PI * params.f_hz / params.c_mps;
    out.amplitude = params.amplitude / out.r;

    // Geometric divergence from the direct path length.
    out.G_db = 20.0 * std::log10(std::max(out.r, params.delta_m) / params.d0_m) + params.G_offset_db;

    // Barrier attenuation from the obstructed fraction of the path, softened
    // by the mean reflection factor of the blocking terrain.
    LosParams lp{params.R, params.Z};
    LosDetail det = geometric_los_detail(sensor, target, cloud, lp);
    const double blocked_fraction = 1.0 - det.fraction;
    double mean_q = 1.0;
    if (!det.blocked_ids.empty()) {
        double sum = 0.0;
        for (int id : det.blocked_ids) sum += reflection_factor(cloud.points()[id].cls, params);
        mean_q = sum / static_cast<double>(det.blocked_ids.size());
    }
    out.B_db = params.B_max_db * blocked_fraction * (1.0 - mean_q);

    out.A_tot_db = out.G_db + out.B_db;
    out.los = 1.0 / (1.0 + std::pow(10.0, out.A_tot_db / 20.0));
    return out;
}

double acoustic_los(const Vec3& sensor, const Vec3& target, const TerrainCloud& cloud,
                    const AcousticParams& params) {
    return acoustic_los_detail(sensor, target, cloud, params).los;
}

}  // namespace sam3r

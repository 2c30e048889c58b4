#pragma once

#include <map>
#include <vector>

#include "sam3r/geo.hpp"

namespace sam3r {

// Range feasibility with smooth boundary decay: r is the effective sensing
// range, e the boundary tolerance, a/b the decay rate and exponent.
struct RangeDecayParams {
    double r = 0.0;
    double e = 0.0;
    double a = 1.0;
    double b = 1.0;

    void validate() const;
};

// 1.0 inside r-e, exp(-a*(d-(r-e))^b) in the boundary band, 0.0 beyond r+e.
double range_check(const Vec3& sensor, const Vec3& target, const RangeDecayParams& params);

struct LosParams {
    double R = 25.0;  // horizontal cylinder radius tolerance, meters
    double Z = 2.0;   // vertical tolerance, meters

    void validate() const;
};

struct LosDetail {
    int candidates = 0;
    int blocked = 0;
    std::vector<int> blocked_ids;
    double fraction = 1.0;  // 1 - blocked/candidates (1.0 when no candidates)
};

// Fraction of unobstructed visibility along the sensor->target segment,
// judged against terrain points inside the horizontal cylinder of radius R.
double geometric_los(const Vec3& sensor, const Vec3& target, const TerrainCloud& cloud,
                     const LosParams& params);
LosDetail geometric_los_detail(const Vec3& sensor, const Vec3& target, const TerrainCloud& cloud,
                               const LosParams& params);

// Acoustic propagation: attenuation-driven LOS factor plus the per-class
// ground reflection model Q = R_p + (1-R_p)*F(omega).
struct AcousticParams {
    double f_hz = 1000.0;   // inside the 200..10,000 Hz signature band
    double c_mps = 343.0;
    double amplitude = 1.0;  // A
    double delta_m = 1.0;    // near-field cutoff
    double R = 25.0;
    double Z = 2.0;
    std::map<TerrainClass, double> F_omega;  // boundary loss factor per class
    std::map<TerrainClass, double> R_p;      // ground reflection coefficient per class

    // Attenuation shape; exposed so alternatives are drop-in.
    double d0_m = 1.0;        // geometric divergence reference distance
    double G_offset_db = 11.0;
    double B_max_db = 20.0;

    static AcousticParams defaults();
    void validate() const;
};

double reflection_factor(TerrainClass cls, const AcousticParams& params);

struct AcousticBreakdown {
    double r = 0.0;           // direct 3D distance
    double wavenumber = 0.0;  // k = 2*pi*f/c (diagnostic)
    double amplitude = 0.0;   // |phi| = A/r (diagnostic)
    double G_db = 0.0;
    double B_db = 0.0;
    double A_tot_db = 0.0;
    double los = 1.0;
};

double acoustic_los(const Vec3& sensor, const Vec3& target, const TerrainCloud& cloud,
                    const AcousticParams& params);
AcousticBreakdown acoustic_los_detail(const Vec3& sensor, const Vec3& target,
                                      const TerrainCloud& cloud, const AcousticParams& params);

}  // namespace sam3r

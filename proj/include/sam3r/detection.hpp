#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sam3r/geo.hpp"
#include "sam3r/los.hpp"
#include "sam3r/schedule.hpp"

namespace sam3r {

struct SensorSpec {
    std::string id;     // short type id, e.g. "adsb"
    std::string model;  // manufacturer / model
    bool acoustic = false;
    double unit_cost = 0.0;           // c_s, USD per sensor
    int set_size = 1;                 // C_s, sensors per set
    double range_m = 0.0;             // r_s
    double failure_rate_per_hr = 0.0; // lambda_s
    int vert_units = 1;               // vert_s
    int max_sets = 5;                 // M_s / MaxSets_s
    int tracking_capacity = -1;       // informational; -1 = unlimited
    double fov_az_deg = 360.0;        // informational
    double fov_el_deg = 180.0;        // informational
    std::string range_note;           // flags span-range scalar choices

    void validate() const;
};

// The six commercial primary sensor types bundled with the toolkit. Span
// detection ranges are recorded at their lower bound (see range_note).
std::vector<SensorSpec> builtin_primary_catalog();

std::vector<SensorSpec> load_catalog_json(const std::filesystem::path& path);
void save_catalog_json(const std::vector<SensorSpec>& catalog,
                       const std::filesystem::path& path);

struct NetworkReliabilityParams {
    double lambda_link_per_hr = 1e-5;    // lambda_l
    double lambda_server_per_hr = 1e-6;  // lambda_u
    double epsilon = 1e-6;               // miss-probability floor
    double hours_per_step = 0.0;         // 0 = derive from the schedule step

    void validate() const;
};

struct CandidateSite {
    int id = 0;
    GeoPoint position;           // altitude = ground level at the site
    double mast_height_m = 10.0; // sensors sit this far above the position
    int capacity = 10;           // M, max sensors at the site

    void validate() const;
};

// Component reliability e^(-lambda * t); t in hours, t < 0 is a domain error.
double component_reliability(double lambda_per_hr, double t_hours);
// p = rho_s * chi * ell
double intrinsic_detection(double rho_s, double chi, double ell);
// q = p * rho_link
double end_to_end(double p, double rho_link);
// m = max(1 - q, epsilon)
double miss_probability(double q, double epsilon);

// Per-(site, type, aircraft, step) end-to-end detection and miss
// probabilities, plus server reliability and the aircraft presence mask.
// Immutable after construction.
class DetectionTensor {
public:
    DetectionTensor() = default;
    DetectionTensor(int num_sites, int num_types, int num_aircraft, int num_steps,
                    std::vector<double> q, std::vector<uint8_t> present,
                    std::vector<double> rho_u, double epsilon, double step_seconds);

    int num_sites() const { return ni_; }
    int num_types() const { return ns_; }
    int num_aircraft() const { return nk_; }
    int num_steps() const { return nt_; }
    double epsilon() const { return epsilon_; }
    double step_seconds() const { return step_seconds_; }

    double q(int i, int s, int k, int t) const { return q_[index(i, s, k, t)]; }
    double m(int i, int s, int k, int t) const { return m_[index(i, s, k, t)]; }
    bool present(int k, int t) const { return present_[k * nt_ + t] != 0; }
    bool detected(int i, int s, int k, int t) const { return q(i, s, k, t) > 0.0; }
    double rho_u(int t) const { return rho_u_[t]; }

    // |alpha_{t,i,s}|: aircraft with positive end-to-end probability.
    int alpha_count(int t, int i, int s) const;
    bool any_present(int t) const;

private:
    int ni_ = 0, ns_ = 0, nk_ = 0, nt_ = 0;
    std::vector<double> q_, m_;
    std::vector<uint8_t> present_;
    std::vector<double> rho_u_;
    double epsilon_ = 1e-6;
    double step_seconds_ = 600.0;

    std::size_t index(int i, int s, int k, int t) const {
        return ((static_cast<std::size_t>(i) * ns_ + s) * nk_ + k) * nt_ + t;
    }
};

struct DecayShape {
    double e = 50.0;  // boundary tolerance, must stay below every r_s
    double a = 0.5;
    double b = 1.0;
};

DetectionTensor build_tensor(const std::vector<CandidateSite>& sites,
                             const std::vector<SensorSpec>& catalog,
                             const FlightSchedule& schedule, const TerrainCloud& cloud,
                             const DecayShape& decay, const LosParams& los,
                             const AcousticParams& acoustic,
                             const NetworkReliabilityParams& net);

}  // namespace sam3r

#include "sam3r/detection.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "sam3r/errors.hpp"

namespace sam3r {

void SensorSpec::validate() const {
    if (id.empty()) throw ConfigError("sensor spec: empty id");
    if (unit_cost < 0.0) throw ConfigError("sensor " + id + ": negative cost");
    if (set_size < 1) throw ConfigError("sensor " + id + ": set size must be >= 1");
    if (!(range_m > 0.0)) throw ConfigError("sensor " + id + ": range must be > 0");
    if (failure_rate_per_hr < 0.0) throw ConfigError("sensor " + id + ": negative failure rate");
    if (vert_units < 1) throw ConfigError("sensor " + id + ": vert units must be >= 1");
    if (max_sets < 1) throw ConfigError("sensor " + id + ": max sets must be >= 1");
}

std::vector<SensorSpec> builtin_primary_catalog() {
    std::vector<SensorSpec> cat;
    auto add = [&](std::string id, std::string model, bool acoustic, double cost, double range_km,
                   double lambda, int tracking, double fov_az, double fov_el,
                   std::string range_note) {
        SensorSpec s;
        s.id = std::move(id);
        s.model = std::move(model);
        s.acoustic = acoustic;
        s.unit_cost = cost;
        s.set_size = 1;
        s.range_m = range_km * 1000.0;
        s.failure_rate_per_hr = lambda;
        s.vert_units = 1;
        s.max_sets = 5;
        s.tracking_capacity = tracking;
        s.fov_az_deg = fov_az;
        s.fov_el_deg = fov_el;
        s.range_note = std::move(range_note);
        cat.push_back(std::move(s));
    };
    add("radar", "Echodyne EchoFlight", false, 20000, 0.75, 1.203e-5, 20, 120, 80,
        "lower bound of small-UAV 0.75 km / large-UAV 1 km");
    add("optical", "Edge Autonomy Octopus ISR E180", false, 231000, 1.4, 1.538e-5, 500, 360, 30,
        "lower bound of 1.4-12.4 km span");
    add("remote_id", "Dronetag RIDER", false, 1099, 5.0, 2.405e-5, 20, 360, 180, "");
    add("acoustic", "DroneShield FarAlert", true, 20000, 1.0, 1.203e-5, 5, 360, 90, "");
    add("rf", "Aaronia AARTOS X2 DDS", false, 20000, 5.0, 6.014e-6, -1, 360, 180, "");
    add("adsb", "uAvionix pingUSB", false, 275, 160.9, 6.014e-6, 100, 360, 180, "");
    for (const auto& s : cat) s.validate();
    return cat;
}

std::vector<SensorSpec> load_catalog_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sensor catalog: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("sensor catalog " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw ParseError("sensor catalog: expected a JSON array");
    std::vector<SensorSpec> cat;
    for (const auto& j : doc) {
        SensorSpec s;
        try {
            s.id = j.at("id").get<std::string>();
            s.model = j.value("model", std::string{});
            s.acoustic = j.value("acoustic", false);
            s.unit_cost = j.at("unit_cost").get<double>();
            s.set_size = j.value("set_size", 1);
            if (j.contains("range_km"))
                s.range_m = j.at("range_km").get<double>() * 1000.0;
            else
                s.range_m = j.at("range_m").get<double>();
            s.failure_rate_per_hr = j.at("failure_rate_per_hr").get<double>();
            s.vert_units = j.value("vert_units", 1);
            s.max_sets = j.value("max_sets", 5);
            s.tracking_capacity = j.value("tracking_capacity", -1);
            s.fov_az_deg = j.value("fov_az_deg", 360.0);
            s.fov_el_deg = j.value("fov_el_deg", 180.0);
            s.range_note = j.value("range_note", std::string{});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("sensor catalog entry: " + std::string(e.what()));
        }
        s.validate();
        cat.push_back(std::move(s));
    }
    if (cat.empty()) throw ParseError("sensor catalog: no entries");
    return cat;
}

void save_catalog_json(const std::vector<SensorSpec>& catalog,
                       const std::filesystem::path& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : catalog) {
        doc.push_back({{"id", s.id},
                       {"model", s.model},
                       {"acoustic", s.acoustic},
                       {"unit_cost", s.unit_cost},
                       {"set_size", s.set_size},
                       {"range_m", s.range_m},
                       {"failure_rate_per_hr", s.failure_rate_per_hr},
                       {"vert_units", s.vert_units},
                       {"max_sets", s.max_sets},
                       {"tracking_capacity", s.tracking_capacity},
                       {"fov_az_deg", s.fov_az_deg},
                       {"fov_el_deg", s.fov_el_deg},
                       {"range_note", s.range_note}});
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write sensor catalog: " + path.string());
    out << doc.dump(2) << '\n';
}

void NetworkReliabilityParams::validate() const {
    if (lambda_link_per_hr < 0.0 || lambda_server_per_hr < 0.0)
        throw ConfigError("network reliability: negative failure rate");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw ConfigError("network reliability: epsilon must be in (0,1)");
    if (hours_per_step < 0.0) throw ConfigError("network reliability: negative hours per step");
}

void CandidateSite::validate() const {
    if (capacity < 1) throw ConfigError("site capacity must be >= 1");
    if (mast_height_m < 0.0) throw ConfigError("mast height must be >= 0");
}

double component_reliability(double lambda_per_hr, double t_hours) {
    if (lambda_per_hr < 0.0) throw std::domain_error("component reliability: negative rate");
    if (t_hours < 0.0) throw std::domain_error("component reliability: negative time");
    return std::exp(-lambda_per_hr * t_hours);
}

double intrinsic_detection(double rho_s, double chi, double ell) { return rho_s * chi * ell; }

double end_to_end(double p, double rho_link) { return p * rho_link; }

double miss_probability(double q, double epsilon) { return std::max(1.0 - q, epsilon); }

DetectionTensor::DetectionTensor(int num_sites, int num_types, int num_aircraft, int num_steps,
                                 std::vector<double> q, std::vector<uint8_t> present,
                                 std::vector<double> rho_u, double epsilon, double step_seconds)
    : ni_(num_sites), ns_(num_types), nk_(num_aircraft), nt_(num_steps), q_(std::move(q)),
      present_(std::move(present)), rho_u_(std::move(rho_u)), epsilon_(epsilon),
      step_seconds_(step_seconds) {
    const std::size_t cells =
        static_cast<std::size_t>(ni_) * ns_ * nk_ * nt_;
    if (q_.size() != cells) throw ConfigError("detection tensor: q size mismatch");
    if (present_.size() != static_cast<std::size_t>(nk_) * nt_)
        throw ConfigError("detection tensor: presence size mismatch");
    if (rho_u_.size() != static_cast<std::size_t>(nt_))
        throw ConfigError("detection tensor: rho_u size mismatch");
    if (!(epsilon_ > 0.0) || !(epsilon_ < 1.0))
        throw ConfigError("detection tensor: epsilon must be in (0,1)");
    m_.resize(q_.size());
    for (std::size_t idx = 0; idx < q_.size(); ++idx) {
        if (q_[idx] < 0.0 || q_[idx] > 1.0)
            throw ConfigError("detection tensor: q outside [0,1]");
        m_[idx] = miss_probability(q_[idx], epsilon_);
    }
}

int DetectionTensor::alpha_count(int t, int i, int s) const {
    int n = 0;
    for (int k = 0; k < nk_; ++k)
        if (detected(i, s, k, t)) ++n;
    return n;
}

bool DetectionTensor::any_present(int t) const {
    for (int k = 0; k < nk_; ++k)
        if (present(k, t)) return true;
    return false;
}

DetectionTensor build_tensor(const std::vector<CandidateSite>& sites,
                             const std::vector<SensorSpec>& catalog,
                             const FlightSchedule& schedule, const TerrainCloud& cloud,
                             const DecayShape& decay, const LosParams& los,
                             const AcousticParams& acoustic,
                             const NetworkReliabilityParams& net) {
    net.validate();
    los.validate();
    acoustic.validate();
    for (const auto& site : sites) site.validate();
    for (const auto& spec : catalog) spec.validate();

    const int ni = static_cast<int>(sites.size());
    const int ns = static_cast<int>(catalog.size());
    const int nk = schedule.num_aircraft();
    const int nt = schedule.num_steps();
    const double hours_per_step =
        net.hours_per_step > 0.0 ? net.hours_per_step : schedule.step_seconds / 3600.0;

    const LocalFrame& frame = cloud.frame();
    std::vector<Vec3> sensor_pos(ni);
    for (int i = 0; i < ni; ++i) {
        sensor_pos[i] = frame.to_local(sites[i].position);
        sensor_pos[i].z += sites[i].mast_height_m;
    }

    std::vector<RangeDecayParams> decay_params(ns);
    for (int s = 0; s < ns; ++s) {
        decay_params[s] = RangeDecayParams{catalog[s].range_m, decay.e, decay.a, decay.b};
        decay_params[s].validate();
    }

    std::vector<double> q(static_cast<std::size_t>(ni) * ns * nk * nt, 0.0);
    std::vector<uint8_t> present(static_cast<std::size_t>(nk) * nt, 0);
    std::vector<double> rho_u(nt);
    for (int t = 0; t < nt; ++t)
        rho_u[t] = component_reliability(net.lambda_server_per_hr, t * hours_per_step);

    auto idx = [&](int i, int s, int k, int t) {
        return ((static_cast<std::size_t>(i) * ns + s) * nk + k) * nt + t;
    };

    for (int k = 0; k < nk; ++k) {
        for (int t = 0; t < nt; ++t) {
            const auto& pos = schedule.positions[k][t];
            if (!pos) continue;
            present[static_cast<std::size_t>(k) * nt + t] = 1;
            const Vec3 target = frame.to_local(*pos);
            const double hours = t * hours_per_step;
            const double rho_link = component_reliability(net.lambda_link_per_hr, hours);
            for (int i = 0; i < ni; ++i) {
                // Geometric LOS is shared by every non-acoustic type at this
                // (site, target); compute it lazily once.
                double geom_ell = -1.0;
                for (int s = 0; s < ns; ++s) {
                    const double chi = range_check(sensor_pos[i], target, decay_params[s]);
                    if (chi <= 0.0) continue;
                    double ell;
                    if (catalog[s].acoustic) {
                        ell = acoustic_los(sensor_pos[i], target, cloud, acoustic);
                    } else {
                        if (geom_ell < 0.0)
                            geom_ell = geometric_los(sensor_pos[i], target, cloud, los);
                        ell = geom_ell;
                    }
                    const double rho_s =
                        component_reliability(catalog[s].failure_rate_per_hr, hours);
                    const double p = intrinsic_detection(rho_s, chi, ell);
                    q[idx(i, s, k, t)] = end_to_end(p, rho_link);
                }
            }
        }
    }
    return DetectionTensor(ni, ns, nk, nt, std::move(q), std::move(present), std::move(rho_u),
                           net.epsilon, schedule.step_seconds);
}

}  // namespace sam3r

#include "sam3r/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sam3r/errors.hpp"

namespace sam3r {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

TemporalDistribution parse_distribution(const json& j, TemporalDistribution fallback) {
    TemporalDistribution d = std::move(fallback);
    if (j.contains("kind")) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "bimodal") d.kind = TemporalDistribution::Kind::Bimodal;
        else if (kind == "trimodal") d.kind = TemporalDistribution::Kind::Trimodal;
        else throw ConfigError("config: unknown distribution kind '" + kind + "'");
    }
    if (j.contains("mode_centers")) d.mode_centers = j.at("mode_centers").get<std::vector<double>>();
    if (j.contains("mode_weights")) d.mode_weights = j.at("mode_weights").get<std::vector<double>>();
    if (j.contains("spread_hours")) d.spread_hours = j.at("spread_hours").get<double>();
    d.validate();
    return d;
}

TerrainClass class_from_key(const std::string& key) {
    if (key == "unclassified") return TerrainClass::Unclassified;
    if (key == "ground") return TerrainClass::Ground;
    if (key == "low_vegetation") return TerrainClass::LowVegetation;
    if (key == "medium_vegetation") return TerrainClass::MediumVegetation;
    if (key == "high_vegetation") return TerrainClass::HighVegetation;
    if (key == "building") return TerrainClass::Building;
    throw ConfigError("config: unknown terrain class key '" + key + "'");
}

}  // namespace

ToolkitConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config: " + path.string());
    std::ostringstream raw;
    raw << in.rdbuf();
    const std::string text = raw.str();

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }

    ToolkitConfig cfg;
    {
        std::ostringstream hex;
        hex << std::hex << fnv1a64(text);
        cfg.config_hash = hex.str();
    }
    const std::filesystem::path base = path.parent_path();

    try {
        if (doc.contains("seed")) {
            cfg.seed = doc.at("seed").get<std::uint64_t>();
            cfg.has_seed = true;
            cfg.trajectory.seed = cfg.seed;
        }
        if (doc.contains("paths")) {
            const auto& p = doc.at("paths");
            if (p.contains("dsm_csv")) cfg.paths.dsm_csv = resolve(base, p.at("dsm_csv"));
            if (p.contains("catalog")) cfg.paths.catalog = resolve(base, p.at("catalog"));
            if (p.contains("schedule")) cfg.paths.schedule = resolve(base, p.at("schedule"));
            if (p.contains("surge_schedule"))
                cfg.paths.surge_schedule = resolve(base, p.at("surge_schedule"));
            if (p.contains("scenario")) cfg.paths.scenario = resolve(base, p.at("scenario"));
            if (p.contains("plan")) cfg.paths.plan = resolve(base, p.at("plan"));
            if (p.contains("out_dir")) cfg.paths.out_dir = resolve(base, p.at("out_dir"));
        }
        if (doc.contains("terrain")) {
            const auto& t = doc.at("terrain");
            cfg.grid_cell_m = t.value("grid_cell_m", cfg.grid_cell_m);
            cfg.reclassify_radius_m = t.value("reclassify_radius_m", cfg.reclassify_radius_m);
        }
        if (doc.contains("range_decay")) {
            const auto& d = doc.at("range_decay");
            cfg.decay.e = d.value("e", cfg.decay.e);
            cfg.decay.a = d.value("a", cfg.decay.a);
            cfg.decay.b = d.value("b", cfg.decay.b);
        }
        if (doc.contains("los")) {
            const auto& l = doc.at("los");
            cfg.los.R = l.value("R", cfg.los.R);
            cfg.los.Z = l.value("Z", cfg.los.Z);
        }
        if (doc.contains("acoustic")) {
            const auto& a = doc.at("acoustic");
            cfg.acoustic.f_hz = a.value("f_hz", cfg.acoustic.f_hz);
            cfg.acoustic.c_mps = a.value("c_mps", cfg.acoustic.c_mps);
            cfg.acoustic.amplitude = a.value("amplitude", cfg.acoustic.amplitude);
            cfg.acoustic.delta_m = a.value("delta_m", cfg.acoustic.delta_m);
            cfg.acoustic.R = a.value("R", cfg.los.R);
            cfg.acoustic.Z = a.value("Z", cfg.los.Z);
            cfg.acoustic.d0_m = a.value("d0_m", cfg.acoustic.d0_m);
            cfg.acoustic.G_offset_db = a.value("G_offset_db", cfg.acoustic.G_offset_db);
            cfg.acoustic.B_max_db = a.value("B_max_db", cfg.acoustic.B_max_db);
            if (a.contains("F_omega"))
                for (const auto& [key, val] : a.at("F_omega").items())
                    cfg.acoustic.F_omega[class_from_key(key)] = val.get<double>();
            if (a.contains("R_p"))
                for (const auto& [key, val] : a.at("R_p").items())
                    cfg.acoustic.R_p[class_from_key(key)] = val.get<double>();
            cfg.acoustic.validate();
        }
        if (doc.contains("reliability")) {
            const auto& r = doc.at("reliability");
            cfg.net.lambda_link_per_hr = r.value("lambda_link_per_hr", cfg.net.lambda_link_per_hr);
            cfg.net.lambda_server_per_hr =
                r.value("lambda_server_per_hr", cfg.net.lambda_server_per_hr);
            cfg.net.epsilon = r.value("epsilon", cfg.net.epsilon);
            cfg.net.hours_per_step = r.value("hours_per_step", cfg.net.hours_per_step);
            cfg.reliability_target = r.value("H", cfg.reliability_target);
            cfg.per_aircraft_rows = r.value("per_aircraft_rows", cfg.per_aircraft_rows);
            if (r.contains("plot_thresholds"))
                cfg.plot_thresholds = r.at("plot_thresholds").get<std::vector<double>>();
            cfg.net.validate();
        }
        if (doc.contains("robustness")) {
            const auto& r = doc.at("robustness");
            cfg.sigma = r.value("sigma", cfg.sigma);
            cfg.max_vert = r.value("max_vert", cfg.max_vert);
        }
        if (doc.contains("sites")) {
            const auto& s = doc.at("sites");
            cfg.site_spacing_m = s.value("spacing_m", cfg.site_spacing_m);
            cfg.mast_height_m = s.value("mast_height_m", cfg.mast_height_m);
            cfg.site_capacity = s.value("capacity", cfg.site_capacity);
        }
        if (doc.contains("schedule")) {
            const auto& s = doc.at("schedule");
            cfg.trajectory.speed_mps = s.value("cruise_speed_mps", cfg.trajectory.speed_mps);
            cfg.trajectory.step_seconds = s.value("step_seconds", cfg.trajectory.step_seconds);
            cfg.trajectory.cruise_alt_m = s.value("cruise_alt_m", cfg.trajectory.cruise_alt_m);
            cfg.trajectory.window_start_hour =
                s.value("window_start_hour", cfg.trajectory.window_start_hour);
            cfg.trajectory.window_end_hour =
                s.value("window_end_hour", cfg.trajectory.window_end_hour);
            if (s.contains("demand")) {
                const auto& d = s.at("demand");
                cfg.demand.air_metro = d.value("air_metro", 0);
                cfg.demand.emergency = d.value("emergency", 0);
                cfg.demand.cargo = d.value("cargo", 0);
            }
            if (s.contains("distributions")) {
                const auto& ds = s.at("distributions");
                if (ds.contains("air_metro"))
                    cfg.distributions[0] =
                        parse_distribution(ds.at("air_metro"), cfg.distributions[0]);
                if (ds.contains("emergency"))
                    cfg.distributions[1] =
                        parse_distribution(ds.at("emergency"), cfg.distributions[1]);
                if (ds.contains("cargo"))
                    cfg.distributions[2] = parse_distribution(ds.at("cargo"), cfg.distributions[2]);
            }
        }
        if (doc.contains("corridor")) {
            const auto& c = doc.at("corridor");
            std::vector<GeoPoint> waypoints;
            for (const auto& w : c.at("waypoints"))
                waypoints.push_back({w.at(0).get<double>(), w.at(1).get<double>(), 0.0});
            cfg.corridor = CorridorPath::from_waypoints(c.value("name", "corridor"),
                                                        std::move(waypoints));
        }
        if (doc.contains("solver")) {
            const auto& s = doc.at("solver");
            cfg.node_budget = s.value("node_budget", cfg.node_budget);
            cfg.exhaustive_budget = s.value("exhaustive_budget", cfg.exhaustive_budget);
        }
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return cfg;
}

}  // namespace sam3r

#include "sam3r/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "sam3r/errors.hpp"

namespace sam3r {

const char* use_case_name(UseCase u) {
    switch (u) {
        case UseCase::AirMetro: return "Air Metro";
        case UseCase::Emergency: return "Emergency";
        case UseCase::Cargo: return "Cargo";
    }
    return "?";
}

int DemandProfile::for_use_case(UseCase u) const {
    switch (u) {
        case UseCase::AirMetro: return air_metro;
        case UseCase::Emergency: return emergency;
        case UseCase::Cargo: return cargo;
    }
    return 0;
}

CorridorPath CorridorPath::from_waypoints(std::string name, std::vector<GeoPoint> waypoints) {
    if (waypoints.size() < 2) throw ConfigError("corridor needs at least 2 waypoints");
    CorridorPath c;
    c.name = std::move(name);
    c.waypoints = std::move(waypoints);

    GeoPoint centroid;
    for (const auto& w : c.waypoints) {
        centroid.lon_deg += w.lon_deg;
        centroid.lat_deg += w.lat_deg;
    }
    centroid.lon_deg /= static_cast<double>(c.waypoints.size());
    centroid.lat_deg /= static_cast<double>(c.waypoints.size());
    LocalFrame frame = LocalFrame::centered_at(centroid);

    c.cumulative_length_m.resize(c.waypoints.size(), 0.0);
    for (std::size_t i = 1; i < c.waypoints.size(); ++i) {
        Vec3 a = frame.to_local(c.waypoints[i - 1]);
        Vec3 b = frame.to_local(c.waypoints[i]);
        const double seg = std::hypot(b.x - a.x, b.y - a.y);
        if (seg <= 0.0) throw ConfigError("corridor has a zero-length segment");
        c.cumulative_length_m[i] = c.cumulative_length_m[i - 1] + seg;
    }
    return c;
}

GeoPoint CorridorPath::point_at(double s) const {
    s = std::clamp(s, 0.0, cumulative_length_m.back());
    auto it = std::upper_bound(cumulative_length_m.begin(), cumulative_length_m.end(), s);
    std::size_t hi = std::min<std::size_t>(it - cumulative_length_m.begin(),
                                           cumulative_length_m.size() - 1);
    std::size_t lo = hi - 1;
    const double seg = cumulative_length_m[hi] - cumulative_length_m[lo];
    const double f = seg > 0.0 ? (s - cumulative_length_m[lo]) / seg : 0.0;
    const GeoPoint& a = waypoints[lo];
    const GeoPoint& b = waypoints[hi];
    return {a.lon_deg + f * (b.lon_deg - a.lon_deg), a.lat_deg + f * (b.lat_deg - a.lat_deg), 0.0};
}

void TemporalDistribution::validate() const {
    const std::size_t expect = kind == Kind::Bimodal ? 2 : 3;
    if (mode_centers.size() != expect || mode_weights.size() != expect)
        throw ConfigError("temporal distribution: mode count does not match kind");
    double sum = 0.0;
    for (double w : mode_weights) {
        if (w < 0.0) throw ConfigError("temporal distribution: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("temporal distribution: weights must sum to 1");
    if (!(spread_hours > 0.0)) throw ConfigError("temporal distribution: spread must be > 0");
}

double TemporalDistribution::density(double hour) const {
    double d = 0.0;
    for (std::size_t j = 0; j < mode_centers.size(); ++j) {
        const double z = (hour - mode_centers[j]) / spread_hours;
        d += mode_weights[j] * std::exp(-0.5 * z * z);
    }
    return d;
}

TemporalDistribution TemporalDistribution::air_metro_default() {
    TemporalDistribution d;
    d.kind = Kind::Trimodal;
    d.mode_centers = {8.5, 12.0, 17.5};
    d.mode_weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    d.spread_hours = 1.5;
    return d;
}

TemporalDistribution TemporalDistribution::emergency_default() {
    TemporalDistribution d;
    d.kind = Kind::Bimodal;
    d.mode_centers = {10.5, 17.5};
    d.mode_weights = {0.5, 0.5};
    d.spread_hours = 1.5;
    return d;
}

TemporalDistribution TemporalDistribution::cargo_default() {
    TemporalDistribution d;
    d.kind = Kind::Bimodal;
    d.mode_centers = {10.0, 15.0};
    d.mode_weights = {0.5, 0.5};
    d.spread_hours = 1.5;
    return d;
}

std::vector<int> hourly_allocation(int daily_count, const TemporalDistribution& dist,
                                   int start_hour, int end_hour) {
    dist.validate();
    if (daily_count < 0) throw ConfigError("hourly allocation: negative daily count");
    if (end_hour <= start_hour) throw ConfigError("hourly allocation: empty window");
    const int bins = end_hour - start_hour;
    std::vector<double> w(bins);
    double total = 0.0;
    for (int h = 0; h < bins; ++h) {
        w[h] = dist.density(static_cast<double>(start_hour + h));
        total += w[h];
    }
    if (total <= 0.0) throw ConfigError("hourly allocation: zero density over window");

    std::vector<int> out(bins, 0);
    std::vector<std::pair<double, int>> rem(bins);  // (-remainder, hour) for stable ordering
    int assigned = 0;
    for (int h = 0; h < bins; ++h) {
        const double quota = daily_count * w[h] / total;
        out[h] = static_cast<int>(std::floor(quota));
        assigned += out[h];
        rem[h] = {-(quota - out[h]), h};
    }
    std::sort(rem.begin(), rem.end());
    for (int i = 0; i < daily_count - assigned; ++i) out[rem[i].second] += 1;
    return out;
}

namespace {

struct Flight {
    UseCase use_case;
    int seq = 0;            // per use case, chronological
    double depart_s = 0.0;  // jittered wall-clock departure, seconds from midnight
    bool forward = true;
};

}  // namespace

FlightSchedule generate_trajectories(const CorridorPath& corridor,
                                     const std::array<HourlyCounts, kNumUseCases>& hourly,
                                     const TrajectoryOptions& opts) {
    if (!(opts.speed_mps > 0.0)) throw ConfigError("trajectories: speed must be > 0");
    if (!(opts.step_seconds > 0.0)) throw ConfigError("trajectories: step must be > 0");

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> minute(0, 59);

    std::vector<Flight> flights;
    for (int u = 0; u < kNumUseCases; ++u) {
        const auto& hc = hourly[u];
        int seq = 0;
        for (std::size_t h = 0; h < hc.counts.size(); ++h) {
            for (int j = 0; j < hc.counts[h]; ++j) {
                Flight f;
                f.use_case = static_cast<UseCase>(u);
                f.seq = seq;
                f.depart_s = (hc.start_hour + static_cast<double>(h)) * 3600.0 + minute(rng) * 60.0;
                f.forward = (seq % 2 == 0);
                flights.push_back(f);
                ++seq;
            }
        }
    }

    const double t0 = opts.window_start_hour * 3600.0;
    const double dt = opts.step_seconds;
    const double length = corridor.length_m();
    const int travel_steps = static_cast<int>(std::ceil(length / (opts.speed_mps * dt)));

    // Departure snaps to the first step at or after the jittered minute.
    auto depart_step = [&](double depart_s) {
        return static_cast<int>(std::ceil(std::max(0.0, depart_s - t0) / dt - 1e-9));
    };

    int last_step = static_cast<int>(
        std::ceil((opts.window_end_hour * 3600.0 - t0) / dt - 1e-9)) - 1;
    for (const auto& f : flights)
        last_step = std::max(last_step, depart_step(f.depart_s) + travel_steps);

    FlightSchedule sched;
    sched.step_seconds = dt;
    for (int k = 0; k <= last_step; ++k) sched.step_time_s.push_back(t0 + k * dt);
    const int num_steps = static_cast<int>(sched.step_time_s.size());

    // Pack flights into reusable per-use-case slots, chronologically.
    std::stable_sort(flights.begin(), flights.end(), [](const Flight& a, const Flight& b) {
        if (a.use_case != b.use_case) return a.use_case < b.use_case;
        if (a.depart_s != b.depart_s) return a.depart_s < b.depart_s;
        return a.seq < b.seq;
    });

    std::array<std::vector<int>, kNumUseCases> slot_free_after;  // last occupied step per slot
    std::array<std::vector<int>, kNumUseCases> slot_aircraft;
    auto aircraft_for_slot = [&](UseCase u, int slot) {
        auto& ids = slot_aircraft[static_cast<int>(u)];
        while (static_cast<int>(ids.size()) <= slot) {
            sched.aircraft_names.push_back(std::string(use_case_name(u)) + " Craft " +
                                           std::to_string(ids.size() + 1));
            sched.aircraft_use_case.push_back(u);
            sched.positions.emplace_back(num_steps);
            ids.push_back(static_cast<int>(sched.aircraft_names.size()) - 1);
        }
        return ids[slot];
    };

    for (const auto& f : flights) {
        const int dep = depart_step(f.depart_s);
        auto& frees = slot_free_after[static_cast<int>(f.use_case)];
        int slot = -1;
        for (std::size_t s = 0; s < frees.size(); ++s) {
            if (frees[s] < dep) { slot = static_cast<int>(s); break; }
        }
        if (slot < 0) {
            slot = static_cast<int>(frees.size());
            frees.push_back(-1);
        }
        frees[slot] = dep + travel_steps;
        const int a = aircraft_for_slot(f.use_case, slot);
        for (int j = 0; j <= travel_steps; ++j) {
            const int k = dep + j;
            if (k >= num_steps) break;
            const double dist = std::min(j * opts.speed_mps * dt, length);
            GeoPoint pos = corridor.point_at(f.forward ? dist : length - dist);
            pos.alt_m = opts.cruise_alt_m;
            sched.positions[a][k] = pos;
        }
    }
    return sched;
}

FlightSchedule build_schedule(const CorridorPath& corridor, const DemandProfile& demand,
                              const std::array<TemporalDistribution, kNumUseCases>& dists,
                              const TrajectoryOptions& opts) {
    std::array<HourlyCounts, kNumUseCases> hourly;
    for (int u = 0; u < kNumUseCases; ++u) {
        hourly[u].start_hour = opts.window_start_hour;
        hourly[u].counts = hourly_allocation(demand.for_use_case(static_cast<UseCase>(u)),
                                             dists[u], opts.window_start_hour,
                                             opts.window_end_hour);
    }
    return generate_trajectories(corridor, hourly, opts);
}

namespace {

std::string format_time(double seconds) {
    const long total_min = std::lround(seconds / 60.0);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%ld:%02ld", total_min / 60, total_min % 60);
    return buf;
}

std::vector<std::string> split_csv_row(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else in_quotes = false;
            } else cur += ch;
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    if (in_quotes)
        throw ParseError("schedule CSV line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(cur);
    return fields;
}

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_schedule_csv(const FlightSchedule& schedule, std::ostream& out) {
    if (std::fmod(schedule.step_seconds, 60.0) != 0.0)
        throw ConfigError("schedule CSV requires whole-minute steps");
    out << "Time";
    for (const auto& name : schedule.aircraft_names) out << ',' << name;
    out << '\n';
    char buf[96];
    for (int t = 0; t < schedule.num_steps(); ++t) {
        out << format_time(schedule.step_time_s[t]);
        for (int a = 0; a < schedule.num_aircraft(); ++a) {
            if (const auto& pos = schedule.positions[a][t]) {
                std::snprintf(buf, sizeof(buf), "\"%.7f, %.7f, %.2f\"", pos->lon_deg,
                              pos->lat_deg, pos->alt_m / kFeetToMeters);
                out << ',' << buf;
            } else {
                out << ",-";
            }
        }
        out << '\n';
    }
}

FlightSchedule parse_schedule_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("schedule CSV: empty file");
    int line_no = 1;
    while (!line.empty() && line[0] == '#') {  // metadata comment lines
        if (!std::getline(in, line)) throw ParseError("schedule CSV: missing header");
        ++line_no;
    }
    auto header = split_csv_row(line, line_no);
    if (header.empty() || trim_copy(header[0]) != "Time")
        throw ParseError("schedule CSV: first header column must be 'Time'");

    FlightSchedule sched;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string name = trim_copy(header[c]);
        UseCase u;
        if (name.rfind("Air Metro", 0) == 0) u = UseCase::AirMetro;
        else if (name.rfind("Emergency", 0) == 0) u = UseCase::Emergency;
        else if (name.rfind("Cargo", 0) == 0) u = UseCase::Cargo;
        else throw ParseError("schedule CSV: unrecognized aircraft column '" + name + "'");
        sched.aircraft_names.push_back(name);
        sched.aircraft_use_case.push_back(u);
        sched.positions.emplace_back();
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        auto fields = split_csv_row(line, line_no);
        if (fields.size() != header.size())
            throw ParseError("schedule CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        const std::string ts = trim_copy(fields[0]);
        auto colon = ts.find(':');
        if (colon == std::string::npos)
            throw ParseError("schedule CSV line " + std::to_string(line_no) + ": bad time '" +
                             ts + "'");
        int hh, mm;
        try {
            hh = std::stoi(ts.substr(0, colon));
            mm = std::stoi(ts.substr(colon + 1));
        } catch (const std::exception&) {
            throw ParseError("schedule CSV line " + std::to_string(line_no) + ": bad time '" +
                             ts + "'");
        }
        sched.step_time_s.push_back(hh * 3600.0 + mm * 60.0);

        for (std::size_t c = 1; c < fields.size(); ++c) {
            const std::string cell = trim_copy(fields[c]);
            if (cell == "-") {
                sched.positions[c - 1].push_back(std::nullopt);
                continue;
            }
            double lon, lat, alt_ft;
            if (std::sscanf(cell.c_str(), "%lf , %lf , %lf", &lon, &lat, &alt_ft) != 3)
                throw ParseError("schedule CSV line " + std::to_string(line_no) +
                                 ": bad position cell '" + cell + "'");
            sched.positions[c - 1].push_back(GeoPoint{lon, lat, alt_ft * kFeetToMeters});
        }
    }
    if (sched.step_time_s.empty()) throw ParseError("schedule CSV: no time rows");
    sched.step_seconds = sched.step_time_s.size() > 1
                             ? sched.step_time_s[1] - sched.step_time_s[0]
                             : 600.0;
    for (std::size_t t = 1; t < sched.step_time_s.size(); ++t) {
        if (std::abs((sched.step_time_s[t] - sched.step_time_s[t - 1]) - sched.step_seconds) > 1e-6)
            throw ParseError("schedule CSV: time rows are not uniformly spaced");
    }
    return sched;
}

FlightSchedule parse_schedule_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schedule CSV: " + path.string());
    return parse_schedule_csv(in);
}

}  // namespace sam3r

#include "sam3r/plan_resiliency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"
#include "sam3r/errors.hpp"

namespace sam3r {

void BackupUnit::validate() const {
    if (!(detect_prob > 0.0) || detect_prob > 1.0)
        throw ConfigError("backup " + name + ": detection probability must be in (0,1]");
    if (!(speed_mps > 0.0)) throw ConfigError("backup " + name + ": speed must be > 0");
}

const char* dispatch_rule_name(DispatchRule r) {
    switch (r) {
        case DispatchRule::ActivationLink: return "activation-link";
        case DispatchRule::ServiceWindow: return "service-window";
        case DispatchRule::ExclusiveDispatch: return "exclusive-dispatch";
        case DispatchRule::SingleAssignment: return "single-assignment";
        case DispatchRule::SingleDispatch: return "single-dispatch";
        case DispatchRule::Coverage: return "coverage";
    }
    return "?";
}

std::vector<BackupUnit> builtin_backup_catalog() {
    std::vector<BackupUnit> cat;
    auto add = [&](int id, std::string name, BackupPlatform platform, double prob,
                   double range_m, int tracking, std::string note) {
        BackupUnit u;
        u.id = id;
        u.name = std::move(name);
        u.platform = platform;
        u.detect_prob = prob;
        u.range_m = range_m;
        u.tracking_capacity = tracking;
        u.prob_note = std::move(note);
        cat.push_back(std::move(u));
    };
    add(0, "Echodyne EchoFlight (Radar)", BackupPlatform::UAV, 0.95, 750, 100, "");
    add(1, "Dronetag RIDER (Remote ID)", BackupPlatform::UAV, 1.0, 5000, 20, "");
    add(2, "uAvionix pingUSB (ADS-B)", BackupPlatform::UAV, 1.0, 160900, 100, "");
    add(3, "CRYSOUND CRY2626G (Acoustic)", BackupPlatform::UAV, 0.725, 35, 3,
        "midpoint of 0.6-0.85");
    add(4, "Aaronia ISOLOG 3D (RF)", BackupPlatform::UAV, 0.8, 1000, 10,
        "midpoint of 0.7-0.9; range lower bound of 1-3 km");
    add(5, "Shield AI ViDAR (Optical)", BackupPlatform::UAV, 0.93, 3000, 20,
        "midpoint of 0.9-0.96; range lower bound of 3-5 km");
    add(6, "DroneShield DroneSentry-X Mk2 (RF/Acoustic)", BackupPlatform::GroundVehicle, 0.825,
        15000, -1, "midpoint of 0.95 open / 0.7 hills-vegetation");
    return cat;
}

void FailureScenario::validate() const {
    if (horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
    if (!(step_seconds > 0.0)) throw ConfigError("scenario: step_seconds must be > 0");
    std::set<int> ids;
    for (const auto& o : primaries) {
        if (o.fail_step < 0 || o.fail_step >= horizon)
            throw ConfigError("scenario: fail step outside horizon for site " +
                              std::to_string(o.site_id));
        if (o.repair_steps < 1)
            throw ConfigError("scenario: repair duration must be >= 1 for site " +
                              std::to_string(o.site_id));
        if (!ids.insert(o.site_id).second)
            throw ConfigError("scenario: duplicate primary site id " + std::to_string(o.site_id));
    }
}

int FailureScenario::fail_end(int o) const {
    return std::min(primaries[o].fail_step + primaries[o].repair_steps, horizon);
}

bool FailureScenario::failed_at(int o, int t) const {
    return t >= primaries[o].fail_step && t < fail_end(o);
}

TravelTimes compute_travel_times(const std::vector<Hub>& hubs,
                                 const std::vector<FailedPrimary>& primaries,
                                 const BackupUnit& unit, double step_seconds,
                                 double ground_detour_factor) {
    unit.validate();
    if (!(step_seconds > 0.0)) throw ConfigError("travel times: step_seconds must be > 0");

    // Shared local frame about the centroid of all endpoints.
    GeoPoint centroid;
    int n = 0;
    for (const auto& h : hubs) {
        centroid.lon_deg += h.position.lon_deg;
        centroid.lat_deg += h.position.lat_deg;
        ++n;
    }
    for (const auto& o : primaries) {
        centroid.lon_deg += o.position.lon_deg;
        centroid.lat_deg += o.position.lat_deg;
        ++n;
    }
    if (n > 0) {
        centroid.lon_deg /= n;
        centroid.lat_deg /= n;
    }
    LocalFrame frame = LocalFrame::centered_at(centroid);

    const double detour =
        unit.platform == BackupPlatform::GroundVehicle ? ground_detour_factor : 1.0;
    TravelTimes tt;
    tt.steps.assign(hubs.size(), std::vector<int>(primaries.size(), 1));
    for (std::size_t h = 0; h < hubs.size(); ++h) {
        Vec3 ph = frame.to_local(hubs[h].position);
        for (std::size_t o = 0; o < primaries.size(); ++o) {
            Vec3 po = frame.to_local(primaries[o].position);
            const double dist = std::hypot(po.x - ph.x, po.y - ph.y) * detour;
            const double steps = dist / unit.speed_mps / step_seconds;
            tt.steps[h][o] = std::max(1, static_cast<int>(std::ceil(steps - 1e-9)));
        }
    }
    return tt;
}

namespace {

int hub_index(const std::vector<Hub>& hubs, int hub_id, const std::string& unit_name) {
    for (std::size_t h = 0; h < hubs.size(); ++h)
        if (hubs[h].id == hub_id) return static_cast<int>(h);
    throw ConfigError("backup " + unit_name + ": home hub id " + std::to_string(hub_id) +
                      " not in the hub list");
}

}  // namespace

ResiliencyModel build_resiliency_model(const FailureScenario& scenario,
                                       const std::vector<Hub>& hubs,
                                       const std::vector<BackupUnit>& backups) {
    scenario.validate();
    const int nb = static_cast<int>(backups.size());
    const int no = static_cast<int>(scenario.primaries.size());

    ResiliencyModel model;
    model.travel.reserve(nb);
    std::vector<int> home(nb);
    for (int b = 0; b < nb; ++b) {
        backups[b].validate();
        home[b] = hub_index(hubs, backups[b].home_hub, backups[b].name);
        model.travel.push_back(compute_travel_times(hubs, scenario.primaries, backups[b],
                                                    scenario.step_seconds,
                                                    scenario.ground_detour_factor));
    }

    // Variable layout: all dispatch vars first, then all active vars.
    // Dispatch exists only from the unit's home hub, inside the failure
    // window, and only when the unit arrives before repair completes; active
    // exists only inside [fail_start + travel, fail_end). That trimming is
    // the "no valid dispatch window" rule.
    std::map<std::tuple<int, int, int>, int> dispatch_idx;  // (b,o,t) -> var
    std::map<std::tuple<int, int, int>, int> active_idx;
    for (int b = 0; b < nb; ++b) {
        for (int o = 0; o < no; ++o) {
            const int travel = model.travel[b].steps[home[b]][o];
            const int fs = scenario.primaries[o].fail_step;
            const int fe = scenario.fail_end(o);
            for (int t = fs; t < fe; ++t) {
                if (t + travel >= fe) break;
                const int v = model.ip.add_variable("dispatch_b" + std::to_string(b) + "_o" +
                                                        std::to_string(o) + "_t" +
                                                        std::to_string(t),
                                                    0, 1, VarKind::Binary);
                model.ip.set_objective(v, static_cast<double>(travel));
                dispatch_idx[{b, o, t}] = v;
                model.dispatch_vars.push_back({b, home[b], o, t});
            }
        }
    }
    for (int b = 0; b < nb; ++b) {
        for (int o = 0; o < no; ++o) {
            const int travel = model.travel[b].steps[home[b]][o];
            const int fs = scenario.primaries[o].fail_step;
            const int fe = scenario.fail_end(o);
            // Dispatch windows are contiguous from the failure start, so the
            // pair is reachable iff an immediate dispatch exists.
            if (!dispatch_idx.count({b, o, fs})) continue;
            for (int t = fs + travel; t < fe; ++t) {
                const int v = model.ip.add_variable("active_b" + std::to_string(b) + "_o" +
                                                        std::to_string(o) + "_t" +
                                                        std::to_string(t),
                                                    0, 1, VarKind::Binary);
                model.ip.set_objective(v, -backups[b].detect_prob);
                active_idx[{b, o, t}] = v;
                model.active_vars.push_back({b, o, t});
            }
        }
    }

    // Activation needs an already-arrived dispatch.
    for (const auto& [key, av] : active_idx) {
        const auto [b, o, t] = key;
        const int travel = model.travel[b].steps[home[b]][o];
        std::vector<std::pair<int, double>> terms{{av, 1.0}};
        for (int td = scenario.primaries[o].fail_step; td + travel <= t; ++td) {
            auto it = dispatch_idx.find({b, o, td});
            if (it != dispatch_idx.end()) terms.push_back({it->second, -1.0});
        }
        model.ip.add_constraint(std::move(terms), 0.0,
                                "link_b" + std::to_string(b) + "_o" + std::to_string(o) + "_t" +
                                    std::to_string(t));
    }

    // A unit already serving o1 cannot be re-dispatched to o2 during o1's
    // repair period.
    for (int b = 0; b < nb; ++b) {
        for (int o1 = 0; o1 < no; ++o1) {
            std::vector<int> to_o1;
            for (int t = scenario.primaries[o1].fail_step; t < scenario.fail_end(o1); ++t) {
                auto it = dispatch_idx.find({b, o1, t});
                if (it != dispatch_idx.end()) to_o1.push_back(it->second);
            }
            if (to_o1.empty()) continue;
            for (int o2 = 0; o2 < no; ++o2) {
                if (o2 == o1) continue;
                for (int t2 = scenario.primaries[o1].fail_step; t2 < scenario.fail_end(o1); ++t2) {
                    auto it = dispatch_idx.find({b, o2, t2});
                    if (it == dispatch_idx.end()) continue;
                    std::vector<std::pair<int, double>> terms{{it->second, 1.0}};
                    for (int v : to_o1) terms.push_back({v, 1.0});
                    model.ip.add_constraint(std::move(terms), 1.0,
                                            "excl_b" + std::to_string(b) + "_o" +
                                                std::to_string(o1) + "_o" + std::to_string(o2) +
                                                "_t" + std::to_string(t2));
                }
            }
        }
    }

    // At most one active assignment per unit per step.
    for (int b = 0; b < nb; ++b) {
        for (int t = 0; t < scenario.horizon; ++t) {
            std::vector<std::pair<int, double>> terms;
            for (int o = 0; o < no; ++o) {
                auto it = active_idx.find({b, o, t});
                if (it != active_idx.end()) terms.push_back({it->second, 1.0});
            }
            if (terms.size() < 2) continue;
            model.ip.add_constraint(std::move(terms), 1.0,
                                    "assign_b" + std::to_string(b) + "_t" + std::to_string(t));
        }
    }

    // Each unit serves a given failure at most once.
    for (int b = 0; b < nb; ++b) {
        for (int o = 0; o < no; ++o) {
            std::vector<std::pair<int, double>> terms;
            for (int t = scenario.primaries[o].fail_step; t < scenario.fail_end(o); ++t) {
                auto it = dispatch_idx.find({b, o, t});
                if (it != dispatch_idx.end()) terms.push_back({it->second, 1.0});
            }
            if (terms.size() < 2) continue;
            model.ip.add_constraint(std::move(terms), 1.0,
                                    "once_b" + std::to_string(b) + "_o" + std::to_string(o));
        }
    }

    // Every failure gets at least one dispatch.
    for (int o = 0; o < no; ++o) {
        std::vector<std::pair<int, double>> terms;
        for (int b = 0; b < nb; ++b)
            for (int t = scenario.primaries[o].fail_step; t < scenario.fail_end(o); ++t) {
                auto it = dispatch_idx.find({b, o, t});
                if (it != dispatch_idx.end()) terms.push_back({it->second, -1.0});
            }
        if (terms.empty())
            throw InfeasibleError("no backup can reach failed primary site " +
                                  std::to_string(scenario.primaries[o].site_id) +
                                  " within its failure window");
        model.ip.add_constraint(std::move(terms), -1.0, "cover_o" + std::to_string(o));
    }

    return model;
}

DispatchSchedule schedule_backups(const FailureScenario& scenario, const std::vector<Hub>& hubs,
                                  const std::vector<BackupUnit>& backups,
                                  std::uint64_t node_budget) {
    ResiliencyModel model = build_resiliency_model(scenario, hubs, backups);
    Solution sol = solve_bnb(model.ip, node_budget);
    if (sol.status == SolveStatus::Aborted)
        throw BudgetError("resiliency solve: node budget exhausted");
    if (sol.status == SolveStatus::Infeasible)
        throw InfeasibleError("resiliency model infeasible (insufficient backups for the "
                              "failure pattern)");

    DispatchSchedule out;
    out.objective = sol.objective;
    const std::size_t nd = model.dispatch_vars.size();
    for (std::size_t v = 0; v < nd; ++v)
        if (sol.assignment[v] > 0) out.dispatches.push_back(model.dispatch_vars[v]);
    for (std::size_t v = 0; v < model.active_vars.size(); ++v)
        if (sol.assignment[nd + v] > 0) out.actives.push_back(model.active_vars[v]);

    ScheduleCheck check = validate_schedule(out, scenario, hubs, backups);
    if (!check.ok)
        throw InfeasibleError("validator rejected an optimal dispatch schedule: " +
                              check.violations.front().detail);
    return out;
}

ScheduleCheck validate_schedule(const DispatchSchedule& schedule,
                                const FailureScenario& scenario, const std::vector<Hub>& hubs,
                                const std::vector<BackupUnit>& backups) {
    scenario.validate();
    ScheduleCheck check;
    auto flag = [&](DispatchRule rule, std::string detail) {
        check.ok = false;
        check.violations.push_back({rule, std::move(detail)});
    };

    std::vector<TravelTimes> travel;
    for (const auto& u : backups)
        travel.push_back(compute_travel_times(hubs, scenario.primaries, u, scenario.step_seconds,
                                              scenario.ground_detour_factor));

    // Every active step follows an arrived dispatch and stays inside the
    // failure window.
    for (const auto& a : schedule.actives) {
        bool covered = false;
        for (const auto& d : schedule.dispatches) {
            if (d.backup != a.backup || d.primary != a.primary) continue;
            if (d.step + travel[d.backup].steps[d.hub][d.primary] <= a.step) covered = true;
        }
        if (!covered)
            flag(DispatchRule::ActivationLink, "active b" + std::to_string(a.backup) + " o" + std::to_string(a.primary) +
                         " t" + std::to_string(a.step) + " has no arrived dispatch");
        const int fs = scenario.primaries[a.primary].fail_step;
        const int fe = scenario.fail_end(a.primary);
        if (a.step >= fe || a.step < fs)
            flag(DispatchRule::ServiceWindow, "active b" + std::to_string(a.backup) + " outside failure window of o" +
                         std::to_string(a.primary) + " at t" + std::to_string(a.step));
    }

    // Dispatches land inside the failure window and arrive before repair
    // completes.
    for (const auto& d : schedule.dispatches) {
        const int fs = scenario.primaries[d.primary].fail_step;
        const int fe = scenario.fail_end(d.primary);
        if (d.step < fs || d.step >= fe)
            flag(DispatchRule::ServiceWindow, "dispatch b" + std::to_string(d.backup) + " at t" + std::to_string(d.step) +
                         " outside failure window of o" + std::to_string(d.primary));
        else if (d.step + travel[d.backup].steps[d.hub][d.primary] >= fe)
            flag(DispatchRule::ServiceWindow, "dispatch b" + std::to_string(d.backup) + " to o" +
                         std::to_string(d.primary) + " cannot arrive before repair completes");
    }

    // No second dispatch during a served failure's repair period.
    for (std::size_t x = 0; x < schedule.dispatches.size(); ++x) {
        for (std::size_t y = 0; y < schedule.dispatches.size(); ++y) {
            const auto& d1 = schedule.dispatches[x];
            const auto& d2 = schedule.dispatches[y];
            if (x == y || d1.backup != d2.backup || d1.primary == d2.primary) continue;
            if (scenario.failed_at(d1.primary, d2.step))
                flag(DispatchRule::ExclusiveDispatch, "backup b" + std::to_string(d1.backup) + " dispatched to o" +
                             std::to_string(d2.primary) + " at t" + std::to_string(d2.step) +
                             " during repair of o" + std::to_string(d1.primary));
        }
    }

    // One active assignment per unit per step.
    std::map<std::pair<int, int>, int> active_count;
    for (const auto& a : schedule.actives) ++active_count[{a.backup, a.step}];
    for (const auto& [key, count] : active_count)
        if (count > 1)
            flag(DispatchRule::SingleAssignment, "backup b" + std::to_string(key.first) + " active at " +
                         std::to_string(count) + " primaries at t" + std::to_string(key.second));

    // At most one dispatch per (unit, failure).
    std::map<std::pair<int, int>, int> dispatch_count;
    for (const auto& d : schedule.dispatches) ++dispatch_count[{d.backup, d.primary}];
    for (const auto& [key, count] : dispatch_count)
        if (count > 1)
            flag(DispatchRule::SingleDispatch, "backup b" + std::to_string(key.first) + " dispatched " +
                         std::to_string(count) + " times to o" + std::to_string(key.second));

    // Every failure covered by some dispatch within its window.
    for (std::size_t o = 0; o < scenario.primaries.size(); ++o) {
        bool covered = false;
        for (const auto& d : schedule.dispatches)
            if (d.primary == static_cast<int>(o) && scenario.failed_at(d.primary, d.step))
                covered = true;
        if (!covered)
            flag(DispatchRule::Coverage, "failed primary site " + std::to_string(scenario.primaries[o].site_id) +
                         " has no dispatch in its failure window");
    }
    return check;
}

std::vector<DispatchSummaryRow> summarize(const DispatchSchedule& schedule,
                                          const FailureScenario& scenario,
                                          const std::vector<Hub>& hubs,
                                          const std::vector<BackupUnit>& backups) {
    std::vector<TravelTimes> travel;
    for (const auto& u : backups)
        travel.push_back(compute_travel_times(hubs, scenario.primaries, u, scenario.step_seconds,
                                              scenario.ground_detour_factor));
    std::vector<DispatchSummaryRow> rows;
    for (const auto& d : schedule.dispatches) {
        DispatchSummaryRow row;
        row.unit = backups[d.backup].name;
        row.hub_id = hubs[d.hub].id;
        row.site_id = scenario.primaries[d.primary].site_id;
        row.dispatch_step = d.step;
        row.travel_steps = travel[d.backup].steps[d.hub][d.primary];
        row.arrival_step = d.step + row.travel_steps;
        for (const auto& a : schedule.actives) {
            if (a.backup != d.backup || a.primary != d.primary) continue;
            if (row.active_start < 0 || a.step < row.active_start) row.active_start = a.step;
            if (a.step > row.active_end) row.active_end = a.step;
            ++row.active_periods;
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.dispatch_step, a.site_id) < std::tie(b.dispatch_step, b.site_id);
    });
    return rows;
}

ResiliencyScenario load_scenario_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scenario " + path.string() + ": " + e.what());
    }
    ResiliencyScenario sc;
    try {
        sc.scenario.horizon = doc.at("horizon").get<int>();
        sc.scenario.step_seconds = doc.value("step_seconds", 600.0);
        sc.scenario.ground_detour_factor = doc.value("ground_detour_factor", 1.4);
        for (const auto& j : doc.at("hubs")) {
            Hub h;
            h.id = j.at("id").get<int>();
            h.position = {j.at("lon").get<double>(), j.at("lat").get<double>(),
                          j.value("alt_m", 0.0)};
            sc.hubs.push_back(h);
        }
        for (const auto& j : doc.at("backups")) {
            BackupUnit u;
            u.id = j.at("id").get<int>();
            u.name = j.value("name", "backup " + std::to_string(u.id));
            const std::string platform = j.value("platform", "uav");
            if (platform == "uav") u.platform = BackupPlatform::UAV;
            else if (platform == "ground_vehicle") u.platform = BackupPlatform::GroundVehicle;
            else throw ParseError("scenario: unknown platform '" + platform + "'");
            u.detect_prob = j.at("detect_prob").get<double>();
            u.speed_mps = j.value("speed_mps", 15.0);
            u.home_hub = j.at("home_hub").get<int>();
            u.range_m = j.value("range_m", 0.0);
            u.tracking_capacity = j.value("tracking_capacity", -1);
            u.prob_note = j.value("prob_note", std::string{});
            sc.backups.push_back(std::move(u));
        }
        for (const auto& j : doc.at("primaries")) {
            FailedPrimary o;
            o.site_id = j.at("site_id").get<int>();
            o.position = {j.at("lon").get<double>(), j.at("lat").get<double>(),
                          j.value("alt_m", 0.0)};
            o.fail_step = j.at("fail_step").get<int>();
            o.repair_steps = j.at("repair_steps").get<int>();
            sc.scenario.primaries.push_back(o);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scenario " + path.string() + ": " + e.what());
    }
    sc.scenario.validate();
    return sc;
}

void save_scenario_json(const ResiliencyScenario& sc, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["horizon"] = sc.scenario.horizon;
    doc["step_seconds"] = sc.scenario.step_seconds;
    doc["ground_detour_factor"] = sc.scenario.ground_detour_factor;
    doc["hubs"] = nlohmann::json::array();
    for (const auto& h : sc.hubs)
        doc["hubs"].push_back({{"id", h.id}, {"lon", h.position.lon_deg},
                               {"lat", h.position.lat_deg}, {"alt_m", h.position.alt_m}});
    doc["backups"] = nlohmann::json::array();
    for (const auto& u : sc.backups)
        doc["backups"].push_back(
            {{"id", u.id},
             {"name", u.name},
             {"platform", u.platform == BackupPlatform::UAV ? "uav" : "ground_vehicle"},
             {"detect_prob", u.detect_prob},
             {"speed_mps", u.speed_mps},
             {"home_hub", u.home_hub},
             {"range_m", u.range_m},
             {"tracking_capacity", u.tracking_capacity},
             {"prob_note", u.prob_note}});
    doc["primaries"] = nlohmann::json::array();
    for (const auto& o : sc.scenario.primaries)
        doc["primaries"].push_back({{"site_id", o.site_id},
                                    {"lon", o.position.lon_deg},
                                    {"lat", o.position.lat_deg},
                                    {"alt_m", o.position.alt_m},
                                    {"fail_step", o.fail_step},
                                    {"repair_steps", o.repair_steps}});
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write scenario: " + path.string());
    out << doc.dump(2) << '\n';
}

void write_gantt_csv(const DispatchSchedule& schedule, const FailureScenario& scenario,
                     const std::vector<Hub>& hubs, const std::vector<BackupUnit>& backups,
                     std::ostream& out) {
    out << "unit,site,start,end\n";
    for (const auto& row : summarize(schedule, scenario, hubs, backups)) {
        if (row.active_periods == 0) continue;
        out << '"' << row.unit << '"' << ',' << row.site_id << ',' << row.active_start << ','
            << row.active_end << '\n';
    }
}

}  // namespace sam3r

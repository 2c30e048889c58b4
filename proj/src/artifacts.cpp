#include "sam3r/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"
#include "sam3r/errors.hpp"

namespace sam3r {

namespace {

using nlohmann::json;

json meta_json(const ArtifactMeta& meta) {
    return {{"config_hash", meta.config_hash}, {"seed", meta.seed}};
}

void dump_to(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write artifact: " + path.string());
    out << doc.dump(2) << '\n';
}

json site_feature(const CandidateSite& site, const std::string& type_id, int count,
                  const std::string& role) {
    return {{"type", "Feature"},
            {"geometry",
             {{"type", "Point"},
              {"coordinates", {site.position.lon_deg, site.position.lat_deg}}}},
            {"properties",
             {{"site_id", site.id},
              {"sensor_type", type_id},
              {"count", count},
              {"role", role}}}};
}

}  // namespace

void write_plan_json(const DeploymentPlan& plan, const std::vector<SensorSpec>& catalog,
                     const std::vector<CandidateSite>& sites, double target,
                     const ArtifactMeta& meta, const std::filesystem::path& path) {
    json doc;
    doc["_meta"] = meta_json(meta);
    doc["H"] = target;
    doc["total_cost"] = plan.total_cost;
    doc["min_achieved"] = plan.min_achieved;
    doc["achieved_per_step"] = plan.achieved;
    doc["catalog_ids"] = json::array();
    for (const auto& s : catalog) doc["catalog_ids"].push_back(s.id);
    doc["sites"] = json::array();
    for (std::size_t i = 0; i < plan.sets.size(); ++i) {
        json sets = json::object();
        for (std::size_t s = 0; s < catalog.size(); ++s)
            if (plan.sets[i][s] > 0) sets[catalog[s].id] = plan.sets[i][s];
        if (sets.empty() && !plan.active[i]) continue;
        doc["sites"].push_back({{"site_id", sites[i].id},
                                {"lon", sites[i].position.lon_deg},
                                {"lat", sites[i].position.lat_deg},
                                {"alt_m", sites[i].position.alt_m},
                                {"active", plan.active[i] != 0},
                                {"sets", sets}});
    }
    dump_to(doc, path);
}

DeploymentPlan load_plan_json(const std::filesystem::path& path,
                              const std::vector<SensorSpec>& catalog,
                              const std::vector<CandidateSite>& sites) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plan: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("plan " + path.string() + ": " + e.what());
    }

    std::map<std::string, int> type_index;
    for (std::size_t s = 0; s < catalog.size(); ++s) type_index[catalog[s].id] = s;
    std::map<int, int> site_index;
    for (std::size_t i = 0; i < sites.size(); ++i) site_index[sites[i].id] = i;

    DeploymentPlan plan;
    plan.sets.assign(sites.size(), std::vector<int>(catalog.size(), 0));
    plan.active.assign(sites.size(), 0);
    try {
        plan.total_cost = doc.value("total_cost", 0.0);
        plan.min_achieved = doc.value("min_achieved", 0.0);
        for (const auto& js : doc.at("sites")) {
            const int sid = js.at("site_id").get<int>();
            auto si = site_index.find(sid);
            if (si == site_index.end())
                throw ParseError("plan " + path.string() + ": site id " + std::to_string(sid) +
                                 " is not a current candidate site");
            for (const auto& [tid, count] : js.at("sets").items()) {
                auto ti = type_index.find(tid);
                if (ti == type_index.end())
                    throw ParseError("plan " + path.string() + ": unknown sensor type '" + tid +
                                     "'");
                plan.sets[si->second][ti->second] = count.get<int>();
            }
            plan.active[si->second] = js.value("active", true) ? 1 : 0;
        }
    } catch (const json::exception& e) {
        throw ParseError("plan " + path.string() + ": " + e.what());
    }
    return plan;
}

void write_augmentation_json(const AugmentationPlan& plan,
                             const std::vector<SensorSpec>& catalog,
                             const std::vector<CandidateSite>& sites, double sigma,
                             const ArtifactMeta& meta, const std::filesystem::path& path) {
    json doc;
    doc["_meta"] = meta_json(meta);
    doc["sigma"] = sigma;
    doc["add_cost"] = plan.add_cost;
    doc["sites"] = json::array();
    for (std::size_t i = 0; i < plan.n_total.size(); ++i) {
        json exist = json::object(), add = json::object();
        bool any = false;
        for (std::size_t s = 0; s < catalog.size(); ++s) {
            if (plan.n_exist[i][s] > 0) { exist[catalog[s].id] = plan.n_exist[i][s]; any = true; }
            if (plan.n_add[i][s] > 0) { add[catalog[s].id] = plan.n_add[i][s]; any = true; }
        }
        if (!any) continue;
        doc["sites"].push_back({{"site_id", sites[i].id},
                                {"lon", sites[i].position.lon_deg},
                                {"lat", sites[i].position.lat_deg},
                                {"existing", exist},
                                {"added", add}});
    }
    dump_to(doc, path);
}

void write_dispatch_json(const DispatchSchedule& schedule, const FailureScenario& scenario,
                         const std::vector<Hub>& hubs, const std::vector<BackupUnit>& backups,
                         const ArtifactMeta& meta, const std::filesystem::path& path) {
    json doc;
    doc["_meta"] = meta_json(meta);
    doc["objective"] = schedule.objective;
    doc["summary"] = json::array();
    for (const auto& row : summarize(schedule, scenario, hubs, backups))
        doc["summary"].push_back({{"unit", row.unit},
                                  {"hub_id", row.hub_id},
                                  {"site_id", row.site_id},
                                  {"dispatch_step", row.dispatch_step},
                                  {"travel_steps", row.travel_steps},
                                  {"arrival_step", row.arrival_step},
                                  {"active_start", row.active_start},
                                  {"active_end", row.active_end},
                                  {"active_periods", row.active_periods}});
    doc["dispatches"] = json::array();
    for (const auto& d : schedule.dispatches)
        doc["dispatches"].push_back({{"backup_id", backups[d.backup].id},
                                     {"hub_id", hubs[d.hub].id},
                                     {"site_id", scenario.primaries[d.primary].site_id},
                                     {"step", d.step}});
    doc["actives"] = json::array();
    for (const auto& a : schedule.actives)
        doc["actives"].push_back({{"backup_id", backups[a.backup].id},
                                  {"site_id", scenario.primaries[a.primary].site_id},
                                  {"step", a.step}});
    dump_to(doc, path);
}

DispatchSchedule load_dispatch_json(const std::filesystem::path& path,
                                    const FailureScenario& scenario,
                                    const std::vector<Hub>& hubs,
                                    const std::vector<BackupUnit>& backups) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dispatch schedule: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("dispatch schedule " + path.string() + ": " + e.what());
    }

    std::map<int, int> backup_index, hub_index, site_index;
    for (std::size_t b = 0; b < backups.size(); ++b) backup_index[backups[b].id] = b;
    for (std::size_t h = 0; h < hubs.size(); ++h) hub_index[hubs[h].id] = h;
    for (std::size_t o = 0; o < scenario.primaries.size(); ++o)
        site_index[scenario.primaries[o].site_id] = o;
    auto lookup = [&](std::map<int, int>& m, int id, const char* what) {
        auto it = m.find(id);
        if (it == m.end())
            throw ParseError("dispatch schedule: unknown " + std::string(what) + " id " +
                             std::to_string(id));
        return it->second;
    };

    DispatchSchedule out;
    try {
        out.objective = doc.value("objective", 0.0);
        for (const auto& j : doc.at("dispatches"))
            out.dispatches.push_back({lookup(backup_index, j.at("backup_id"), "backup"),
                                      lookup(hub_index, j.at("hub_id"), "hub"),
                                      lookup(site_index, j.at("site_id"), "site"),
                                      j.at("step").get<int>()});
        for (const auto& j : doc.at("actives"))
            out.actives.push_back({lookup(backup_index, j.at("backup_id"), "backup"),
                                   lookup(site_index, j.at("site_id"), "site"),
                                   j.at("step").get<int>()});
    } catch (const json::exception& e) {
        throw ParseError("dispatch schedule " + path.string() + ": " + e.what());
    }
    return out;
}

AugmentationPlan load_augmentation_json(const std::filesystem::path& path,
                                        const std::vector<SensorSpec>& catalog,
                                        const std::vector<CandidateSite>& sites) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open augmentation plan: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("augmentation " + path.string() + ": " + e.what());
    }

    std::map<std::string, int> type_index;
    for (std::size_t s = 0; s < catalog.size(); ++s) type_index[catalog[s].id] = s;
    std::map<int, int> site_index;
    for (std::size_t i = 0; i < sites.size(); ++i) site_index[sites[i].id] = i;

    AugmentationPlan plan;
    plan.n_exist.assign(sites.size(), std::vector<int>(catalog.size(), 0));
    plan.n_add = plan.n_exist;
    plan.n_total = plan.n_exist;
    plan.active.assign(sites.size(), 0);
    try {
        plan.add_cost = doc.value("add_cost", 0.0);
        for (const auto& js : doc.at("sites")) {
            auto si = site_index.find(js.at("site_id").get<int>());
            if (si == site_index.end())
                throw ParseError("augmentation " + path.string() + ": unknown site id");
            auto fill = [&](const char* key, std::vector<std::vector<int>>& target) {
                for (const auto& [tid, count] : js.at(key).items()) {
                    auto ti = type_index.find(tid);
                    if (ti == type_index.end())
                        throw ParseError("augmentation: unknown sensor type '" + tid + "'");
                    target[si->second][ti->second] = count.get<int>();
                }
            };
            fill("existing", plan.n_exist);
            fill("added", plan.n_add);
        }
    } catch (const json::exception& e) {
        throw ParseError("augmentation " + path.string() + ": " + e.what());
    }
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t s = 0; s < catalog.size(); ++s) {
            plan.n_total[i][s] = plan.n_exist[i][s] + plan.n_add[i][s];
            if (plan.n_total[i][s] > 0) plan.active[i] = 1;
        }
    return plan;
}

std::string plan_geojson(const DeploymentPlan& plan, const std::vector<SensorSpec>& catalog,
                         const std::vector<CandidateSite>& sites, const ArtifactMeta& meta) {
    json doc;
    doc["type"] = "FeatureCollection";
    doc["_meta"] = meta_json(meta);
    doc["features"] = json::array();
    for (std::size_t i = 0; i < plan.sets.size(); ++i)
        for (std::size_t s = 0; s < catalog.size(); ++s)
            if (plan.sets[i][s] > 0)
                doc["features"].push_back(
                    site_feature(sites[i], catalog[s].id, plan.sets[i][s], "existing"));
    return doc.dump(2) + "\n";
}

std::string augmentation_geojson(const AugmentationPlan& plan,
                                 const std::vector<SensorSpec>& catalog,
                                 const std::vector<CandidateSite>& sites,
                                 const ArtifactMeta& meta) {
    json doc;
    doc["type"] = "FeatureCollection";
    doc["_meta"] = meta_json(meta);
    doc["features"] = json::array();
    for (std::size_t i = 0; i < plan.n_total.size(); ++i)
        for (std::size_t s = 0; s < catalog.size(); ++s) {
            if (plan.n_exist[i][s] > 0)
                doc["features"].push_back(
                    site_feature(sites[i], catalog[s].id, plan.n_exist[i][s], "existing"));
            if (plan.n_add[i][s] > 0)
                doc["features"].push_back(
                    site_feature(sites[i], catalog[s].id, plan.n_add[i][s], "added"));
        }
    return doc.dump(2) + "\n";
}

std::string hubs_geojson(const std::vector<Hub>& hubs, const ArtifactMeta& meta) {
    json doc;
    doc["type"] = "FeatureCollection";
    doc["_meta"] = meta_json(meta);
    doc["features"] = json::array();
    for (const auto& h : hubs)
        doc["features"].push_back(
            {{"type", "Feature"},
             {"geometry",
              {{"type", "Point"}, {"coordinates", {h.position.lon_deg, h.position.lat_deg}}}},
             {"properties",
              {{"site_id", h.id}, {"sensor_type", ""}, {"count", 0}, {"role", "backup-hub"}}}});
    return doc.dump(2) + "\n";
}

void write_plot_csv(const std::string& corridor, const std::vector<PlotPoint>& points,
                    const ArtifactMeta& meta, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write plot CSV: " + path.string());
    out << "# config_hash=" << meta.config_hash << " seed=" << meta.seed << '\n';
    out << "corridor,H,sensor_count,total_cost\n";
    char buf[160];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%d,%.2f\n", corridor.c_str(), p.threshold,
                      p.sensor_count, p.total_cost);
        out << buf;
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write: " + path.string());
    out << text;
}

}  // namespace sam3r

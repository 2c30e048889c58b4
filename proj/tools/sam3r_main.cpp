#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sam3r/artifacts.hpp"
#include "sam3r/config.hpp"
#include "sam3r/detection.hpp"
#include "sam3r/errors.hpp"
#include "sam3r/geo.hpp"
#include "sam3r/plan_reliability.hpp"
#include "sam3r/plan_resiliency.hpp"
#include "sam3r/plan_robustness.hpp"
#include "sam3r/schedule.hpp"

namespace fs = std::filesystem;
using namespace sam3r;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

struct Context {
    ToolkitConfig cfg;
    fs::path out_dir;

    ArtifactMeta meta() const { return {cfg.config_hash, cfg.seed}; }

    TerrainCloud load_cloud() const {
        if (cfg.paths.dsm_csv.empty()) throw ConfigError("config: paths.dsm_csv is required");
        return parse_dsm_csv_file(cfg.paths.dsm_csv, cfg.grid_cell_m);
    }

    std::vector<SensorSpec> load_catalog() const {
        if (cfg.paths.catalog.empty()) return builtin_primary_catalog();
        return load_catalog_json(cfg.paths.catalog);
    }

    const CorridorPath& corridor() const {
        if (!cfg.corridor) throw ConfigError("config: a corridor block is required");
        return *cfg.corridor;
    }

    std::vector<CandidateSite> make_sites(const TerrainCloud& cloud) const {
        return sample_candidate_sites(corridor(), cfg.site_spacing_m, cfg.mast_height_m,
                                      cfg.site_capacity, &cloud, cfg.reclassify_radius_m);
    }

    FlightSchedule load_schedule(const fs::path& override_path = {}) const {
        fs::path p = override_path.empty() ? cfg.paths.schedule : override_path;
        if (p.empty()) p = out_dir / "schedule.csv";
        return parse_schedule_csv_file(p);
    }

    DetectionTensor make_tensor(const std::vector<CandidateSite>& sites,
                                const std::vector<SensorSpec>& catalog,
                                const FlightSchedule& schedule,
                                const TerrainCloud& cloud) const {
        return build_tensor(sites, catalog, schedule, cloud, cfg.decay, cfg.los, cfg.acoustic,
                            cfg.net);
    }
};

void write_terrain_summary(const TerrainCloud& cloud, const Context& ctx,
                           const fs::path& path) {
    std::map<std::string, int> counts;
    for (const auto& p : cloud.points()) counts[terrain_class_name(p.cls)] += 1;
    nlohmann::json doc;
    doc["_meta"] = {{"config_hash", ctx.cfg.config_hash}, {"seed", ctx.cfg.seed}};
    doc["points"] = cloud.size();
    doc["class_counts"] = counts;
    doc["grid_cell_m"] = cloud.grid_cell_m();
    doc["origin"] = {{"lon", cloud.frame().origin.lon_deg},
                     {"lat", cloud.frame().origin.lat_deg}};
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write: " + path.string());
    out << doc.dump(2) << '\n';
}

int cmd_ingest_dsm(const Context& ctx) {
    TerrainCloud cloud = ctx.load_cloud();
    save_terrain_cache(cloud, ctx.out_dir / "terrain_cache.bin");
    write_terrain_summary(cloud, ctx, ctx.out_dir / "terrain_summary.json");
    std::cout << "ingested " << cloud.size() << " points -> " << (ctx.out_dir / "terrain_cache.bin").string()
              << '\n';
    return kExitOk;
}

int cmd_reclassify(const Context& ctx) {
    TerrainCloud cloud = reclassify(ctx.load_cloud(), ctx.cfg.reclassify_radius_m);
    {
        std::ofstream out(ctx.out_dir / "terrain_reclassified.csv");
        if (!out) throw ParseError("cannot write reclassified CSV");
        out << "# config_hash=" << ctx.cfg.config_hash << " seed=" << ctx.cfg.seed << '\n';
        write_dsm_csv(cloud, out);
    }
    save_terrain_cache(cloud, ctx.out_dir / "terrain_cache.bin");
    write_terrain_summary(cloud, ctx, ctx.out_dir / "terrain_summary.json");
    std::cout << "reclassified " << cloud.size() << " points\n";
    return kExitOk;
}

int cmd_gen_schedule(const Context& ctx) {
    if (!ctx.cfg.has_seed) throw ConfigError("config: a seed is required to generate schedules");
    FlightSchedule sched = build_schedule(ctx.corridor(), ctx.cfg.demand, ctx.cfg.distributions,
                                          ctx.cfg.trajectory);
    const fs::path path =
        ctx.cfg.paths.schedule.empty() ? ctx.out_dir / "schedule.csv" : ctx.cfg.paths.schedule;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write schedule: " + path.string());
    out << "# config_hash=" << ctx.cfg.config_hash << " seed=" << ctx.cfg.seed << '\n';
    write_schedule_csv(sched, out);
    std::cout << "schedule: " << sched.num_aircraft() << " aircraft slots, " << sched.num_steps()
              << " steps -> " << path.string() << '\n';
    return kExitOk;
}

int cmd_build_tensor(const Context& ctx) {
    TerrainCloud cloud = ctx.load_cloud();
    auto catalog = ctx.load_catalog();
    FlightSchedule sched = ctx.load_schedule();
    auto sites = ctx.make_sites(cloud);
    DetectionTensor tensor = ctx.make_tensor(sites, catalog, sched, cloud);

    nlohmann::json doc;
    doc["_meta"] = {{"config_hash", ctx.cfg.config_hash}, {"seed", ctx.cfg.seed}};
    doc["dims"] = {{"sites", tensor.num_sites()},
                   {"types", tensor.num_types()},
                   {"aircraft", tensor.num_aircraft()},
                   {"steps", tensor.num_steps()}};
    doc["epsilon"] = tensor.epsilon();
    doc["rho_u"] = nlohmann::json::array();
    for (int t = 0; t < tensor.num_steps(); ++t) doc["rho_u"].push_back(tensor.rho_u(t));
    // Sparse dump: only the detections (q > 0).
    auto entries = nlohmann::json::array();
    for (int i = 0; i < tensor.num_sites(); ++i)
        for (int s = 0; s < tensor.num_types(); ++s)
            for (int k = 0; k < tensor.num_aircraft(); ++k)
                for (int t = 0; t < tensor.num_steps(); ++t)
                    if (tensor.detected(i, s, k, t))
                        entries.push_back({i, s, k, t, tensor.q(i, s, k, t)});
    doc["q_entries"] = std::move(entries);
    std::ofstream out(ctx.out_dir / "tensor.json");
    if (!out) throw ParseError("cannot write tensor.json");
    out << doc.dump() << '\n';
    std::cout << "tensor " << tensor.num_sites() << "x" << tensor.num_types() << "x"
              << tensor.num_aircraft() << "x" << tensor.num_steps() << " with "
              << doc["q_entries"].size() << " detections\n";
    return kExitOk;
}

int cmd_plan_reliability(const Context& ctx) {
    TerrainCloud cloud = ctx.load_cloud();
    auto catalog = ctx.load_catalog();
    FlightSchedule sched = ctx.load_schedule();
    auto sites = ctx.make_sites(cloud);
    DetectionTensor tensor = ctx.make_tensor(sites, catalog, sched, cloud);

    ReliabilityOptions opts;
    opts.target = ctx.cfg.reliability_target;
    opts.per_aircraft_rows = ctx.cfg.per_aircraft_rows;
    opts.node_budget = ctx.cfg.node_budget;
    DeploymentPlan plan = plan_reliability(tensor, catalog, sites, opts);

    write_plan_json(plan, catalog, sites, opts.target, ctx.meta(), ctx.out_dir / "plan.json");
    write_text_file(ctx.out_dir / "plan.geojson", plan_geojson(plan, catalog, sites, ctx.meta()));
    std::cout << "plan: cost " << plan.total_cost << ", " << plan.total_sets()
              << " sets, min achieved " << plan.min_achieved << '\n';
    return kExitOk;
}

int cmd_plan_robustness(const Context& ctx) {
    TerrainCloud cloud = ctx.load_cloud();
    auto catalog = ctx.load_catalog();
    auto sites = ctx.make_sites(cloud);
    FlightSchedule surge = ctx.load_schedule(ctx.cfg.paths.surge_schedule);
    DetectionTensor tensor = ctx.make_tensor(sites, catalog, surge, cloud);

    const fs::path plan_path =
        ctx.cfg.paths.plan.empty() ? ctx.out_dir / "plan.json" : ctx.cfg.paths.plan;
    DeploymentPlan existing = load_plan_json(plan_path, catalog, sites);

    RobustnessParams params =
        robustness_params_from_tensor(tensor, catalog, ctx.cfg.sigma, ctx.cfg.max_vert);
    AugmentationPlan plan = augment(existing, params, ctx.cfg.node_budget);

    write_augmentation_json(plan, catalog, sites, ctx.cfg.sigma, ctx.meta(),
                            ctx.out_dir / "augmentation.json");
    write_text_file(ctx.out_dir / "augmentation.geojson",
                    augmentation_geojson(plan, catalog, sites, ctx.meta()));
    int added = 0;
    for (const auto& row : plan.n_add)
        for (int v : row) added += v;
    std::cout << "augmentation: " << added << " additional sets, cost " << plan.add_cost << '\n';
    return kExitOk;
}

int cmd_plan_resiliency(const Context& ctx) {
    if (ctx.cfg.paths.scenario.empty())
        throw ConfigError("config: paths.scenario is required for plan-resiliency");
    ResiliencyScenario sc = load_scenario_json(ctx.cfg.paths.scenario);
    DispatchSchedule schedule =
        schedule_backups(sc.scenario, sc.hubs, sc.backups, ctx.cfg.node_budget);

    write_dispatch_json(schedule, sc.scenario, sc.hubs, sc.backups, ctx.meta(),
                        ctx.out_dir / "dispatch_schedule.json");
    {
        std::ofstream out(ctx.out_dir / "dispatch_gantt.csv");
        if (!out) throw ParseError("cannot write dispatch_gantt.csv");
        out << "# config_hash=" << ctx.cfg.config_hash << " seed=" << ctx.cfg.seed << '\n';
        write_gantt_csv(schedule, sc.scenario, sc.hubs, sc.backups, out);
    }
    std::cout << "dispatch schedule: " << schedule.dispatches.size() << " dispatches, objective "
              << schedule.objective << '\n';
    return kExitOk;
}

int cmd_validate(const Context& ctx) {
    bool all_ok = true;
    bool checked_any = false;

    const fs::path plan_path =
        ctx.cfg.paths.plan.empty() ? ctx.out_dir / "plan.json" : ctx.cfg.paths.plan;
    if (fs::exists(plan_path)) {
        checked_any = true;
        TerrainCloud cloud = ctx.load_cloud();
        auto catalog = ctx.load_catalog();
        auto sites = ctx.make_sites(cloud);
        FlightSchedule sched = ctx.load_schedule();
        DetectionTensor tensor = ctx.make_tensor(sites, catalog, sched, cloud);
        DeploymentPlan plan = load_plan_json(plan_path, catalog, sites);
        auto achieved = validate_plan(plan, tensor, ctx.cfg.per_aircraft_rows);
        double min_a = 1.0;
        for (int t = 0; t < tensor.num_steps(); ++t)
            if (tensor.any_present(t)) min_a = std::min(min_a, achieved[t]);
        const bool ok = min_a >= ctx.cfg.reliability_target - 1e-9;
        all_ok = all_ok && ok;
        std::cout << (ok ? "[ok] " : "[FAIL] ") << "reliability plan: min achieved " << min_a
                  << " vs H " << ctx.cfg.reliability_target << '\n';

        const fs::path aug_path = ctx.out_dir / "augmentation.json";
        if (fs::exists(aug_path)) {
            FlightSchedule surge = ctx.load_schedule(ctx.cfg.paths.surge_schedule);
            DetectionTensor surge_tensor = ctx.make_tensor(sites, catalog, surge, cloud);
            RobustnessParams params = robustness_params_from_tensor(surge_tensor, catalog,
                                                                    ctx.cfg.sigma,
                                                                    ctx.cfg.max_vert);
            AugmentationPlan aug = load_augmentation_json(aug_path, catalog, sites);
            AugmentationCheck check = validate_augmentation(aug, params);
            all_ok = all_ok && check.ok;
            int violated = 0;
            for (const auto& row : check.rows)
                if (!row.satisfied) ++violated;
            std::cout << (check.ok ? "[ok] " : "[FAIL] ") << "augmentation: " << violated
                      << " violated coverage rows of " << check.rows.size() << '\n';
        }
    }

    if (!ctx.cfg.paths.scenario.empty() && fs::exists(ctx.out_dir / "dispatch_schedule.json")) {
        checked_any = true;
        ResiliencyScenario sc = load_scenario_json(ctx.cfg.paths.scenario);
        DispatchSchedule schedule = load_dispatch_json(ctx.out_dir / "dispatch_schedule.json",
                                                       sc.scenario, sc.hubs, sc.backups);
        ScheduleCheck check = validate_schedule(schedule, sc.scenario, sc.hubs, sc.backups);
        all_ok = all_ok && check.ok;
        std::cout << (check.ok ? "[ok] " : "[FAIL] ") << "dispatch schedule: "
                  << check.violations.size() << " violations\n";
        for (const auto& v : check.violations)
            std::cout << "  " << dispatch_rule_name(v.rule) << ": " << v.detail << '\n';
    }

    if (!checked_any) throw ConfigError("validate: no artifacts found to validate");
    if (!all_ok) throw InfeasibleError("validation failed");
    std::cout << "all validations passed\n";
    return kExitOk;
}

int cmd_export_geojson(const Context& ctx) {
    bool wrote = false;
    auto catalog = ctx.load_catalog();
    const fs::path plan_path =
        ctx.cfg.paths.plan.empty() ? ctx.out_dir / "plan.json" : ctx.cfg.paths.plan;
    if (fs::exists(plan_path)) {
        TerrainCloud cloud = ctx.load_cloud();
        auto sites = ctx.make_sites(cloud);
        DeploymentPlan plan = load_plan_json(plan_path, catalog, sites);
        write_text_file(ctx.out_dir / "plan.geojson",
                        plan_geojson(plan, catalog, sites, ctx.meta()));
        wrote = true;
        const fs::path aug_path = ctx.out_dir / "augmentation.json";
        if (fs::exists(aug_path)) {
            AugmentationPlan aug = load_augmentation_json(aug_path, catalog, sites);
            write_text_file(ctx.out_dir / "augmentation.geojson",
                            augmentation_geojson(aug, catalog, sites, ctx.meta()));
        }
    }
    if (!ctx.cfg.paths.scenario.empty() && fs::exists(ctx.cfg.paths.scenario)) {
        ResiliencyScenario sc = load_scenario_json(ctx.cfg.paths.scenario);
        write_text_file(ctx.out_dir / "hubs.geojson", hubs_geojson(sc.hubs, ctx.meta()));
        wrote = true;
    }
    if (!wrote) throw ConfigError("export-geojson: no artifacts found to export");
    std::cout << "geojson exports written to " << ctx.out_dir.string() << '\n';
    return kExitOk;
}

int cmd_emit_plot(const Context& ctx) {
    TerrainCloud cloud = ctx.load_cloud();
    auto catalog = ctx.load_catalog();
    FlightSchedule sched = ctx.load_schedule();
    auto sites = ctx.make_sites(cloud);
    DetectionTensor tensor = ctx.make_tensor(sites, catalog, sched, cloud);

    std::vector<PlotPoint> points;
    for (double h : ctx.cfg.plot_thresholds) {
        ReliabilityOptions opts;
        opts.target = h;
        opts.per_aircraft_rows = ctx.cfg.per_aircraft_rows;
        opts.node_budget = ctx.cfg.node_budget;
        DeploymentPlan plan = plan_reliability(tensor, catalog, sites, opts);
        points.push_back({h, plan.total_sensors(catalog), plan.total_cost});
    }
    write_plot_csv(ctx.corridor().name, points, ctx.meta(),
                   ctx.out_dir / "plot_reliability.csv");
    std::cout << "plot series with " << points.size() << " thresholds -> plot_reliability.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"terrain-aware planning toolkit for low-altitude surveillance sensor networks"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("-c,--config", config_path, "toolkit config JSON")->required();
    std::uint64_t seed_override = 0;
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config RNG seed");

    std::map<std::string, int (*)(const Context&)> handlers = {
        {"ingest-dsm", cmd_ingest_dsm},
        {"reclassify", cmd_reclassify},
        {"gen-schedule", cmd_gen_schedule},
        {"build-tensor", cmd_build_tensor},
        {"plan-reliability", cmd_plan_reliability},
        {"plan-robustness", cmd_plan_robustness},
        {"plan-resiliency", cmd_plan_resiliency},
        {"validate", cmd_validate},
        {"export-geojson", cmd_export_geojson},
        {"emit-plot", cmd_emit_plot},
    };
    const std::map<std::string, std::string> descriptions = {
        {"ingest-dsm", "parse a DSM CSV and build the indexed terrain cache"},
        {"reclassify", "infer vegetation/building classes for unclassified points"},
        {"gen-schedule", "generate a seeded flight schedule along the corridor"},
        {"build-tensor", "evaluate the detection chain for every site/type/aircraft/step"},
        {"plan-reliability", "solve the baseline placement model"},
        {"plan-robustness", "solve the augmentation model against a traffic surge"},
        {"plan-resiliency", "solve the backup dispatch model for a failure scenario"},
        {"validate", "re-check existing artifacts with the independent validators"},
        {"export-geojson", "write GeoJSON maps for existing artifacts"},
        {"emit-plot", "sweep reliability thresholds and write the cost/count series"},
    };
    for (const auto& [name, desc] : descriptions) app.add_subcommand(name, desc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Context ctx;
        ctx.cfg = load_config(config_path);
        if (seed_opt->count() > 0) {
            ctx.cfg.seed = seed_override;
            ctx.cfg.has_seed = true;
            ctx.cfg.trajectory.seed = seed_override;
        }
        ctx.out_dir = ctx.cfg.paths.out_dir;
        std::filesystem::create_directories(ctx.out_dir);
        return handlers.at(command)(ctx);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        try {
            ToolkitConfig cfg = load_config(config_path);
            nlohmann::json diag{{"command", command},
                                {"error", e.what()},
                                {"config_hash", cfg.config_hash},
                                {"seed", cfg.seed}};
            std::ofstream out(fs::path(cfg.paths.out_dir) / "diagnostics.json");
            out << diag.dump(2) << '\n';
        } catch (...) {
        }
        return kExitInfeasible;
    } catch (const BudgetError& e) {
        std::cerr << "budget exhausted: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

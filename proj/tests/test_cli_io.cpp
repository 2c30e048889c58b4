#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sam3r/config.hpp"
#include "sam3r/errors.hpp"

namespace fs = std::filesystem;
using namespace sam3r;

namespace {

struct Sandbox {
    fs::path dir;

    explicit Sandbox(const std::string& name) {
        dir = fs::temp_directory_path() / ("sam3r_cli_" + name + "_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::copy(fs::path(SAM3R_FIXTURE_DIR) / "demo", dir, fs::copy_options::recursive);
    }
    ~Sandbox() { fs::remove_all(dir); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(SAM3R_CLI_PATH) + " --config " +
                                (dir / "config.json").string() + " " + args + " > " +
                                (dir / "stdout.txt").string() + " 2> " +
                                (dir / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }

    std::string slurp(const fs::path& rel) const {
        std::ifstream in(dir / rel);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    }

    void patch_config(const std::function<void(nlohmann::json&)>& edit) const {
        nlohmann::json doc;
        {
            std::ifstream in(dir / "config.json");
            in >> doc;
        }
        edit(doc);
        std::ofstream out(dir / "config.json");
        out << doc.dump(2) << '\n';
    }
};

}  // namespace

TEST_CASE("config loads with hash, seed and resolved paths") {
    Sandbox box("cfg");
    ToolkitConfig cfg = load_config(box.dir / "config.json");
    CHECK(cfg.has_seed);
    CHECK(cfg.seed == 7);
    CHECK_FALSE(cfg.config_hash.empty());
    CHECK(fs::exists(cfg.paths.dsm_csv));
    CHECK(cfg.corridor.has_value());
    CHECK(cfg.reliability_target == 0.95);
    CHECK(cfg.plot_thresholds.size() == 5);

    // The hash tracks the bytes.
    box.patch_config([](nlohmann::json& doc) { doc["seed"] = 8; });
    ToolkitConfig changed = load_config(box.dir / "config.json");
    CHECK(changed.config_hash != cfg.config_hash);
}

TEST_CASE("usage errors exit 1, input errors exit 2") {
    Sandbox box("usage");
    const std::string binary(SAM3R_CLI_PATH);
    int status = std::system((binary + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 1);  // missing config + subcommand
    status = std::system((binary + " --config nope.json bogus-cmd > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 1);
    status = std::system((binary + " --config nope.json validate > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 2);  // config file missing

    // Malformed DSM rows surface as input errors.
    {
        std::ofstream bad(box.dir / "dsm.csv");
        bad << "Longitude,Latitude,Altitude_ft,Classification\na,b,c,d\n";
    }
    CHECK(box.run("ingest-dsm") == 2);
    CHECK(box.slurp("stderr.txt").find("line 2") != std::string::npos);
}

TEST_CASE("full pipeline produces validated artifacts") {
    Sandbox box("pipeline");
    REQUIRE(box.run("ingest-dsm") == 0);
    CHECK(fs::exists(box.dir / "out/terrain_cache.bin"));
    CHECK(fs::exists(box.dir / "out/terrain_summary.json"));

    REQUIRE(box.run("reclassify") == 0);
    CHECK(fs::exists(box.dir / "out/terrain_reclassified.csv"));
    {
        // Reclassification leaves no unclassified points behind.
        auto doc = nlohmann::json::parse(box.slurp("out/terrain_summary.json"));
        CHECK(doc["class_counts"].value("Unclassified", 0) == 0);
    }

    REQUIRE(box.run("gen-schedule") == 0);
    CHECK(fs::exists(box.dir / "out/schedule.csv"));
    CHECK(box.slurp("out/schedule.csv").find("config_hash=") != std::string::npos);

    REQUIRE(box.run("build-tensor") == 0);
    CHECK(fs::exists(box.dir / "out/tensor.json"));

    REQUIRE(box.run("plan-reliability") == 0);
    CHECK(fs::exists(box.dir / "out/plan.json"));
    CHECK(fs::exists(box.dir / "out/plan.geojson"));
    {
        auto doc = nlohmann::json::parse(box.slurp("out/plan.json"));
        CHECK(doc["min_achieved"].get<double>() >= 0.95);
        CHECK(doc["_meta"].contains("config_hash"));
        auto geo = nlohmann::json::parse(box.slurp("out/plan.geojson"));
        CHECK(geo["type"] == "FeatureCollection");
        REQUIRE(geo["features"].size() > 0);
        CHECK(geo["features"][0]["properties"].contains("role"));
    }

    // Same traffic as the baseline: the existing network already satisfies
    // sigma, so the augmentation is free.
    REQUIRE(box.run("plan-robustness") == 0);
    {
        auto doc = nlohmann::json::parse(box.slurp("out/augmentation.json"));
        CHECK(doc["add_cost"].get<double>() == 0.0);
    }

    REQUIRE(box.run("plan-resiliency") == 0);
    CHECK(fs::exists(box.dir / "out/dispatch_schedule.json"));
    CHECK(fs::exists(box.dir / "out/dispatch_gantt.csv"));
    {
        auto doc = nlohmann::json::parse(box.slurp("out/dispatch_schedule.json"));
        CHECK(doc["dispatches"].size() >= 2);  // both failures covered
    }

    REQUIRE(box.run("validate") == 0);
    CHECK(box.slurp("stdout.txt").find("all validations passed") != std::string::npos);

    REQUIRE(box.run("export-geojson") == 0);
    CHECK(fs::exists(box.dir / "out/hubs.geojson"));
}

TEST_CASE("unreachable reliability target exits 3 with a diagnostic") {
    Sandbox box("infeasible");
    box.patch_config([](nlohmann::json& doc) { doc["reliability"]["H"] = 0.9999999; });
    REQUIRE(box.run("gen-schedule") == 0);
    CHECK(box.run("plan-reliability") == 3);
    CHECK(fs::exists(box.dir / "out/diagnostics.json"));
    auto doc = nlohmann::json::parse(box.slurp("out/diagnostics.json"));
    CHECK(doc["error"].get<std::string>().find("unreachable") != std::string::npos);
}

TEST_CASE("a catalog file with km ranges matches the builtin catalog") {
    Sandbox builtin("cat_a"), from_file("cat_b");
    from_file.patch_config(
        [](nlohmann::json& doc) { doc["paths"]["catalog"] = "catalog.json"; });
    for (auto* box : {&builtin, &from_file}) {
        REQUIRE(box->run("gen-schedule") == 0);
        REQUIRE(box->run("plan-reliability") == 0);
    }
    auto a = nlohmann::json::parse(builtin.slurp("out/plan.json"));
    auto b = nlohmann::json::parse(from_file.slurp("out/plan.json"));
    CHECK(a["total_cost"] == b["total_cost"]);
    CHECK(a["sites"] == b["sites"]);
}

TEST_CASE("robustness against a surged schedule file stays green") {
    Sandbox box("surge");
    REQUIRE(box.run("gen-schedule") == 0);
    REQUIRE(box.run("plan-reliability") == 0);

    // Generate a denser schedule into a separate file and augment against it.
    box.patch_config([](nlohmann::json& doc) {
        doc["schedule"]["demand"] = {{"air_metro", 30}, {"emergency", 20}, {"cargo", 10}};
        doc["paths"]["schedule"] = "out/surge.csv";
    });
    REQUIRE(box.run("gen-schedule") == 0);
    box.patch_config([](nlohmann::json& doc) {
        doc["paths"].erase("schedule");
        doc["paths"]["surge_schedule"] = "out/surge.csv";
    });
    REQUIRE(box.run("plan-robustness") == 0);
    auto doc = nlohmann::json::parse(box.slurp("out/augmentation.json"));
    CHECK(doc["add_cost"].get<double>() >= 0.0);
    CHECK(doc.contains("sites"));
}

TEST_CASE("an exhausted node budget exits 4") {
    Sandbox box("budget");
    box.patch_config([](nlohmann::json& doc) { doc["solver"]["node_budget"] = 1; });
    REQUIRE(box.run("gen-schedule") == 0);
    CHECK(box.run("plan-reliability") == 4);
}

TEST_CASE("generation commands demand a seed") {
    Sandbox box("noseed");
    box.patch_config([](nlohmann::json& doc) { doc.erase("seed"); });
    CHECK(box.run("gen-schedule") == 2);
}

TEST_CASE("identical config and seed reproduce identical bytes") {
    Sandbox a("det_a"), b("det_b");
    for (auto* box : {&a, &b}) {
        REQUIRE(box->run("gen-schedule") == 0);
        REQUIRE(box->run("plan-reliability") == 0);
    }
    CHECK(a.slurp("out/schedule.csv") == b.slurp("out/schedule.csv"));
    CHECK(a.slurp("out/plan.json") == b.slurp("out/plan.json"));
    CHECK(a.slurp("out/plan.geojson") == b.slurp("out/plan.geojson"));

    // A different seed changes the schedule.
    Sandbox c("det_c");
    c.patch_config([](nlohmann::json& doc) { doc["seed"] = 1234; });
    REQUIRE(c.run("gen-schedule") == 0);
    CHECK(a.slurp("out/schedule.csv") != c.slurp("out/schedule.csv"));
}

TEST_CASE("the --seed flag overrides the config seed deterministically") {
    Sandbox a("seed_a"), b("seed_b");
    REQUIRE(a.run("gen-schedule --seed 99") == 0);
    REQUIRE(b.run("gen-schedule --seed 99") == 0);
    CHECK(a.slurp("out/schedule.csv") == b.slurp("out/schedule.csv"));
    CHECK(a.slurp("out/schedule.csv").find("seed=99") != std::string::npos);

    Sandbox c("seed_c");
    REQUIRE(c.run("gen-schedule") == 0);  // config seed 7
    CHECK(a.slurp("out/schedule.csv") != c.slurp("out/schedule.csv"));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sam3r/errors.hpp"
#include "sam3r/geo.hpp"

using namespace sam3r;

namespace {

// Independent great-circle oracle for the local-frame distance property.
double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    constexpr double kEarthRadiusM = 6371000.0;
    const double phi1 = a.lat_deg * M_PI / 180.0, phi2 = b.lat_deg * M_PI / 180.0;
    const double dphi = phi2 - phi1;
    const double dlam = (b.lon_deg - a.lon_deg) * M_PI / 180.0;
    const double s = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(s));
}

TerrainCloud make_cloud(const std::vector<std::tuple<double, double, double, int>>& rows,
                        double cell = 50.0) {
    std::vector<TerrainPoint> pts;
    for (auto [lon, lat, alt, cls] : rows)
        pts.push_back({{lon, lat, alt}, static_cast<TerrainClass>(cls)});
    return TerrainCloud::build(std::move(pts), cell);
}

}  // namespace

TEST_CASE("parse_dsm_csv converts feet and keeps classes") {
    std::istringstream in(
        "Longitude,Latitude,Altitude_ft,Classification\n"
        "-81.02885608, 40.06759534, 1193.69, 1\n"
        "-81.02883988, 40.06836594, 1191.92, 2\n");
    TerrainCloud cloud = parse_dsm_csv(in);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points()[0].position.alt_m == doctest::Approx(363.84).epsilon(1e-4));
    CHECK(cloud.points()[0].position.alt_m == doctest::Approx(1193.69 * 0.3048).epsilon(1e-12));
    CHECK(cloud.points()[0].cls == TerrainClass::Unclassified);
    CHECK(cloud.points()[1].cls == TerrainClass::Ground);
}

TEST_CASE("parse_dsm_csv skips leading metadata comment lines") {
    std::istringstream in(
        "# config_hash=abc123 seed=7\n"
        "Longitude,Latitude,Altitude_ft,Classification\n"
        "-81.0, 40.0, 1000.0, 2\n");
    TerrainCloud cloud = parse_dsm_csv(in);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points()[0].cls == TerrainClass::Ground);
}

TEST_CASE("parse_dsm_csv rejects bad input with line numbers") {
    std::istringstream bad("Longitude,Latitude,Altitude_ft,Classification\na,b,c,d\n");
    CHECK_THROWS_WITH_AS(parse_dsm_csv(bad), doctest::Contains("line 2"), ParseError);

    std::istringstream bad_cls(
        "Longitude,Latitude,Altitude_ft,Classification\n-81,40,1000,9\n");
    CHECK_THROWS_AS(parse_dsm_csv(bad_cls), ParseError);

    std::istringstream empty("");
    CHECK_THROWS_AS(parse_dsm_csv(empty), ParseError);

    std::istringstream no_rows("Longitude,Latitude,Altitude_ft,Classification\n");
    CHECK_THROWS_AS(parse_dsm_csv(no_rows), ParseError);

    std::istringstream bad_header("Lon,Lat,Alt,Class\n-81,40,1000,1\n");
    CHECK_THROWS_AS(parse_dsm_csv(bad_header), ParseError);
}

TEST_CASE("csv round trip preserves numeric fields to 1e-6 relative") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> lon(-81.1, -81.0), lat(40.0, 40.1),
        alt(900.0, 1400.0);
    std::uniform_int_distribution<int> cls(1, 6);
    std::vector<std::tuple<double, double, double, int>> rows;
    for (int i = 0; i < 200; ++i)
        rows.push_back({lon(rng), lat(rng), alt(rng) * kFeetToMeters, cls(rng)});
    TerrainCloud cloud = make_cloud(rows);

    std::ostringstream out;
    write_dsm_csv(cloud, out);
    std::istringstream in(out.str());
    TerrainCloud back = parse_dsm_csv(in);

    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& a = cloud.points()[i];
        const auto& b = back.points()[i];
        CHECK(b.position.lon_deg ==
              doctest::Approx(a.position.lon_deg).epsilon(1e-6));
        CHECK(b.position.lat_deg ==
              doctest::Approx(a.position.lat_deg).epsilon(1e-6));
        CHECK(b.position.alt_m == doctest::Approx(a.position.alt_m).epsilon(1e-6));
        CHECK(b.cls == a.cls);
    }
}

TEST_CASE("local frame distances match haversine within 0.5% under 1 km") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lon(-81.05, -81.0), lat(40.0, 40.05);
    std::vector<std::tuple<double, double, double, int>> rows;
    for (int i = 0; i < 100; ++i) rows.push_back({lon(rng), lat(rng), 300.0, 2});
    TerrainCloud cloud = make_cloud(rows);

    const auto& pts = cloud.points();
    const auto& xyz = cloud.local_xyz();
    int checked = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double planar = std::hypot(xyz[i].x - xyz[j].x, xyz[i].y - xyz[j].y);
            if (planar > 1000.0) continue;
            const double great = haversine_m(pts[i].position, pts[j].position);
            if (great < 1.0) continue;
            CHECK(std::abs(planar - great) / great < 0.005);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("frame invariant: lon scale is lat scale times cos(origin)") {
    TerrainCloud cloud = make_cloud({{-81.0, 40.0, 300.0, 2}});
    const LocalFrame& f = cloud.frame();
    CHECK(f.m_per_deg_lat > 0);
    CHECK(f.m_per_deg_lon ==
          doctest::Approx(f.m_per_deg_lat * std::cos(f.origin.lat_deg * M_PI / 180.0)));
}

TEST_CASE("query_cylinder equals brute force after exact refilter") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> coord(-500.0, 500.0), altd(0.0, 50.0);
    for (int trial = 0; trial < 25; ++trial) {
        // Random cloud in local-ish coordinates via small lon/lat offsets.
        std::vector<std::tuple<double, double, double, int>> rows;
        const int n = 1 + static_cast<int>(rng() % 400);
        for (int i = 0; i < n; ++i)
            rows.push_back({-81.0 + coord(rng) / 85000.0, 40.0 + coord(rng) / 111320.0,
                            altd(rng), 2});
        TerrainCloud cloud = make_cloud(rows, 37.0);

        const Vec3 a{coord(rng), coord(rng), altd(rng)};
        const Vec3 b{coord(rng), coord(rng), altd(rng)};
        const double radius = 5.0 + std::abs(coord(rng)) / 10.0;

        auto ids = cloud.query_cylinder(a, b, radius);
        std::vector<char> in_super(cloud.size(), 0);
        for (int id : ids) in_super[id] = 1;

        // Exact segment-distance filter over the superset vs over all points.
        auto seg_dist = [&](const Vec3& p) {
            const double vx = b.x - a.x, vy = b.y - a.y;
            const double len2 = vx * vx + vy * vy;
            double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
        };
        // Filtering the superset gives exactly the brute-force qualifying set.
        std::vector<int> filtered_super, filtered_all;
        for (int id : ids)
            if (seg_dist(cloud.local_xyz()[id]) <= radius) filtered_super.push_back(id);
        std::sort(filtered_super.begin(), filtered_super.end());
        filtered_super.erase(std::unique(filtered_super.begin(), filtered_super.end()),
                             filtered_super.end());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const bool qualifies = seg_dist(cloud.local_xyz()[i]) <= radius;
            if (qualifies) {
                CHECK(in_super[i] == 1);  // superset never omits
                filtered_all.push_back(static_cast<int>(i));
            }
        }
        CHECK(filtered_super == filtered_all);
    }
}

TEST_CASE("every point lives in exactly one grid bucket") {
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> lon(-81.05, -81.0), lat(40.0, 40.05);
    std::vector<std::tuple<double, double, double, int>> rows;
    for (int i = 0; i < 300; ++i) rows.push_back({lon(rng), lat(rng), 100.0, 2});
    TerrainCloud cloud = make_cloud(rows, 41.0);

    // A query covering the whole cloud returns each id exactly once.
    auto ids = cloud.query_cylinder({-1e5, -1e5, 0}, {1e5, 1e5, 0}, 1e5);
    std::sort(ids.begin(), ids.end());
    REQUIRE(ids.size() == cloud.size());
    for (std::size_t i = 0; i < ids.size(); ++i) CHECK(ids[i] == static_cast<int>(i));
}

TEST_CASE("query_cylinder trivial cases") {
    TerrainCloud empty;
    CHECK(empty.query_cylinder({0, 0, 0}, {10, 0, 0}, 5.0).empty());

    // Single point on the segment midline.
    TerrainCloud one = make_cloud({{-81.0, 40.0, 10.0, 2}});
    const Vec3 p = one.local_xyz()[0];
    auto ids = one.query_cylinder({p.x - 50, p.y, 0}, {p.x + 50, p.y, 0}, 5.0);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] == 0);
}

TEST_CASE("reclassify assigns vegetation and building classes by height") {
    // Ground reference at 100 m, plus unclassified points at +0.3, +2, +7 m,
    // and an untouched high-vegetation point.
    TerrainCloud cloud = make_cloud({
        {-81.0000, 40.0000, 100.0, 2},
        {-81.0000, 40.00005, 100.3, 1},
        {-81.0001, 40.0000, 102.0, 1},
        {-81.0001, 40.00005, 107.0, 1},
        {-81.0000, 40.0001, 104.0, 5},
    });
    TerrainCloud out = reclassify(cloud, 30.0);
    CHECK(out.points()[1].cls == TerrainClass::LowVegetation);
    CHECK(out.points()[2].cls == TerrainClass::MediumVegetation);
    CHECK(out.points()[3].cls == TerrainClass::Building);
    CHECK(out.points()[4].cls == TerrainClass::HighVegetation);

    // Idempotent: a second pass changes nothing.
    TerrainCloud again = reclassify(out, 30.0);
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(again.points()[i].cls == out.points()[i].cls);
}

TEST_CASE("reclassify boundary heights go to medium vegetation") {
    TerrainCloud cloud = make_cloud({
        {-81.0, 40.0, 100.0, 2},
        {-81.0, 40.00001, 100.5, 1},
        {-81.0, 40.00002, 105.0, 1},
    });
    TerrainCloud out = reclassify(cloud, 30.0);
    CHECK(out.points()[1].cls == TerrainClass::MediumVegetation);
    CHECK(out.points()[2].cls == TerrainClass::MediumVegetation);
}

TEST_CASE("reclassify uses nearest ground when none is within radius") {
    TerrainCloud cloud = make_cloud({
        {-81.0, 40.0, 100.0, 2},
        {-81.01, 40.0, 107.0, 1},  // ~850 m away from the only ground point
    });
    TerrainCloud out = reclassify(cloud, 30.0);
    CHECK(out.points()[1].cls == TerrainClass::Building);
}

TEST_CASE("reclassify without ground points fails") {
    TerrainCloud cloud = make_cloud({{-81.0, 40.0, 100.0, 1}});
    CHECK_THROWS_WITH_AS(reclassify(cloud, 30.0), doctest::Contains("no ground reference"),
                         ConfigError);
}

TEST_CASE("terrain cache round trip") {
    TerrainCloud cloud = make_cloud({
        {-81.02885608, 40.06759534, 363.836712, 1},
        {-81.02883988, 40.06836594, 363.297216, 2},
    });
    const auto path = std::filesystem::temp_directory_path() / "sam3r_cache_test.bin";
    save_terrain_cache(cloud, path);
    TerrainCloud back = load_terrain_cache(path);
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(back.points()[i].position.lon_deg == cloud.points()[i].position.lon_deg);
        CHECK(back.points()[i].position.alt_m == cloud.points()[i].position.alt_m);
        CHECK(back.points()[i].cls == cloud.points()[i].cls);
    }
    std::filesystem::remove(path);

    const auto bogus = std::filesystem::temp_directory_path() / "sam3r_cache_bogus.bin";
    {
        std::ofstream out(bogus, std::ios::binary);
        out << "NOTMAGIC and some trailing bytes";
    }
    CHECK_THROWS_AS(load_terrain_cache(bogus), ParseError);
    std::filesystem::remove(bogus);
}

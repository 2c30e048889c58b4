#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "sam3r/errors.hpp"
#include "sam3r/geo.hpp"
#include "sam3r/los.hpp"

using namespace sam3r;

namespace {

// Full-scan trace of the geometric LOS procedure, no grid index involved.
// Mirrors the same degenerate-segment rule as the engine.
struct BruteResult {
    int candidates = 0;
    int blocked = 0;
    double fraction = 1.0;
};

BruteResult brute_force_los(const Vec3& s, const Vec3& d, const TerrainCloud& cloud,
                            const LosParams& p) {
    BruteResult out;
    if (s.x == d.x && s.y == d.y && s.z == d.z) return out;
    const double vx = d.x - s.x, vy = d.y - s.y;
    const double len = std::hypot(vx, vy);
    for (std::size_t id = 0; id < cloud.size(); ++id) {
        const Vec3& t = cloud.local_xyz()[id];
        double height_at_point;
        if (len < 1e-9) {
            if (std::hypot(t.x - s.x, t.y - s.y) > p.R) continue;
            height_at_point = std::min(s.z, d.z);
        } else {
            const double proj = ((t.x - s.x) * vx + (t.y - s.y) * vy) / len;
            if (proj < 0.0 || proj > len) continue;
            const double cx = s.x + (proj / len) * vx, cy = s.y + (proj / len) * vy;
            if (std::hypot(t.x - cx, t.y - cy) > p.R) continue;
            height_at_point = s.z + (proj / len) * (d.z - s.z);
        }
        ++out.candidates;
        if (t.z >= height_at_point - p.Z) ++out.blocked;
    }
    if (out.candidates > 0) out.fraction = 1.0 - static_cast<double>(out.blocked) / out.candidates;
    return out;
}

TerrainCloud random_cloud(std::mt19937_64& rng, int max_points) {
    std::uniform_real_distribution<double> coord(-600.0, 600.0), alt(0.0, 60.0);
    std::uniform_int_distribution<int> cls(1, 6);
    std::vector<TerrainPoint> pts;
    const int n = 1 + static_cast<int>(rng() % max_points);
    for (int i = 0; i < n; ++i) {
        pts.push_back({{-81.0 + coord(rng) / 85000.0, 40.0 + coord(rng) / 111320.0, alt(rng)},
                       static_cast<TerrainClass>(cls(rng))});
    }
    return TerrainCloud::build(std::move(pts), 50.0);
}

}  // namespace

TEST_CASE("range_check piecewise values") {
    RangeDecayParams p{10.0, 1.0, 0.5, 1.0};
    CHECK(range_check({0, 0, 0}, {9, 0, 0}, p) == 1.0);
    CHECK(range_check({0, 0, 0}, {9.5, 0, 0}, p) ==
          doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    CHECK(range_check({0, 0, 0}, {9.5, 0, 0}, p) == doctest::Approx(0.77880).epsilon(1e-4));
    CHECK(range_check({0, 0, 0}, {11.5, 0, 0}, p) == 0.0);
    CHECK(range_check({0, 0, 0}, {11.0, 0, 0}, p) == 0.0);  // exactly r+e
    CHECK(range_check({0, 0, 0}, {9.0, 0, 0}, p) == 1.0);   // exactly r-e
}

TEST_CASE("range_check monotone nonincreasing in distance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rd(1.0, 500.0), ad(0.1, 3.0), bd(0.5, 2.5);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = rd(rng);
        RangeDecayParams p{r, 0.5 * r * (rng() % 1000) / 1000.0, ad(rng), bd(rng)};
        p.validate();
        double prev = 2.0;
        for (int i = 0; i <= 1000; ++i) {
            const double d = (r + p.e + 1.0) * i / 1000.0;
            const double f = range_check({0, 0, 0}, {d, 0, 0}, p);
            CHECK(f <= prev + 1e-15);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            prev = f;
        }
    }
}

TEST_CASE("range_check parameter validation") {
    CHECK_THROWS_AS((RangeDecayParams{0.0, 0.0, 1.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS((RangeDecayParams{10.0, 10.0, 1.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS((RangeDecayParams{10.0, 1.0, 0.0, 1.0}).validate(), ConfigError);
}

TEST_CASE("geometric_los hand trace") {
    // A level segment at z=10 with terrain at 20 m (blocks) and 5 m (does
    // not) on the line: candidates 2, blocked 1, fraction 0.5.
    std::vector<TerrainPoint> pts = {
        {{0.0, 0.0, 20.0}, TerrainClass::Building},
        {{25.0 / kMetersPerDegLat, 0.0, 5.0}, TerrainClass::Ground},
    };
    TerrainCloud cloud = TerrainCloud::build(pts, 50.0);
    const double x0 = cloud.local_xyz()[0].x;
    const Vec3 a{x0 - 50.0, 0.0, 10.0}, b{x0 + 50.0, 0.0, 10.0};
    LosParams p{5.0, 0.0};
    CHECK(geometric_los(a, b, cloud, p) == doctest::Approx(0.5));

    auto detail = geometric_los_detail(a, b, cloud, p);
    CHECK(detail.candidates == 2);
    CHECK(detail.blocked == 1);
    CHECK(detail.blocked_ids == std::vector<int>{0});
}

TEST_CASE("geometric_los identity and empty cases") {
    TerrainCloud empty;
    LosParams p{5.0, 1.0};
    CHECK(geometric_los({1, 2, 3}, {1, 2, 3}, empty, p) == 1.0);
    CHECK(geometric_los({0, 0, 0}, {10, 0, 5}, empty, p) == 1.0);
}

TEST_CASE("geometric_los equals brute force on random clouds") {
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> coord(-500.0, 500.0), alt(0.0, 80.0);
    for (int trial = 0; trial < 40; ++trial) {
        TerrainCloud cloud = random_cloud(rng, 600);
        for (int pair = 0; pair < 4; ++pair) {
            const Vec3 s{coord(rng), coord(rng), alt(rng)};
            const Vec3 d{coord(rng), coord(rng), alt(rng)};
            LosParams p{1.0 + std::abs(coord(rng)) / 10.0, std::abs(alt(rng)) / 20.0};
            auto fast = geometric_los_detail(s, d, cloud, p);
            auto slow = brute_force_los(s, d, cloud, p);
            CHECK(fast.candidates == slow.candidates);
            CHECK(fast.blocked == slow.blocked);
            CHECK(fast.fraction == doctest::Approx(slow.fraction).epsilon(1e-12));
        }
    }
}

TEST_CASE("terrain strictly below both endpoints never blocks") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> coord(-300.0, 300.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<TerrainPoint> pts;
        for (int i = 0; i < 100; ++i)
            pts.push_back({{-81.0 + coord(rng) / 85000.0, 40.0 + coord(rng) / 111320.0,
                            5.0 * (rng() % 100) / 100.0},
                           TerrainClass::Ground});
        TerrainCloud cloud = TerrainCloud::build(std::move(pts), 50.0);
        LosParams p{20.0, 1.0};
        const Vec3 s{coord(rng), coord(rng), 50.0}, d{coord(rng), coord(rng), 60.0};
        // max terrain z < 5; min(s.z,d.z) - Z = 49.
        CHECK(geometric_los(s, d, cloud, p) == 1.0);
    }
}

TEST_CASE("geometric_los is symmetric") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coord(-400.0, 400.0), alt(0.0, 70.0);
    for (int trial = 0; trial < 20; ++trial) {
        TerrainCloud cloud = random_cloud(rng, 300);
        const Vec3 s{coord(rng), coord(rng), alt(rng)}, d{coord(rng), coord(rng), alt(rng)};
        LosParams p{15.0, 2.0};
        CHECK(geometric_los(s, d, cloud, p) ==
              doctest::Approx(geometric_los(d, s, cloud, p)).epsilon(1e-12));
    }
}

TEST_CASE("reflection factor formula and degenerate cases") {
    AcousticParams p = AcousticParams::defaults();
    p.R_p[TerrainClass::Building] = 0.9;
    p.F_omega[TerrainClass::Building] = 0.99;
    CHECK(reflection_factor(TerrainClass::Building, p) == doctest::Approx(0.999).epsilon(1e-12));

    p.R_p[TerrainClass::Building] = 1.0;
    CHECK(reflection_factor(TerrainClass::Building, p) == doctest::Approx(1.0));

    p.R_p[TerrainClass::Building] = 0.93;
    p.F_omega[TerrainClass::Building] = 0.999;
    const double q1 = reflection_factor(TerrainClass::Building, p);
    p.F_omega[TerrainClass::Building] = 0.975;
    const double q2 = reflection_factor(TerrainClass::Building, p);
    CHECK(q1 >= q2);  // monotone in F

    AcousticParams missing = AcousticParams::defaults();
    missing.R_p.erase(TerrainClass::Ground);
    CHECK_THROWS_AS(reflection_factor(TerrainClass::Ground, missing), ConfigError);
}

TEST_CASE("reflection factor is monotone in R_p") {
    AcousticParams p = AcousticParams::defaults();
    double prev = 0.0;
    for (double rp = 0.5; rp <= 0.7; rp += 0.01) {
        p.R_p[TerrainClass::Ground] = rp;
        const double q = reflection_factor(TerrainClass::Ground, p);
        CHECK(q >= prev);
        CHECK(q >= rp);
        CHECK(q <= 1.0);
        prev = q;
    }
}

TEST_CASE("acoustic_los near field, diagnostics and midpoint") {
    TerrainCloud empty;
    AcousticParams p = AcousticParams::defaults();

    CHECK(acoustic_los({0, 0, 0}, {0.5, 0, 0}, empty, p) == 1.0);  // r < delta

    auto det = acoustic_los_detail({0, 0, 0}, {100, 0, 0}, empty, p);
    CHECK(det.wavenumber == doctest::Approx(2.0 * M_PI * 1000.0 / 343.0).epsilon(1e-12));
    CHECK(det.wavenumber == doctest::Approx(18.318).epsilon(1e-3));
    CHECK(det.amplitude == doctest::Approx(1.0 / 100.0));
    CHECK(det.los > 0.0);
    CHECK(det.los <= 1.0);

    // A_tot = 0 gives exactly 0.5: pick d0 so G vanishes and no terrain for B.
    AcousticParams zero = AcousticParams::defaults();
    zero.d0_m = 2.0 * std::pow(10.0, 11.0 / 20.0);
    auto mid = acoustic_los_detail({0, 0, 0}, {2.0, 0, 0}, empty, zero);
    CHECK(mid.A_tot_db == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mid.los == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("acoustic_los decreases with attenuation and rewards reflective terrain") {
    // One blocking point on the path.
    std::vector<TerrainPoint> pts = {{{0.0, 0.0, 30.0}, TerrainClass::HighVegetation}};
    TerrainCloud cloud = TerrainCloud::build(pts, 50.0);
    const Vec3 s{-50, 0, 10}, d{50, 0, 10};

    AcousticParams p = AcousticParams::defaults();
    p.R = 5.0;
    p.Z = 0.0;
    auto blocked = acoustic_los_detail(s, d, cloud, p);
    CHECK(blocked.B_db > 0.0);

    // Raising the blocker's reflectivity cannot increase B or decrease los.
    AcousticParams shinier = p;
    shinier.R_p[TerrainClass::HighVegetation] = 0.2;  // top of the class range
    auto lighter = acoustic_los_detail(s, d, cloud, shinier);
    CHECK(lighter.B_db <= blocked.B_db + 1e-12);
    CHECK(lighter.los >= blocked.los - 1e-12);

    // Clear path: same distance, no barrier.
    TerrainCloud empty;
    auto clear = acoustic_los_detail(s, d, empty, p);
    CHECK(clear.B_db == 0.0);
    CHECK(clear.los >= blocked.los);
    CHECK(blocked.A_tot_db == doctest::Approx(blocked.G_db + blocked.B_db));
}

TEST_CASE("acoustic params validation") {
    AcousticParams p = AcousticParams::defaults();
    p.F_omega[TerrainClass::Ground] = 0.5;  // outside the allowed band
    CHECK_THROWS_AS(p.validate(), ConfigError);

    AcousticParams q = AcousticParams::defaults();
    q.R_p[TerrainClass::Building] = 0.3;  // outside the tabulated range
    CHECK_THROWS_AS(q.validate(), ConfigError);

    AcousticParams ok = AcousticParams::defaults();
    CHECK_NOTHROW(ok.validate());
}

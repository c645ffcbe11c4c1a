#include <cmath>
#include <vector>

#include <stdexcept>

#include "doctest.h"
#include "geofence/rng.hpp"
#include "geofence/sensing.hpp"
#include "../support/oracles.hpp"

using namespace geofence;

TEST_CASE("to_polar on axis-aligned and coincident targets") {
    SensorPose s;
    auto a = to_polar(s, {1, 0});
    CHECK(a.r == 1.0);
    CHECK(a.theta == 0.0);
    auto b = to_polar(s, {0, 2});
    CHECK(b.r == 2.0);
    CHECK(b.theta == doctest::Approx(90.0));
    s.position = {1, 1};
    auto c = to_polar(s, {1, 1});
    CHECK(c.r == 0.0);
    CHECK(c.theta == 0.0);
}

TEST_CASE("angular mask") {
    SensorPose s;
    s.theta_min = 0;
    s.fov = 60;
    CHECK(angular_mask(s, 30) == 1);
    CHECK(angular_mask(s, 61) == 0);
    CHECK(angular_mask(s, 0) == 1);
    CHECK(angular_mask(s, 60) == 1);

    SUBCASE("wrapping arc matches a degree-by-degree enumeration") {
        s.theta_min = 330;
        CHECK(angular_mask(s, 10) == 1);
        for (int deg = 0; deg < 360; ++deg) {
            const bool expected = deg >= 330 || deg <= 30;
            CHECK(angular_mask(s, deg) == (expected ? 1 : 0));
        }
    }
}

TEST_CASE("range decay") {
    CHECK(range_decay(0.0, 1.0, 3.0) == 1.0);
    CHECK(range_decay(3.1, 1.0, 3.0) == 0.0);
    CHECK(range_decay(0.5, 1.0, 3.0) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
    CHECK(range_decay(3.0, 1.0, 3.0) == doctest::Approx(std::exp(-3.0)));
}

TEST_CASE("sensing power") {
    SensorPose s;
    s.theta_min = -30;
    s.fov = 60;
    CHECK(sensing_power(s, {0.5, 0}) == doctest::Approx(std::exp(-0.5)));
    CHECK(sensing_power(s, {-0.5, 0}) == 0.0);
    CHECK(sensing_power(s, {3.5, 0}) == 0.0);
}

TEST_CASE("sensing power agrees with the rotated-frame oracle") {
    Rng rng(99);
    for (int i = 0; i < 20000; ++i) {
        SensorPose s;
        s.position = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
        s.theta_min = rng.uniform(0, 360);
        s.fov = rng.uniform(1, 359);
        s.r_max = rng.uniform(0.5, 4);
        s.eta = rng.uniform(0, 2);
        const Vec2 t{s.position.x + rng.uniform(-5, 5), s.position.y + rng.uniform(-5, 5)};
        const double got = sensing_power(s, t);
        const double want = oracle::sensing_power({s.position.x, s.position.y}, s.theta_min, s.fov, s.r_max, s.eta,
                                                  {t.x, t.y});
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("trajectory confidence") {
    SensorPose s;
    s.theta_min = -30;
    std::vector<Vec2> none = {{-1, 0}, {-2, 0}};
    CHECK(trajectory_confidence(s, none) == 0.0);
    CHECK(trajectory_confidence(s, std::vector<Vec2>{}) == 0.0);
    std::vector<Vec2> one = {{-1, 0}, {0.2, 0}, {0, -2}};
    CHECK(trajectory_confidence(s, one) == doctest::Approx(0.8187307530779818));
}

TEST_CASE("trajectory confidence is bracketed by a finer resampling") {
    // Sampling at 1 mm can only miss the true peak by the decay's Lipschitz constant times half a step.
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        SensorPose s;
        s.theta_min = rng.uniform(0, 360);
        const oracle::P a{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const oracle::P b{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const std::vector<oracle::P> leg = {a, b};
        const auto coarse = oracle::resample_polyline(leg, 1e-3, static_cast<std::size_t>(len / 1e-3) + 1);
        const auto fine = oracle::resample_polyline(leg, 1e-5, static_cast<std::size_t>(len / 1e-5) + 1);
        std::vector<Vec2> path;
        for (auto p : coarse) path.push_back({p.x, p.y});
        double fine_max = 0.0;
        for (auto p : fine) fine_max = std::max(fine_max, oracle::sensing_power({0, 0}, s.theta_min, 60, 3, 1, p));
        const double got = trajectory_confidence(s, path);
        CHECK(got <= fine_max + 1e-12);
        // Peaks on the sector edge can drop to zero between samples; interior peaks are within half a step.
        if (got > 0) CHECK(fine_max - got <= 0.5e-3 + 1e-9);
    }
}

TEST_CASE("rotate_pose") {
    SensorPose s;
    auto r0 = rotate_pose(s, 0);
    CHECK(r0.step_count == 0);
    CHECK(r0.pose.theta_min == s.theta_min);
    s.theta_min = 0;
    auto r2 = rotate_pose(s, 2);
    CHECK(r2.pose.theta_min == doctest::Approx(60));
    CHECK(r2.step_count == 2);
    s.theta_min = 350;
    auto r1 = rotate_pose(s, 1);
    CHECK(r1.pose.theta_min == doctest::Approx(20));
    CHECK(r1.step_count == 1);
    CHECK(rotate_pose(s, -3).step_count == 3);
}

TEST_CASE("pose validation") {
    SensorPose s;
    s.fov = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.fov = 60;
    s.r_max = -1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

#include <cmath>
#include <sstream>
#include <vector>

#include <stdexcept>

#include "doctest.h"
#include "geofence/fgs.hpp"
#include "geofence/policy.hpp"
#include "../support/oracles.hpp"

using namespace geofence;

namespace {
DetectionReport rep(Tti t, double conf, Vec2 pos = {}, DeviceId dev = 0) { return {dev, 0, t, conf, pos, {}}; }
}  // namespace

TEST_CASE("report validation is non-strict at the threshold") {
    const double th = std::exp(-0.5);
    CHECK(validate_report(std::exp(-0.5), th));
    CHECK_FALSE(validate_report(0.0, th));
    CHECK(validate_report(1.0, th));
}

TEST_CASE("fusion takes the earliest valid report") {
    const double th = std::exp(-0.5);
    CHECK_FALSE(fuse(std::vector<DetectionReport>{}, th).has_value());
    CHECK(*fuse(std::vector{rep(120, 0.9), rep(90, 0.8)}, th) == 90);
    CHECK(*fuse(std::vector{rep(50, 0.3), rep(200, 0.7)}, th) == 200);
}

TEST_CASE("prediction") {
    PredictionParams pp;
    auto v = predict(std::vector{rep(0, 0.3, {-4, 0}), rep(100, 0.3, {-3.9, 0})}, pp).velocity;
    CHECK(v.x == doctest::Approx(1.0));
    CHECK(v.y == doctest::Approx(0.0));

    auto single = predict(std::vector{rep(0, 0.3, {-4, 0})}, pp).velocity;
    CHECK(single.x == doctest::Approx(1.0));
    CHECK(single.y == doctest::Approx(0.0));

    auto still = predict(std::vector{rep(0, 0.3, {1, 1}), rep(10, 0.3, {1, 1})}, pp).velocity;
    CHECK(still == Vec2{0, 0});

    auto capped = predict(std::vector{rep(0, 0.3, {-4, 0}), rep(1, 0.3, {-3, 0})}, pp).velocity;
    CHECK(capped.norm() == doctest::Approx(2.0));

    CHECK_THROWS_AS(predict(std::vector<DetectionReport>{}, pp), std::invalid_argument);
}

TEST_CASE("wake-up selection") {
    TrackEstimate track{{-4, 0}, {1, 0}, 0};
    WakeupParams wp;
    wp.p_th = std::exp(-0.5);

    SensorPose far;
    far.position = {0, 3.5};
    far.theta_min = 60;
    std::vector<DeviceView> devs = {{0, far, true, true}};
    CHECK(select_wakeups(track, devs, wp).empty());

    // Device 0.3 m below the predicted line, looking up at it.
    SensorPose near;
    near.position = {-3.0, -0.3};
    near.theta_min = 60;
    devs.push_back({1, near, true, true});
    CHECK(oracle::sensing_power({-3.0, -0.3}, 60, 60, 3, 1, {-3.0, 0}) > std::exp(-0.5));
    CHECK(select_wakeups(track, devs, wp) == std::vector<DeviceId>{1});

    devs[1].sleeping = false;
    CHECK(select_wakeups(track, devs, wp).empty());
    devs[1].sleeping = true;
    devs[1].available = false;
    CHECK(select_wakeups(track, devs, wp).empty());
}

TEST_CASE("wake-up ordering and cap") {
    TrackEstimate track{{-4, 0}, {1, 0}, 0};
    WakeupParams wp;
    wp.p_th = std::exp(-0.5);
    wp.horizon_ttis = 4000;
    std::vector<DeviceView> devs;
    for (DeviceId i = 0; i < 3; ++i) {
        SensorPose p;
        p.position = {-1.0 - i, -0.3};
        p.theta_min = 60;
        devs.push_back({i, p, true, true});
    }
    CHECK(select_wakeups(track, devs, wp) == std::vector<DeviceId>{2, 1, 0});
    wp.max_per_event = 1;
    CHECK(select_wakeups(track, devs, wp) == std::vector<DeviceId>{2});
}

TEST_CASE("coverage") {
    GeofenceLayout layout;
    CHECK(coverage_fraction(std::vector<SensorPose>{}, layout, 1024, 0.6) == 0.0);

    SensorPose full;
    full.fov = 360;
    full.eta = 0;
    full.r_max = 10;
    CHECK(coverage_fraction(std::vector{full}, layout, 1024, 0.6) == 1.0);

    SUBCASE("single grid device against a brute-force count") {
        const auto pose = grid_placement(1, layout).front();
        int count = 0;
        for (int i = 0; i < 1024; ++i) {
            const auto q = oracle::square_point(3.5, 28.0 * i / 1024);
            if (oracle::sensing_power({pose.position.x, pose.position.y}, pose.theta_min, 60, 3, 1, q) >=
                std::exp(-0.5))
                ++count;
        }
        CHECK(coverage_fraction(std::vector{pose}, layout, 1024, std::exp(-0.5)) == doctest::Approx(count / 1024.0));
    }
}

TEST_CASE("event log lines") {
    std::ostringstream out;
    std::vector<EventRecord> ev = {{5, EventKind::Report, 2, 7, 0.75}, {6, EventKind::Miss, std::nullopt, 7, 1.0}};
    write_event_log(out, ev);
    CHECK(out.str() ==
          "{\"tti\":5,\"event_kind\":\"report\",\"device_id\":2,\"object_id\":7,\"value\":0.75}\n"
          "{\"tti\":6,\"event_kind\":\"miss\",\"device_id\":null,\"object_id\":7,\"value\":1.0}\n");
}

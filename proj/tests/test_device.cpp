#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "coolsim/device.hpp"

using namespace coolsim::device;

namespace {

ValveCalibration default_cal() {
    return ValveCalibration{{{0.65, 0.0}, {1.0, 3.7}}};
}

ValveCalibration multi_segment_cal() {
    return ValveCalibration{{{0.6, 0.0}, {0.7, 1.0}, {0.8, 1.0}, {0.95, 3.0}}};
}

VortexTubeSpec paper_spec(double pressure) {
    return VortexTubeSpec{0.5, pressure, 295.15, 257.15};
}

}  // namespace

TEST_CASE("cold_air_temperature reproduces the operating point") {
    const VortexTubeModel model;
    CHECK(cold_air_temperature(paper_spec(0.7e6), model) ==
          doctest::Approx(257.15).epsilon(1e-12));
}

TEST_CASE("cold_air_temperature affine shift in supply temperature") {
    const VortexTubeModel model;  // unit supply-temperature slope
    auto spec = paper_spec(0.7e6);
    const double base = cold_air_temperature(spec, model);
    spec.supply_temperature += 5.0;
    CHECK(cold_air_temperature(spec, model) == doctest::Approx(base + 5.0).epsilon(1e-12));
}

TEST_CASE("cold_air_temperature monotone in pressure") {
    const VortexTubeModel model;
    const double at_min = cold_air_temperature(paper_spec(0.6e6), model);
    const double at_max = cold_air_temperature(paper_spec(0.8e6), model);
    CHECK(at_max <= at_min);
}

TEST_CASE("cold_air_temperature rejects pressure outside the band") {
    CHECK_THROWS_AS(cold_air_temperature(paper_spec(0.5e6)), std::out_of_range);
    CHECK_THROWS_AS(cold_air_temperature(paper_spec(0.9e6)), std::out_of_range);
}

TEST_CASE("vortex tube spec invariants") {
    CHECK_THROWS_AS(cold_air_temperature(VortexTubeSpec{0.0, 0.7e6, 295.15, 257.15}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cold_air_temperature(VortexTubeSpec{1.0, 0.7e6, 295.15, 257.15}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cold_air_temperature(VortexTubeSpec{0.5, 0.7e6, 295.15, 300.0}),
                    std::invalid_argument);
}

TEST_CASE("duty_to_velocity boundaries and interpolation") {
    const auto cal = default_cal();
    CHECK(duty_to_velocity({0.0, 300.0}, cal) == 0.0);
    CHECK(duty_to_velocity({0.5, 300.0}, cal) == 0.0);  // below opening threshold
    CHECK(duty_to_velocity({0.65, 300.0}, cal) == 0.0);
    CHECK(duty_to_velocity({1.0, 300.0}, cal) == doctest::Approx(3.7).epsilon(1e-12));
    // Midpoint of the segment -> mean of the endpoint velocities
    CHECK(duty_to_velocity({0.825, 300.0}, cal) == doctest::Approx(1.85).epsilon(1e-12));
}

TEST_CASE("duty_to_velocity hits breakpoints exactly") {
    const auto cal = multi_segment_cal();
    for (const auto& [d, v] : cal.breakpoints) {
        CHECK(duty_to_velocity({d, 300.0}, cal) == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("command validation") {
    const auto cal = default_cal();
    CHECK_THROWS_AS(duty_to_velocity({-0.1, 300.0}, cal), std::invalid_argument);
    CHECK_THROWS_AS(duty_to_velocity({1.1, 300.0}, cal), std::invalid_argument);
    CHECK_THROWS_AS(duty_to_velocity({0.5, 0.0}, cal), std::invalid_argument);
}

TEST_CASE("calibration validation") {
    CHECK_THROWS_AS(ValveCalibration{}.validate(), std::invalid_argument);
    CHECK_THROWS_AS((ValveCalibration{{{0.6, 1.0}}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ValveCalibration{{{0.6, 0.0}, {0.6, 1.0}}}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((ValveCalibration{{{0.6, 0.0}, {0.8, 2.0}, {0.9, 1.0}}}.validate()),
                    std::invalid_argument);
}

TEST_CASE("velocity_to_duty boundaries") {
    const auto cal = default_cal();
    CHECK(velocity_to_duty(0.0, cal) == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(velocity_to_duty(3.7, cal) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(velocity_to_duty(3.8, cal), std::out_of_range);
    CHECK_THROWS_AS(velocity_to_duty(-0.1, cal), std::invalid_argument);
}

TEST_CASE("velocity_to_duty picks the minimal duty on flat segments") {
    const auto cal = multi_segment_cal();
    CHECK(velocity_to_duty(1.0, cal) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("round-trip velocity -> duty -> velocity on increasing segments") {
    const auto cal = default_cal();
    std::mt19937 eng(99);
    std::uniform_real_distribution<double> v_dist(0.0, 3.7);
    for (int i = 0; i < 100; ++i) {
        const double target = v_dist(eng);
        const double duty = velocity_to_duty(target, cal);
        CHECK(duty_to_velocity({duty, 300.0}, cal) == doctest::Approx(target).epsilon(1e-9));
    }
}

TEST_CASE("duty_to_velocity is monotone non-decreasing in duty") {
    const auto cal = multi_segment_cal();
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = duty_to_velocity({i / 1000.0, 300.0}, cal);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("calibration JSON round trip") {
    const auto cal = ValveCalibration::from_json_text(
        R"({"breakpoints": [[0.65, 0.0], [1.0, 3.7]]})");
    CHECK(cal.breakpoints.size() == 2);
    CHECK(cal.breakpoints[1].second == doctest::Approx(3.7));
    CHECK_THROWS_AS(ValveCalibration::from_json_text("not json"), std::invalid_argument);
    CHECK_THROWS_AS(ValveCalibration::from_json_text(R"({"breakpoints": []})"),
                    std::invalid_argument);
}

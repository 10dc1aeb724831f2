#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "coolsim/thermo.hpp"

using namespace coolsim::thermo;

namespace {

// Independent hand evaluation of the coefficient quotient, written out
// from the raw constants rather than going through the types.
double silicon_k_oracle() {
    return (1005.0 * 1.37 * 19.64e-6) / (1600.0 * 970.0 * 1600e-6 * 2e-3);
}
double skin_k_oracle() {
    return (1005.0 * 1.37 * 19.64e-6) / (10514.0 * 1200.0 * 1600e-6 * 0.2e-3);
}

struct RandomCase {
    CoolingCoefficient k;
    double u, t, body_temp, air_temp;
};

RandomCase draw_case(std::mt19937& eng) {
    std::uniform_real_distribution<double> k_dist(1e-4, 0.1);
    std::uniform_real_distribution<double> u_dist(0.01, 10.0);
    std::uniform_real_distribution<double> t_dist(0.01, 100.0);
    std::uniform_real_distribution<double> ts_dist(280.0, 320.0);
    std::uniform_real_distribution<double> ta_dist(230.0, 279.0);
    return {CoolingCoefficient{k_dist(eng)}, u_dist(eng), t_dist(eng), ts_dist(eng),
            ta_dist(eng)};
}

}  // namespace

TEST_CASE("flow_rate") {
    const NozzleGeometry geom{19.64e-6, 5e-3};
    CHECK(flow_rate(0.0, geom) == 0.0);
    CHECK(flow_rate(1.0, geom) == doctest::Approx(1.964e-5).epsilon(1e-12));
    CHECK(flow_rate(3.0, geom) == doctest::Approx(5.892e-5).epsilon(1e-12));
    CHECK_THROWS_AS(flow_rate(-0.1, geom), std::invalid_argument);
}

TEST_CASE("air_mass") {
    const NozzleGeometry geom{19.64e-6, 5e-3};
    const AirState air{1005.0, 1.37, 257.15};
    CHECK(air_mass(1.0, geom, air, 0.0) == 0.0);
    CHECK(air_mass(1.0, geom, air, 3.0) == doctest::Approx(8.07204e-5).epsilon(1e-12));
    CHECK(air_mass(2.0, geom, air, 3.0) ==
          doctest::Approx(2.0 * air_mass(1.0, geom, air, 3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(air_mass(1.0, geom, air, -1.0), std::invalid_argument);
}

TEST_CASE("heat_absorbed degenerate cases") {
    const NozzleGeometry geom{19.64e-6, 5e-3};
    const AirState air{1005.0, 1.37, 257.15};
    CHECK(heat_absorbed(1.0, geom, air, 3.0, air.temperature) == 0.0);
    CHECK(heat_absorbed(0.0, geom, air, 3.0, 300.0) == 0.0);
}

TEST_CASE("heat_absorbed matches the body-side energy bookkeeping") {
    const auto p = preset("silicon");
    const auto k = cooling_coefficient(p.air, p.nozzle, p.body);
    const double t_final =
        equilibrium_temperature(k, 1.0, 3.0, p.body.temperature, p.air.temperature);
    const double q_air = heat_absorbed(1.0, p.nozzle, p.air, 3.0, t_final);
    const double q_body =
        p.body.specific_heat * body_mass(p.body) * (p.body.temperature - t_final);
    CHECK(q_air == doctest::Approx(q_body).epsilon(1e-12));
}

TEST_CASE("body_mass") {
    CHECK(body_mass(preset("silicon").body) == doctest::Approx(3.104e-3).epsilon(1e-12));
    CHECK(body_mass(preset("skin").body) == doctest::Approx(3.84e-4).epsilon(1e-12));
    auto body = preset("silicon").body;
    const double m1 = body_mass(body);
    body.thickness *= 2;
    CHECK(body_mass(body) == doctest::Approx(2 * m1).epsilon(1e-15));
}

TEST_CASE("cooling_coefficient against the hand-evaluated quotient") {
    const auto sil = preset("silicon");
    const auto skin = preset("skin");
    const double k_sil = cooling_coefficient(sil.air, sil.nozzle, sil.body).k;
    const double k_skin = cooling_coefficient(skin.air, skin.nozzle, skin.body).k;
    CHECK(k_sil == doctest::Approx(silicon_k_oracle()).epsilon(1e-12));
    CHECK(k_skin == doctest::Approx(skin_k_oracle()).epsilon(1e-12));
    // Published rounding
    CHECK(std::round(k_sil * 1000) / 1000 == doctest::Approx(0.005));
    CHECK(std::round(k_skin * 1000) / 1000 == doctest::Approx(0.007));
    // Frozen full-precision values
    CHECK(k_sil == doctest::Approx(5.4448562339e-3).epsilon(1e-9));
    CHECK(k_skin == doctest::Approx(6.6977497266e-3).epsilon(1e-9));
}

TEST_CASE("cooling_coefficient is unit-invariant in the specific heats") {
    auto p = preset("silicon");
    const double k1 = cooling_coefficient(p.air, p.nozzle, p.body).k;
    p.air.specific_heat *= 1000.0;   // J -> mJ on both sides
    p.body.specific_heat *= 1000.0;
    const double k2 = cooling_coefficient(p.air, p.nozzle, p.body).k;
    CHECK(k1 == doctest::Approx(k2).epsilon(1e-15));
}

TEST_CASE("equilibrium_temperature") {
    const auto p = preset("skin");
    const auto k = cooling_coefficient(p.air, p.nozzle, p.body);
    CHECK(equilibrium_temperature(k, 0.0, 3.0, 306.15, 257.15) == 306.15);
    // t -> infinity asymptote, within 1e-3 K at t = 1e9
    CHECK(std::abs(equilibrium_temperature(k, 3.0, 1e9, 306.15, 257.15) - 257.15) < 1e-3);
    // Frozen hand evaluation at full precision
    CHECK(equilibrium_temperature(k, 3.0, 3.0, 306.15, 257.15) ==
          doctest::Approx(303.36421857178107).epsilon(1e-10));
}

TEST_CASE("temperature_drop degenerate cases and frozen values") {
    const CoolingCoefficient k_pub{0.005};
    CHECK(temperature_drop(k_pub, 0.0, 3.0, 294.45, 257.15) == 0.0);
    CHECK(temperature_drop(k_pub, 1.0, 0.0, 294.45, 257.15) == 0.0);
    CHECK(temperature_drop(k_pub, 1.0, 3.0, 260.0, 260.0) == 0.0);
    // Silicon worked values with the published coefficient
    CHECK(temperature_drop(k_pub, 1.0, 3.0, 294.45, 257.15) ==
          doctest::Approx(0.551232).epsilon(1e-5));
    CHECK(temperature_drop(k_pub, 2.0, 3.0, 294.45, 257.15) ==
          doctest::Approx(1.086408).epsilon(1e-5));
    CHECK(temperature_drop(k_pub, 3.0, 3.0, 294.45, 257.15) ==
          doctest::Approx(1.60622).epsilon(1e-5));
}

TEST_CASE("warming sign convention when the air is warmer than the body") {
    const CoolingCoefficient k{0.01};
    CHECK(temperature_drop(k, 1.0, 1.0, 280.0, 300.0) < 0.0);
}

TEST_CASE("preset validation and errors") {
    CHECK_THROWS_AS(preset("steel"), std::invalid_argument);
    const auto p = preset("skin");
    CHECK(p.body.temperature - p.air.temperature == doctest::Approx(49.0).epsilon(1e-12));
    CHECK_NOTHROW(p.air.validate());
    CHECK_NOTHROW(p.body.validate());
    CHECK_NOTHROW(p.nozzle.validate());
}

TEST_CASE("rounded_coefficient computes, never stores, the published value") {
    const auto p = preset("skin");
    const auto k = cooling_coefficient(p.air, p.nozzle, p.body);
    CHECK(rounded_coefficient(k, 3).k == doctest::Approx(0.007).epsilon(1e-15));
    CHECK(rounded_coefficient(k, 5).k == doctest::Approx(0.0067).epsilon(1e-10));
}

TEST_CASE("properties over randomized parameter draws") {
    std::mt19937 eng(20240817);
    for (int i = 0; i < 1000; ++i) {
        const auto c = draw_case(eng);

        // Monotone in u and t
        const double d = temperature_drop(c.k, c.u, c.t, c.body_temp, c.air_temp);
        const double d_u = temperature_drop(c.k, c.u * 1.1, c.t, c.body_temp, c.air_temp);
        const double d_t = temperature_drop(c.k, c.u, c.t * 1.1, c.body_temp, c.air_temp);
        CHECK(d_u > d);
        CHECK(d_t > d);

        // Bounded by the starting temperature difference
        CHECK(d >= 0.0);
        CHECK(d < c.body_temp - c.air_temp);

        // Drop + equilibrium = T_s
        const double t_final =
            equilibrium_temperature(c.k, c.u, c.t, c.body_temp, c.air_temp);
        CHECK(d + t_final == doctest::Approx(c.body_temp).epsilon(1e-12));

        // u and t enter only through their product
        const double swapped = temperature_drop(c.k, c.t, c.u, c.body_temp, c.air_temp);
        CHECK(d == doctest::Approx(swapped).epsilon(1e-12));
    }
}

TEST_CASE("energy consistency across random physical configurations") {
    std::mt19937 eng(7);
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const AirState air{1000.0 * pos(eng), pos(eng), 230.0 + 10.0 * pos(eng)};
        const BodyPatch body{1000.0 * pos(eng), 100.0 * pos(eng), 1e-4 * pos(eng),
                             1e-4 * pos(eng), 290.0 + pos(eng)};
        const NozzleGeometry geom{1e-6 * pos(eng), 0.0};
        const double u = pos(eng), t = pos(eng);
        const auto k = cooling_coefficient(air, geom, body);
        const double t_final =
            equilibrium_temperature(k, u, t, body.temperature, air.temperature);
        const double drop = temperature_drop(k, u, t, body.temperature, air.temperature);
        const double q_air = heat_absorbed(u, geom, air, t, t_final);
        const double q_body = body.specific_heat * body_mass(body) * drop;
        CHECK(q_air == doctest::Approx(q_body).epsilon(1e-9));
    }
}

TEST_CASE("asymptote: drop approaches the full temperature difference") {
    const auto p = preset("skin");
    const auto k = cooling_coefficient(p.air, p.nozzle, p.body);
    const double limit = p.body.temperature - p.air.temperature;
    CHECK(temperature_drop(k, 5.0, 1e9, p.body.temperature, p.air.temperature) ==
          doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("type invariants reject invalid fields") {
    CHECK_THROWS_AS((AirState{-1.0, 1.37, 257.15}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((AirState{1005.0, 1.37, -3.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((BodyPatch{1600.0, 970.0, 0.0, 2e-3, 294.45}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((NozzleGeometry{0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CoolingCoefficient{0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((NozzleGeometry{1e-6, 0.0}.validate()));
}

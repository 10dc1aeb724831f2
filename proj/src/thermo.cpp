#include "coolsim/thermo.hpp"

#include <cmath>
#include <stdexcept>

namespace coolsim::thermo {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void AirState::validate() const {
    require(specific_heat > 0, "AirState: specific_heat must be > 0");
    require(density > 0, "AirState: density must be > 0");
    require(temperature > 0, "AirState: temperature must be > 0 K");
}

void BodyPatch::validate() const {
    require(specific_heat > 0, "BodyPatch: specific_heat must be > 0");
    require(density > 0, "BodyPatch: density must be > 0");
    require(area > 0, "BodyPatch: area must be > 0");
    require(thickness > 0, "BodyPatch: thickness must be > 0");
    require(temperature > 0, "BodyPatch: temperature must be > 0 K");
}

void NozzleGeometry::validate() const {
    require(outlet_area > 0, "NozzleGeometry: outlet_area must be > 0");
    require(standoff >= 0, "NozzleGeometry: standoff must be >= 0");
}

void CoolingCoefficient::validate() const {
    require(k > 0, "CoolingCoefficient: k must be > 0");
}

double flow_rate(double u, const NozzleGeometry& geom) {
    geom.validate();
    require(u >= 0, "flow_rate: velocity must be >= 0");
    return u * geom.outlet_area;
}

double air_mass(double u, const NozzleGeometry& geom, const AirState& air, double t) {
    air.validate();
    require(t >= 0, "air_mass: duration must be >= 0");
    return air.density * flow_rate(u, geom) * t;
}

double heat_absorbed(double u, const NozzleGeometry& geom, const AirState& air,
                     double t, double equilibrium_temp) {
    return air.specific_heat * air_mass(u, geom, air, t) *
           (equilibrium_temp - air.temperature);
}

double body_mass(const BodyPatch& body) {
    body.validate();
    return body.density * body.area * body.thickness;
}

CoolingCoefficient cooling_coefficient(const AirState& air, const NozzleGeometry& geom,
                                       const BodyPatch& body) {
    air.validate();
    geom.validate();
    body.validate();
    const double k = (air.specific_heat * air.density * geom.outlet_area) /
                     (body.specific_heat * body.density * body.area * body.thickness);
    return CoolingCoefficient{k};
}

double equilibrium_temperature(const CoolingCoefficient& coeff, double u, double t,
                               double body_temp, double air_temp) {
    coeff.validate();
    require(u >= 0, "equilibrium_temperature: velocity must be >= 0");
    require(t >= 0, "equilibrium_temperature: duration must be >= 0");
    const double kut = coeff.k * u * t;
    return (body_temp + kut * air_temp) / (kut + 1.0);
}

double temperature_drop(const CoolingCoefficient& coeff, double u, double t,
                        double body_temp, double air_temp) {
    coeff.validate();
    require(u >= 0, "temperature_drop: velocity must be >= 0");
    require(t >= 0, "temperature_drop: duration must be >= 0");
    const double kut = coeff.k * u * t;
    return kut * (body_temp - air_temp) / (kut + 1.0);
}

Preset preset(const std::string& name) {
    // Shared cold-air state: vortex tube output at 257.15 K.
    const AirState air{1005.0, 1.37, 257.15};
    const NozzleGeometry nozzle{19.64e-6, 5e-3};

    if (name == "silicon") {
        // 40 mm x 40 mm x 2 mm sheet, average starting temperature 294.45 K.
        return Preset{air, BodyPatch{1600.0, 970.0, 1600e-6, 2e-3, 294.45}, nozzle};
    }
    if (name == "skin") {
        // Cold-receptor depth ~0.2 mm, skin at 306.15 K.
        return Preset{air, BodyPatch{10514.0, 1200.0, 1600e-6, 0.2e-3, 306.15}, nozzle};
    }
    throw std::invalid_argument("preset: unknown preset name '" + name +
                                "' (expected 'silicon' or 'skin')");
}

CoolingCoefficient rounded_coefficient(const CoolingCoefficient& coeff, int decimals) {
    coeff.validate();
    require(decimals >= 0, "rounded_coefficient: decimals must be >= 0");
    const double scale = std::pow(10.0, decimals);
    return CoolingCoefficient{std::round(coeff.k * scale) / scale};
}

}  // namespace coolsim::thermo

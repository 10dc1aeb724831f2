#pragma once

#include <string>

namespace coolsim::thermo {

/// Thermophysical state of the cold air jet. SI units throughout
/// (J/(kg*K), kg/m^3, K).
struct AirState {
    double specific_heat;
    double density;
    double temperature;

    void validate() const;
};

/// The cooled slab: skin or a phantom standing in for it. `thickness` is
/// the depth of material that participates in the lumped heat balance.
struct BodyPatch {
    double specific_heat;  // J/(kg*K)
    double density;        // kg/m^3
    double area;           // m^2
    double thickness;      // m
    double temperature;    // K, initial

    void validate() const;
};

/// Cold air outlet geometry. `standoff` is the outlet-to-surface distance.
struct NozzleGeometry {
    double outlet_area;  // m^2
    double standoff;     // m

    void validate() const;
};

/// The lumped cooling-rate coefficient, unit 1/m.
struct CoolingCoefficient {
    double k;

    void validate() const;
};

struct Preset {
    AirState air;
    BodyPatch body;
    NozzleGeometry nozzle;
};

// Volumetric flow rate through the outlet, m^3/s.
double flow_rate(double u, const NozzleGeometry& geom);

// Mass of cold air delivered over duration t, kg.
double air_mass(double u, const NozzleGeometry& geom, const AirState& air, double t);

// Heat removed from the body over duration t when the air leaves at the
// equilibrium temperature T_f. Positive when T_f > air temperature.
double heat_absorbed(double u, const NozzleGeometry& geom, const AirState& air,
                     double t, double equilibrium_temp);

// Mass of the cooled slab, kg.
double body_mass(const BodyPatch& body);

// k = (C_a rho_a A) / (C_s rho_s A_s h_s). The two specific heats must be
// in the same energy unit; they cancel.
CoolingCoefficient cooling_coefficient(const AirState& air, const NozzleGeometry& geom,
                                       const BodyPatch& body);

// Common temperature the air and the slab settle at after duration t.
// Always between the air and the initial slab temperature when u*t > 0.
double equilibrium_temperature(const CoolingCoefficient& coeff, double u, double t,
                               double body_temp, double air_temp);

// Slab temperature change over duration t:
//   k u (T_s - T_a) t / (k u t + 1).
// Negative when the air is warmer than the slab (warming, by sign convention).
double temperature_drop(const CoolingCoefficient& coeff, double u, double t,
                        double body_temp, double air_temp);

// The two worked parameterizations: "silicon" (the phantom sheet) and
// "skin". Both share the same cold air state and nozzle.
Preset preset(const std::string& name);

// Coefficient rounded to the number of decimal places a publication would
// print (e.g. 0.0054449 -> 0.005 at three decimals). Used by the
// experiment harness to reproduce published predictions; never a stored
// constant.
CoolingCoefficient rounded_coefficient(const CoolingCoefficient& coeff, int decimals);

}  // namespace coolsim::thermo

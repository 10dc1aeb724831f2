#pragma once

#include <string>
#include <utility>
#include <vector>

namespace coolsim::device {

/// Vortex tube operating point. `cold_outlet_temperature` is the measured
/// cold output at the model's reference conditions.
struct VortexTubeSpec {
    double cold_fraction;            // (0,1), volume fraction at the cold outlet
    double supply_pressure;          // Pa
    double supply_temperature;       // K
    double cold_outlet_temperature;  // K, at reference supply conditions

    void validate() const;
};

/// Affine response of the cold outlet around a reference point. The tube
/// is not modeled thermodynamically; the slopes only have to respect the
/// observed monotonicity (colder with more pressure, colder with colder
/// supply).
struct VortexTubeModel {
    double min_pressure = 0.6e6;                  // Pa, operating band
    double max_pressure = 0.8e6;                  // Pa
    double reference_supply_temperature = 295.15; // K (22 degC room supply)
    double supply_temperature_slope = 1.0;        // K output per K supply
    double pressure_slope = 5.0e-6;               // K output drop per Pa

    double reference_pressure() const { return 0.5 * (min_pressure + max_pressure); }
    void validate() const;
};

/// Solenoid valve drive command. The PWM frequency is carried and
/// validated but does not enter the static duty->velocity mapping.
struct ValveCommand {
    double duty_ratio;           // [0,1]
    double pwm_frequency = 300;  // Hz

    void validate() const;
};

/// Measured duty -> flow velocity curve, as ordered breakpoints.
/// Below the first breakpoint the valve passes nothing.
struct ValveCalibration {
    std::vector<std::pair<double, double>> breakpoints;  // (duty, m/s)

    void validate() const;

    static ValveCalibration from_json_text(const std::string& text);
    static ValveCalibration load(const std::string& path);
};

// Cold outlet temperature for the given operating point, K.
// Throws if supply_pressure is outside the model's operating band.
double cold_air_temperature(const VortexTubeSpec& spec,
                            const VortexTubeModel& model = VortexTubeModel{});

// Piecewise-linear duty -> velocity. Duty below the first breakpoint
// maps to 0; duty above the last maps to the last velocity.
double duty_to_velocity(const ValveCommand& cmd, const ValveCalibration& cal);

// Minimal duty reaching the target velocity under the same interpolation.
// Throws if target exceeds the calibrated maximum.
double velocity_to_duty(double target_velocity, const ValveCalibration& cal);

}  // namespace coolsim::device

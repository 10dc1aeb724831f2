#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coolsim/thermo.hpp"

namespace coolsim::harness {

/// Sensor-transient scenario: a thermometer in the mixed jet at a small
/// standoff, swept over flow velocities. The dynamics are a first-order
/// relaxation toward a velocity-dependent mixed temperature; this is a
/// phenomenological stand-in, not a flow model.
struct SensorTransientScenario {
    std::vector<double> velocities = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    double duration = 3.0;           // s
    double time_step = 1e-3;         // s
    double room_temperature = 295.15;  // K
    double cold_temperature = 257.15;  // K
    double standoff = 5e-3;          // m
    double mixing_gain = 0.5;        // 1/m; relaxation rate is gain * u
    double mixing_halfwidth = 1.0;   // m/s; blend scale of the mixed target

    void validate() const;

    static SensorTransientScenario from_json_text(const std::string& text);
    static SensorTransientScenario load(const std::string& path);
};

struct TransientSeries {
    double velocity;
    std::vector<double> time;
    std::vector<double> temperature;
};

struct ReferenceMeasurement {
    double velocity;       // m/s
    double duration;       // s
    double measured_drop;  // K
};

struct ComparisonRow {
    double velocity;
    double theoretical_drop;
    std::optional<double> measured_drop;
    std::optional<double> absolute_error;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
};

// Mixed-jet target temperature at velocity u: room at u=0, approaching the
// cold outlet temperature as u grows.
double mixed_temperature(const SensorTransientScenario& scn, double u);

// Explicit fixed-step integration of dT/dt = -gain*u*(T - T_mix(u)), one
// series per velocity. Throws if the step violates the stability bound.
std::vector<TransientSeries> simulate_sensor_transient(const SensorTransientScenario& scn);

// Measured silicon-sheet drops after 3 s at the sheet's 294.45 K start.
const std::vector<ReferenceMeasurement>& reference_measurements();

// Theoretical drops (published-precision coefficient) joined with the
// reference table. Velocities without a reference row get an empty
// measured column.
ComparisonReport run_phantom_experiment(const std::string& preset_name,
                                        const std::vector<double>& velocities,
                                        double duration);

// Predicted skin temperature drop using the published-precision
// coefficients (k to 3 decimals, numerator coefficient to 2), K.
double skin_prediction(double velocity, double duration);

// Theoretical drop for a preset at published coefficient precision.
double published_drop(const thermo::Preset& p, double velocity, double duration);

void write_transient_csv(std::ostream& out, const std::vector<TransientSeries>& series);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);
void write_comparison_svg(std::ostream& out, const ComparisonReport& report);

}  // namespace coolsim::harness

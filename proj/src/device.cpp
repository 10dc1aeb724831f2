#include "coolsim/device.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace coolsim::device {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void VortexTubeSpec::validate() const {
    require(cold_fraction > 0 && cold_fraction < 1,
            "VortexTubeSpec: cold_fraction must be in (0,1)");
    require(supply_temperature > 0, "VortexTubeSpec: supply_temperature must be > 0 K");
    require(cold_outlet_temperature > 0 &&
                cold_outlet_temperature < supply_temperature,
            "VortexTubeSpec: cold_outlet_temperature must be positive and below "
            "supply_temperature");
}

void VortexTubeModel::validate() const {
    require(min_pressure > 0 && max_pressure > min_pressure,
            "VortexTubeModel: pressure band must satisfy 0 < min < max");
    require(supply_temperature_slope >= 0,
            "VortexTubeModel: supply_temperature_slope must be >= 0");
    require(pressure_slope >= 0, "VortexTubeModel: pressure_slope must be >= 0");
}

void ValveCommand::validate() const {
    require(duty_ratio >= 0 && duty_ratio <= 1,
            "ValveCommand: duty_ratio must be in [0,1]");
    require(pwm_frequency > 0, "ValveCommand: pwm_frequency must be > 0");
}

void ValveCalibration::validate() const {
    require(!breakpoints.empty(), "ValveCalibration: breakpoints must not be empty");
    require(breakpoints.front().second == 0.0,
            "ValveCalibration: first breakpoint velocity must be 0");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        const auto& [duty, vel] = breakpoints[i];
        require(duty >= 0 && duty <= 1,
                "ValveCalibration: duty ratios must be in [0,1]");
        require(vel >= 0, "ValveCalibration: velocities must be >= 0");
        if (i > 0) {
            require(duty > breakpoints[i - 1].first,
                    "ValveCalibration: duty ratios must be strictly increasing");
            require(vel >= breakpoints[i - 1].second,
                    "ValveCalibration: velocities must be non-decreasing");
        }
    }
}

ValveCalibration ValveCalibration::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("ValveCalibration: bad JSON: ") + e.what());
    }
    ValveCalibration cal;
    for (const auto& pair : doc.at("breakpoints")) {
        cal.breakpoints.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    cal.validate();
    return cal;
}

ValveCalibration ValveCalibration::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ValveCalibration: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

double cold_air_temperature(const VortexTubeSpec& spec, const VortexTubeModel& model) {
    spec.validate();
    model.validate();
    if (spec.supply_pressure < model.min_pressure ||
        spec.supply_pressure > model.max_pressure) {
        throw std::out_of_range("cold_air_temperature: supply_pressure outside operating band");
    }
    return spec.cold_outlet_temperature +
           model.supply_temperature_slope *
               (spec.supply_temperature - model.reference_supply_temperature) -
           model.pressure_slope * (spec.supply_pressure - model.reference_pressure());
}

double duty_to_velocity(const ValveCommand& cmd, const ValveCalibration& cal) {
    cmd.validate();
    cal.validate();
    const auto& bp = cal.breakpoints;
    if (cmd.duty_ratio < bp.front().first) return 0.0;
    if (cmd.duty_ratio >= bp.back().first) return bp.back().second;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (cmd.duty_ratio <= bp[i].first) {
            const auto& [d0, v0] = bp[i - 1];
            const auto& [d1, v1] = bp[i];
            return v0 + (v1 - v0) * (cmd.duty_ratio - d0) / (d1 - d0);
        }
    }
    return bp.back().second;  // unreachable
}

double velocity_to_duty(double target_velocity, const ValveCalibration& cal) {
    cal.validate();
    const auto& bp = cal.breakpoints;
    if (target_velocity < 0) {
        throw std::invalid_argument("velocity_to_duty: target must be >= 0");
    }
    if (target_velocity > bp.back().second) {
        throw std::out_of_range("velocity_to_duty: target above calibrated maximum");
    }
    if (target_velocity <= bp.front().second) return bp.front().first;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (bp[i].second >= target_velocity) {
            const auto& [d0, v0] = bp[i - 1];
            const auto& [d1, v1] = bp[i];
            // v1 > v0 here: the segment crossing the target cannot be flat.
            return d0 + (d1 - d0) * (target_velocity - v0) / (v1 - v0);
        }
    }
    return bp.back().first;  // unreachable
}

}  // namespace coolsim::device

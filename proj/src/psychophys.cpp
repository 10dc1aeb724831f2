#include "coolsim/psychophys.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "coolsim/thermo.hpp"
#include "json.hpp"

namespace coolsim::psychophys {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::uint64_t bounded_draw(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

constexpr double kSigmaMin = 0.05;
constexpr double kSigmaMax = 5.0;
constexpr double kProbFloor = 1e-12;

struct LikelihoodData {
    std::vector<LevelCounts> levels;

    double nll(double mu, double sigma) const {
        double acc = 0.0;
        for (const auto& lv : levels) {
            double p = normal_cdf((lv.velocity - mu) / sigma);
            p = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
            acc -= lv.colder * std::log(p) + (lv.n - lv.colder) * std::log(1.0 - p);
        }
        return acc;
    }

    std::array<double, 2> gradient(double mu, double sigma) const {
        double g_mu = 0.0, g_sigma = 0.0;
        for (const auto& lv : levels) {
            const double z = (lv.velocity - mu) / sigma;
            const double p =
                std::clamp(normal_cdf(z), kProbFloor, 1.0 - kProbFloor);
            const double pdf =
                std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
            const double common =
                pdf * (lv.colder / p - (lv.n - lv.colder) / (1.0 - p)) / sigma;
            g_mu += common;
            g_sigma += common * z;
        }
        return {g_mu, g_sigma};
    }
};

// Nelder-Mead over (mu, sigma) with the parameter box enforced by
// clamped evaluation.
std::array<double, 2> nelder_mead(const std::function<double(std::array<double, 2>)>& f,
                                  std::array<double, 2> start, std::array<double, 2> step) {
    using Point = std::array<double, 2>;
    struct Vertex {
        Point x;
        double value;
    };
    std::array<Vertex, 3> simplex;
    simplex[0] = {start, f(start)};
    for (int i = 0; i < 2; ++i) {
        Point p = start;
        p[i] += step[i];
        simplex[i + 1] = {p, f(p)};
    }
    auto centroid = [](const Vertex& a, const Vertex& b) {
        return Point{0.5 * (a.x[0] + b.x[0]), 0.5 * (a.x[1] + b.x[1])};
    };
    for (int iter = 0; iter < 4000; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
        const double spread = simplex[2].value - simplex[0].value;
        const double diam = std::max(std::abs(simplex[2].x[0] - simplex[0].x[0]),
                                     std::abs(simplex[2].x[1] - simplex[0].x[1]));
        if (spread < 1e-13 && diam < 1e-10) break;

        const Point c = centroid(simplex[0], simplex[1]);
        auto along = [&](double coeff) {
            return Point{c[0] + coeff * (c[0] - simplex[2].x[0]),
                         c[1] + coeff * (c[1] - simplex[2].x[1])};
        };
        const Point refl = along(1.0);
        const double f_refl = f(refl);
        if (f_refl < simplex[0].value) {
            const Point exp_p = along(2.0);
            const double f_exp = f(exp_p);
            simplex[2] = f_exp < f_refl ? Vertex{exp_p, f_exp} : Vertex{refl, f_refl};
        } else if (f_refl < simplex[1].value) {
            simplex[2] = {refl, f_refl};
        } else {
            const Point con = along(-0.5);
            const double f_con = f(con);
            if (f_con < simplex[2].value) {
                simplex[2] = {con, f_con};
            } else {
                for (int i = 1; i < 3; ++i) {
                    for (int d = 0; d < 2; ++d) {
                        simplex[i].x[d] = simplex[0].x[d] + 0.5 * (simplex[i].x[d] - simplex[0].x[d]);
                    }
                    simplex[i].value = f(simplex[i].x);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    return simplex[0].x;
}

}  // namespace

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double GaussianStream::next(double mean, double sd) {
    constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
    double u1 = static_cast<double>(engine_() >> 11) * kInv53;
    const double u2 = static_cast<double>(engine_() >> 11) * kInv53;
    if (u1 <= 0.0) u1 = kInv53;
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
}

void StimulusSchedule::validate() const {
    require(!comparisons.empty(), "StimulusSchedule: comparisons must not be empty");
    require(trials_per_comparison > 0, "StimulusSchedule: trials_per_comparison must be > 0");
    require(stimulus_duration > 0, "StimulusSchedule: stimulus_duration must be > 0");
    require(gap_duration > 0, "StimulusSchedule: gap_duration must be > 0");
    require(break_every > 0, "StimulusSchedule: break_every must be > 0");
    require(standard > 0, "StimulusSchedule: standard must be > 0");
}

void ObserverModel::validate() const {
    require(noise_sd > 0, "ObserverModel: noise_sd must be > 0");
    require(static_cast<bool>(response_map), "ObserverModel: response_map must be set");
}

std::vector<Trial> build_schedule(const StimulusSchedule& schedule) {
    schedule.validate();
    std::vector<double> comparisons;
    comparisons.reserve(schedule.comparisons.size() * schedule.trials_per_comparison);
    for (double v : schedule.comparisons) {
        for (int i = 0; i < schedule.trials_per_comparison; ++i) comparisons.push_back(v);
    }
    std::mt19937_64 eng(schedule.rng_seed);
    // Fisher-Yates; own shuffle so the order is seed-stable everywhere.
    for (std::size_t i = comparisons.size(); i > 1; --i) {
        std::swap(comparisons[i - 1], comparisons[bounded_draw(eng, i)]);
    }
    std::vector<Trial> trials;
    trials.reserve(comparisons.size());
    for (std::size_t i = 0; i < comparisons.size(); ++i) {
        trials.push_back(Trial{static_cast<int>(i), comparisons[i], schedule.standard,
                               bounded_draw(eng, 2) == 1});
    }
    return trials;
}

TrialRecord simulate_trial(const ObserverModel& observer, const Trial& trial,
                           GaussianStream& noise) {
    observer.validate();
    // Draw in presentation order so interval timing and noise line up.
    const double first = trial.comparison_first ? trial.comparison : trial.standard;
    const double second = trial.comparison_first ? trial.standard : trial.comparison;
    const double r_first = noise.next(observer.response_map(first), observer.noise_sd);
    const double r_second = noise.next(observer.response_map(second), observer.noise_sd);
    const double r_comparison = trial.comparison_first ? r_first : r_second;
    const double r_standard = trial.comparison_first ? r_second : r_first;
    return TrialRecord{trial.index, trial.comparison, trial.standard,
                       trial.comparison_first, r_comparison > r_standard};
}

std::vector<TrialRecord> run_session(const ObserverModel& observer,
                                     const std::vector<Trial>& trials,
                                     std::uint64_t noise_seed) {
    GaussianStream noise(noise_seed);
    std::vector<TrialRecord> records;
    records.reserve(trials.size());
    for (const auto& trial : trials) {
        records.push_back(simulate_trial(observer, trial, noise));
    }
    return records;
}

PsychometricFit fit_psychometric(const std::vector<TrialRecord>& records) {
    require(!records.empty(), "fit_psychometric: no trial records");
    std::map<double, LevelCounts> by_level;
    int total_colder = 0;
    for (const auto& rec : records) {
        auto& lv = by_level[rec.comparison];
        lv.velocity = rec.comparison;
        ++lv.n;
        if (rec.response_comparison_colder) {
            ++lv.colder;
            ++total_colder;
        }
    }
    if (by_level.size() < 2) {
        throw std::invalid_argument(
            "fit_psychometric: need responses at >= 2 distinct comparison levels");
    }
    if (total_colder == 0 || total_colder == static_cast<int>(records.size())) {
        throw DegenerateDataError(
            "fit_psychometric: degenerate data, every response is identical "
            "(all '" + std::string(total_colder ? "colder" : "not colder") +
            "'); the psychometric slope is unidentifiable");
    }

    LikelihoodData data;
    for (const auto& [v, lv] : by_level) data.levels.push_back(lv);

    const double v_min = data.levels.front().velocity;
    const double v_max = data.levels.back().velocity;
    const double span = v_max - v_min;
    const double mu_min = v_min - span;
    const double mu_max = v_max + span;

    auto clamped = [&](std::array<double, 2> p) {
        return std::array<double, 2>{std::clamp(p[0], mu_min, mu_max),
                                     std::clamp(p[1], kSigmaMin, kSigmaMax)};
    };
    auto objective = [&](std::array<double, 2> p) {
        const auto q = clamped(p);
        return data.nll(q[0], q[1]);
    };

    // Coarse grid over the stimulus range and the sigma box.
    std::array<double, 2> best{v_min, 1.0};
    double best_val = std::numeric_limits<double>::infinity();
    constexpr int kMuSteps = 41;
    constexpr int kSigmaSteps = 21;
    for (int i = 0; i < kMuSteps; ++i) {
        const double mu = v_min + span * i / (kMuSteps - 1);
        for (int j = 0; j < kSigmaSteps; ++j) {
            const double sigma =
                kSigmaMin * std::pow(kSigmaMax / kSigmaMin, static_cast<double>(j) / (kSigmaSteps - 1));
            const double val = data.nll(mu, sigma);
            if (val < best_val) {
                best_val = val;
                best = {mu, sigma};
            }
        }
    }

    auto refined = nelder_mead(objective, best, {0.1 * std::max(span, 1.0), 0.1});
    refined = clamped(refined);

    // Newton polish on the analytic gradient until the projected gradient
    // drops below 1e-8 (a bound-constrained optimum keeps its projected
    // gradient at zero along the active bound).
    auto projected_norm = [&](const std::array<double, 2>& p,
                              const std::array<double, 2>& g) {
        double n = 0.0;
        const bool mu_low = p[0] <= mu_min && g[0] > 0;
        const bool mu_high = p[0] >= mu_max && g[0] < 0;
        const bool s_low = p[1] <= kSigmaMin && g[1] > 0;
        const bool s_high = p[1] >= kSigmaMax && g[1] < 0;
        if (!mu_low && !mu_high) n = std::max(n, std::abs(g[0]));
        if (!s_low && !s_high) n = std::max(n, std::abs(g[1]));
        return n;
    };
    for (int iter = 0; iter < 100; ++iter) {
        const auto grad = data.gradient(refined[0], refined[1]);
        if (projected_norm(refined, grad) <= 1e-8) break;
        // Finite-difference Hessian of the analytic gradient.
        const double h = 1e-6;
        const auto g_mu = data.gradient(refined[0] + h, refined[1]);
        const auto g_sg = data.gradient(refined[0], refined[1] + h);
        const double h00 = (g_mu[0] - grad[0]) / h;
        const double h01 = 0.5 * ((g_mu[1] - grad[1]) / h + (g_sg[0] - grad[0]) / h);
        const double h11 = (g_sg[1] - grad[1]) / h;
        const double det = h00 * h11 - h01 * h01;
        std::array<double, 2> step;
        if (det > 1e-12 && h00 > 0) {
            step = {(h11 * grad[0] - h01 * grad[1]) / det,
                    (h00 * grad[1] - h01 * grad[0]) / det};
        } else {
            step = {grad[0] / std::max(std::abs(h00), 1.0),
                    grad[1] / std::max(std::abs(h11), 1.0)};
        }
        const double base = data.nll(refined[0], refined[1]);
        double scale = 1.0;
        std::array<double, 2> next = refined;
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            next = clamped({refined[0] - scale * step[0], refined[1] - scale * step[1]});
            if (data.nll(next[0], next[1]) <= base) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved || (next[0] == refined[0] && next[1] == refined[1])) break;
        refined = next;
    }
    const auto final_p = clamped(refined);

    PsychometricFit fit;
    fit.mu = final_p[0];
    fit.sigma = final_p[1];
    fit.jnd = kUpperQuartileZ * fit.sigma;
    fit.log_likelihood = -data.nll(fit.mu, fit.sigma);
    fit.levels = data.levels;
    return fit;
}

double jnd(const PsychometricFit& fit) {
    require(fit.sigma > 0, "jnd: fit.sigma must be > 0");
    auto invert = [&](double q) {
        double lo = fit.mu - 20.0 * fit.sigma;
        double hi = fit.mu + 20.0 * fit.sigma;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            if (normal_cdf((mid - fit.mu) / fit.sigma) < q) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    return 0.5 * (invert(0.75) - invert(0.25));
}

std::function<double(double)> cooling_response_map(double stimulus_duration) {
    require(stimulus_duration > 0, "cooling_response_map: duration must be > 0");
    const auto p = thermo::preset("skin");
    const auto coeff = thermo::cooling_coefficient(p.air, p.nozzle, p.body);
    const double body_temp = p.body.temperature;
    const double air_temp = p.air.temperature;
    return [coeff, body_temp, air_temp, stimulus_duration](double v) {
        return thermo::temperature_drop(coeff, v, stimulus_duration, body_temp, air_temp);
    };
}

CalibrationResult calibrate_observer(double target_jnd, double standard,
                                     std::function<double(double)> response_map,
                                     double sd_min, double sd_max) {
    require(target_jnd > 0, "calibrate_observer: target_jnd must be > 0");
    require(static_cast<bool>(response_map), "calibrate_observer: response_map must be set");
    require(sd_min > 0 && sd_max > sd_min, "calibrate_observer: bad sd bounds");

    const double h = 1e-6 * std::max(1.0, std::abs(standard));
    const double slope = (response_map(standard + h) - response_map(standard - h)) / (2 * h);
    require(slope > 0, "calibrate_observer: response_map slope at the standard must be > 0");

    // 2AFC with independent interval noise: discrimination sigma in
    // velocity units is noise_sd * sqrt(2) / slope.
    auto predicted = [&](double sd) {
        return kUpperQuartileZ * sd * std::numbers::sqrt2 / slope;
    };
    if (predicted(sd_min) > target_jnd || predicted(sd_max) < target_jnd) {
        throw std::out_of_range("calibrate_observer: target_jnd unreachable within sd bounds");
    }
    double lo = sd_min, hi = sd_max;
    for (int i = 0; i < 200 && (hi - lo) > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (predicted(mid) < target_jnd) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double sd = 0.5 * (lo + hi);
    return CalibrationResult{ObserverModel{sd, std::move(response_map)}, target_jnd,
                             predicted(sd), slope};
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << "trial,comparison_mps,standard_mps,comparison_first,response_comparison_colder\n";
    char buf[128];
    for (const auto& rec : records) {
        std::snprintf(buf, sizeof(buf), "%d,%.3f,%.3f,%d,%d\n", rec.index, rec.comparison,
                      rec.standard, rec.comparison_first ? 1 : 0,
                      rec.response_comparison_colder ? 1 : 0);
        out << buf;
    }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("trial CSV: empty input");
    }
    if (line != "trial,comparison_mps,standard_mps,comparison_first,response_comparison_colder") {
        throw std::runtime_error("trial CSV line 1: unexpected header '" + line + "'");
    }
    std::vector<TrialRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) {
            throw std::runtime_error("trial CSV line " + std::to_string(line_no) +
                                     ": expected 5 fields, got " + std::to_string(fields.size()));
        }
        try {
            TrialRecord rec;
            std::size_t pos = 0;
            rec.index = std::stoi(fields[0], &pos);
            rec.comparison = std::stod(fields[1]);
            rec.standard = std::stod(fields[2]);
            const int first = std::stoi(fields[3]);
            const int colder = std::stoi(fields[4]);
            if ((first != 0 && first != 1) || (colder != 0 && colder != 1)) {
                throw std::invalid_argument("boolean fields must be 0 or 1");
            }
            rec.comparison_first = first == 1;
            rec.response_comparison_colder = colder == 1;
            records.push_back(rec);
        } catch (const std::exception& e) {
            throw std::runtime_error("trial CSV line " + std::to_string(line_no) +
                                     ": malformed row (" + e.what() + ")");
        }
    }
    return records;
}

std::string fit_to_json(const PsychometricFit& fit) {
    nlohmann::json doc;
    doc["mu"] = fit.mu;
    doc["sigma"] = fit.sigma;
    doc["jnd"] = fit.jnd;
    doc["log_likelihood"] = fit.log_likelihood;
    doc["levels"] = nlohmann::json::array();
    for (const auto& lv : fit.levels) {
        doc["levels"].push_back({{"v", lv.velocity}, {"n", lv.n}, {"k", lv.colder}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace coolsim::psychophys

#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace coolsim::psychophys {

// z such that the standard normal CDF equals 0.75; JND = z * sigma.
inline constexpr double kUpperQuartileZ = 0.6744897501960817;

double normal_cdf(double z);

/// Deterministic Gaussian stream: Box-Muller over mt19937_64, two uniform
/// draws per variate, so seeded runs are byte-identical across platforms.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    double next(double mean, double sd);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

struct StimulusSchedule {
    double standard = 2.0;  // m/s
    std::vector<double> comparisons = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    int trials_per_comparison = 10;
    double stimulus_duration = 2.0;  // s
    double gap_duration = 1.0;       // s
    int break_every = 10;            // trials between breaks
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct Trial {
    int index;
    double comparison;  // m/s
    double standard;    // m/s
    bool comparison_first;
};

struct TrialRecord {
    int index;
    double comparison;
    double standard;
    bool comparison_first;
    bool response_comparison_colder;
};

/// Simulated stand-in for a participant: a monotone velocity -> internal
/// coldness map plus additive Gaussian noise on each interval.
struct ObserverModel {
    double noise_sd;
    std::function<double(double)> response_map;

    void validate() const;
};

struct LevelCounts {
    double velocity;
    int n;
    int colder;  // "comparison colder" responses
};

struct PsychometricFit {
    double mu;      // point of subjective equality, m/s
    double sigma;   // m/s
    double jnd;     // kUpperQuartileZ * sigma
    double log_likelihood;
    std::vector<LevelCounts> levels;
};

/// Raised when the responses carry no slope information (all identical).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Randomized trial order: each comparison exactly trials_per_comparison
// times, order and first-interval assignment drawn from the schedule seed.
std::vector<Trial> build_schedule(const StimulusSchedule& schedule);

// One 2AFC trial: noisy internal response per interval, answer is the
// interval with the larger response.
TrialRecord simulate_trial(const ObserverModel& observer, const Trial& trial,
                           GaussianStream& noise);

// Whole session with an observer noise stream independent of the
// schedule's ordering stream.
std::vector<TrialRecord> run_session(const ObserverModel& observer,
                                     const std::vector<Trial>& trials,
                                     std::uint64_t noise_seed);

// Per-trial Bernoulli MLE of P(colder | v) = Phi((v - mu)/sigma).
// Coarse grid over (mu in the stimulus range, sigma in [0.05, 5]), then
// Nelder-Mead refinement inside those bounds.
PsychometricFit fit_psychometric(const std::vector<TrialRecord>& records);

// JND from the fitted curve by numeric inversion at 0.75/0.25, bisection
// to 1e-10. Agrees with kUpperQuartileZ * sigma.
double jnd(const PsychometricFit& fit);

// Internal response map derived from the cooling model: predicted skin
// temperature drop after `stimulus_duration` seconds at velocity v.
std::function<double(double)> cooling_response_map(double stimulus_duration);

struct CalibrationResult {
    ObserverModel observer;
    double target_jnd;
    double predicted_jnd;   // closed-form 2AFC JND at the found noise_sd
    double response_slope;  // d(response)/dv at the standard
};

// Find noise_sd whose asymptotic 2AFC JND at the standard matches the
// target: jnd = kUpperQuartileZ * noise_sd * sqrt(2) / slope. Solved by
// bisection over noise_sd.
CalibrationResult calibrate_observer(double target_jnd, double standard,
                                     std::function<double(double)> response_map,
                                     double sd_min = 1e-9, double sd_max = 1e3);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);

// Throws std::runtime_error naming the offending line on malformed rows.
std::vector<TrialRecord> read_trials_csv(std::istream& in);

std::string fit_to_json(const PsychometricFit& fit);

}  // namespace coolsim::psychophys

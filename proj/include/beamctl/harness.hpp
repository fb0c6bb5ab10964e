#pragma once

// Experiment orchestration: configuration files, the delay-pullback
// experiment, linear verification suite and CSV output.

#include "beamctl/dynamics.hpp"
#include "beamctl/gramian.hpp"
#include "beamctl/steering.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamctl {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class TargetPreset { FreeTrajectory, SingleMode, Random };
enum class HistoryPreset { Zero, SingleMode, Random };
enum class BaseControlPreset { Zero, Sine };

struct ExperimentSpec {
    SimConfig sim;

    TargetPreset target = TargetPreset::SingleMode;
    int target_mode = 1;            // 1-based
    double target_amplitude = 1.0;  // Z^1 norm of the target

    HistoryPreset history = HistoryPreset::Random;
    int history_mode = 1;
    double history_amplitude = 1.0;  // Z^1 norm of the constant history state

    BaseControlPreset base_control = BaseControlPreset::Zero;
    double base_amplitude = 0.0;

    std::vector<double> alphas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> deltas{0.2, 0.1, 0.05};
    double epsilon = 1e-2;
    std::uint64_t seed = 1;
    std::filesystem::path output;

    /// Rejects the experiment (ConfigError) before any computation when a delta
    /// violates delta < min(r, tau - t_p) or any other constraint fails.
    void validate() const;
};

/// Parses the sectioned key-value format ([simulation], [catalog],
/// [impulses], [sweep]). Unknown keys are rejected.
[[nodiscard]] ExperimentSpec parse_experiment(const std::string& text);
[[nodiscard]] ExperimentSpec load_experiment(const std::filesystem::path& path);

/// The configuration used by the acceptance experiment.
[[nodiscard]] ExperimentSpec default_pullback_spec();

/// Realizes the history, target and base control presets.
[[nodiscard]] HistoryFn make_history(const ExperimentSpec& spec);
[[nodiscard]] ControlFn make_base_control(const ExperimentSpec& spec);
/// `free_final` is the end state of the base-control run (used by the
/// free-trajectory preset).
[[nodiscard]] StateZ1 make_target(const ExperimentSpec& spec, const StateZ1& free_final);

struct ResultRow {
    double alpha;
    double delta;
    double error_total;  // ||z(tau) - z1||
    double error_nl;     // ||z(tau) - y(tau)||
    double error_lin;    // ||y(tau) - z1||
    double runtime_s;
    std::size_t steps;
};

/// One full semilinear run per (delta, alpha): base control to tau - delta,
/// steering control synthesized from z(tau - delta), compared against the
/// linear steered state y(tau). Rows ordered delta-descending, alpha-descending.
[[nodiscard]] std::vector<ResultRow> run_pullback_experiment(const ExperimentSpec& spec);

struct PullbackAssessment {
    bool reached_epsilon = false;
    double best_error = 0.0;
    double best_alpha = 0.0;
    double best_delta = 0.0;
    double min_nl_ratio = 0.0;      // smallest error_nl(delta) / error_nl(delta / 2) over alphas
    bool nl_decreasing = false;      // every halving ratio >= 1.5
    bool lin_decreasing = false;     // error_lin nonincreasing as alpha decreases, per delta
    bool triangle_consistent = false;
    double fitted_c = 0.0;           // max error_nl / delta
};

[[nodiscard]] PullbackAssessment assess_pullback(const std::vector<ResultRow>& rows, double epsilon);

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    bool expected_failure = false;  // the check probes a case that must fail
    std::string detail;
};

/// Residual identity, alpha sweep, right inverse, gramian and energy checks.
[[nodiscard]] std::vector<CheckResult> run_linear_suite(const ExperimentSpec& spec);

/// Closed form vs quadrature and positive definiteness, per mode.
[[nodiscard]] std::vector<CheckResult> run_gramian_check(const ExperimentSpec& spec);

struct CsvOptions {
    /// When false the runtime column is written as 0 so reruns are byte-identical.
    bool record_runtime = true;
};

/// Writes `# seed=<seed>`, the header, then rows sorted delta-desc/alpha-desc,
/// 12 significant digits. Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path, std::uint64_t seed,
              CsvOptions options = {});

[[nodiscard]] std::string format_csv(const std::vector<ResultRow>& rows, std::uint64_t seed,
                                     CsvOptions options = {});

}  // namespace beamctl

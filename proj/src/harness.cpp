#include "beamctl/harness.hpp"

#include "beamctl/quadrature.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace beamctl {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void ExperimentSpec::validate() const {
    try {
        SimConfig probe = sim;
        probe.delta.reset();
        probe.alpha.reset();
        probe.validate();
        if (deltas.empty()) throw ConfigError("sweep.deltas must not be empty");
        if (alphas.empty()) throw ConfigError("sweep.alphas must not be empty");
        for (double d : deltas) {
            probe.delta = d;
            probe.validate();
        }
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (!(alphas[i] > 0.0) || alphas[i] > 1.0) throw ConfigError("alphas must lie in (0, 1]");
        }
        if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
        if (target_mode < 1 || target_mode > sim.modes) throw ConfigError("target_mode out of range");
        if (history_mode < 1 || history_mode > sim.modes) throw ConfigError("history_mode out of range");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

double parse_real(const std::string& key, const std::string& text) {
    const std::string s = boost::algorithm::trim_copy(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "': not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(value)) {
        throw ConfigError("'" + key + "': not a number: '" + s + "'");
    }
    return value;
}

int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_real(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("'" + key + "': expected an integer");
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (boost::algorithm::trim_copy(text).empty()) return out;
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
    for (const auto& p : parts) out.push_back(parse_real(key, p));
    return out;
}

std::string parse_word(const std::string& text) { return boost::algorithm::trim_copy(text); }

template <class Enum>
Enum parse_choice(const std::string& key, const std::string& text, const std::map<std::string, Enum>& choices) {
    const std::string w = parse_word(text);
    if (auto it = choices.find(w); it != choices.end()) return it->second;
    throw ConfigError("'" + key + "': unknown value '" + w + "'");
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& text) {
    boost::property_tree::ptree tree;
    try {
        std::istringstream in(text);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    ExperimentSpec spec;
    std::optional<double> steps_per_unit;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("key '" + section + "' outside of a section");
        }
        for (const auto& [key, node] : body) {
            const std::string name = section + "." + key;
            const std::string& val = node.data();
            try {
                if (section == "simulation") {
                    if (key == "modes") spec.sim.modes = parse_int(name, val);
                    else if (key == "length") spec.sim.length = parse_real(name, val);
                    else if (key == "grid_points") spec.sim.grid_points = parse_int(name, val);
                    else if (key == "beta") spec.sim.beta = parse_real(name, val);
                    else if (key == "tau") spec.sim.tau = parse_real(name, val);
                    else if (key == "delay") spec.sim.delay = parse_real(name, val);
                    else if (key == "step") spec.sim.step = parse_real(name, val);
                    else if (key == "steps_per_unit") steps_per_unit = parse_real(name, val);
                    else if (key == "history") {
                        spec.history = parse_choice<HistoryPreset>(
                            name, val,
                            {{"zero", HistoryPreset::Zero}, {"single_mode", HistoryPreset::SingleMode},
                             {"random", HistoryPreset::Random}});
                    } else if (key == "history_mode") spec.history_mode = parse_int(name, val);
                    else if (key == "history_amplitude") spec.history_amplitude = parse_real(name, val);
                    else if (key == "base_control") {
                        spec.base_control = parse_choice<BaseControlPreset>(
                            name, val, {{"zero", BaseControlPreset::Zero}, {"sine", BaseControlPreset::Sine}});
                    } else if (key == "base_amplitude") spec.base_amplitude = parse_real(name, val);
                    else throw ConfigError("unknown key '" + name + "'");
                } else if (section == "catalog") {
                    auto& c = spec.sim.catalog;
                    if (key == "f") c.f_kind = parse_forcing_kind(parse_word(val));
                    else if (key == "a") c.a = parse_real(name, val);
                    else if (key == "b") c.b = parse_real(name, val);
                    else if (key == "g") c.g_kind = parse_memory_map_kind(parse_word(val));
                    else if (key == "kernel") c.kernel_kind = parse_kernel_kind(parse_word(val));
                    else if (key == "kappa") c.kappa = parse_real(name, val);
                    else if (key == "gamma") c.gamma = parse_real(name, val);
                    else throw ConfigError("unknown key '" + name + "'");
                } else if (section == "impulses") {
                    if (key == "times") spec.sim.impulses.times = parse_list(name, val);
                    else if (key == "gains") spec.sim.impulses.gains = parse_list(name, val);
                    else throw ConfigError("unknown key '" + name + "'");
                } else if (section == "sweep") {
                    if (key == "alphas") spec.alphas = parse_list(name, val);
                    else if (key == "deltas") spec.deltas = parse_list(name, val);
                    else if (key == "epsilon") spec.epsilon = parse_real(name, val);
                    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int(name, val));
                    else if (key == "target") {
                        spec.target = parse_choice<TargetPreset>(
                            name, val,
                            {{"free_trajectory", TargetPreset::FreeTrajectory},
                             {"single_mode", TargetPreset::SingleMode},
                             {"random", TargetPreset::Random}});
                    } else if (key == "target_mode") spec.target_mode = parse_int(name, val);
                    else if (key == "target_amplitude") spec.target_amplitude = parse_real(name, val);
                    else if (key == "output") spec.output = parse_word(val);
                    else throw ConfigError("unknown key '" + name + "'");
                } else {
                    throw ConfigError("unknown section [" + section + "]");
                }
            } catch (const ConfigError&) {
                throw;
            } catch (const std::invalid_argument& e) {
                throw ConfigError("'" + name + "': " + e.what());
            }
        }
    }
    if (steps_per_unit) {
        if (!(*steps_per_unit > 0.0)) throw ConfigError("simulation.steps_per_unit must be positive");
        spec.sim.step = 1.0 / *steps_per_unit;
    }
    // Sweep order is part of the output contract.
    std::sort(spec.deltas.begin(), spec.deltas.end(), std::greater<>{});
    std::sort(spec.alphas.begin(), spec.alphas.end(), std::greater<>{});
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

ExperimentSpec default_pullback_spec() {
    ExperimentSpec spec;
    spec.sim.modes = 8;
    spec.sim.length = 1.0;
    spec.sim.grid_points = 64;
    spec.sim.beta = 2.0;
    spec.sim.tau = 1.0;
    spec.sim.delay = 0.3;
    spec.sim.step = 1.0 / 600.0;
    spec.sim.catalog = {ForcingKind::LinearGrowth, 0.5, 0.0, MemoryMapKind::Sine, KernelKind::Exponential, 0.5, 1.0};
    spec.sim.impulses = {{0.4, 0.7}, {0.05, 0.05}};
    spec.target = TargetPreset::SingleMode;
    spec.target_mode = 1;
    spec.target_amplitude = 1.0;
    spec.history = HistoryPreset::Random;
    spec.history_amplitude = 1.0;
    spec.alphas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    spec.deltas = {0.2, 0.1, 0.05};
    spec.epsilon = 1e-2;
    spec.seed = 20240607;
    return spec;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

StateZ1 unit_deflection(const ModeSet& modes, int mode, double amplitude) {
    StateZ1 z = StateZ1::zero(modes.size());
    const auto j = static_cast<std::size_t>(mode - 1);
    z.w[j] = amplitude / modes.lambda(j);
    return z;
}

// History draws come first from the seeded stream, then the target.
std::mt19937_64 seeded(const ExperimentSpec& spec, int stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xffffffffu), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace

HistoryFn make_history(const ExperimentSpec& spec) {
    const ModeSet modes = spec.sim.mode_set();
    StateZ1 phi = StateZ1::zero(modes.size());
    switch (spec.history) {
        case HistoryPreset::Zero: break;
        case HistoryPreset::SingleMode: phi = unit_deflection(modes, spec.history_mode, spec.history_amplitude); break;
        case HistoryPreset::Random: {
            auto rng = seeded(spec, 1);
            phi = random_state(modes, rng, spec.history_amplitude);
            break;
        }
    }
    return [phi](double) { return phi; };
}

ControlFn make_base_control(const ExperimentSpec& spec) {
    if (spec.base_control == BaseControlPreset::Zero || spec.base_amplitude == 0.0) return {};
    const auto n = static_cast<std::size_t>(spec.sim.modes);
    const double amp = spec.base_amplitude;
    const double tau = spec.sim.tau;
    return [n, amp, tau](double t) {
        FieldCoeffs u(n, 0.0);
        u[0] = amp * std::sin(2.0 * std::numbers::pi * t / tau);
        return u;
    };
}

StateZ1 make_target(const ExperimentSpec& spec, const StateZ1& free_final) {
    const ModeSet modes = spec.sim.mode_set();
    switch (spec.target) {
        case TargetPreset::FreeTrajectory: return free_final;
        case TargetPreset::SingleMode: return unit_deflection(modes, spec.target_mode, spec.target_amplitude);
        case TargetPreset::Random: {
            auto rng = seeded(spec, 2);
            return random_state(modes, rng, spec.target_amplitude);
        }
    }
    return free_final;
}

// ---------------------------------------------------------------------------
// Pullback experiment
// ---------------------------------------------------------------------------

std::vector<ResultRow> run_pullback_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const ModeSet modes = spec.sim.mode_set();
    SimConfig base_cfg = spec.sim;
    base_cfg.history = make_history(spec);
    base_cfg.delta.reset();
    base_cfg.alpha.reset();
    const ControlFn base = make_base_control(spec);

    const Trajectory free_run = simulate(base_cfg, ControlSignal(modes.size(), base));
    const StateZ1 z1 = make_target(spec, free_run.final_state());

    std::vector<double> deltas = spec.deltas;
    std::vector<double> alphas = spec.alphas;
    std::sort(deltas.begin(), deltas.end(), std::greater<>{});
    std::sort(alphas.begin(), alphas.end(), std::greater<>{});

    std::vector<ResultRow> rows;
    rows.reserve(deltas.size() * alphas.size());
    for (double delta : deltas) {
        const SteerWindow window(spec.sim.tau, delta);
        // The control before tau - delta is the base control in every run, so
        // the free run already holds z(tau - delta).
        const StateZ1 y0 = free_run.at(window.start());
        for (double alpha : alphas) {
            const auto t_start = std::chrono::steady_clock::now();
            SimConfig cfg = base_cfg;
            cfg.delta = delta;
            cfg.alpha = alpha;
            const SteeringPlan plan = plan_steering({y0, z1, window, alpha}, modes, cfg.beta, base);
            const Trajectory run = simulate(cfg, plan.control);
            const StateZ1 y_tau = steer_linear(y0, plan.control, modes, cfg.beta);
            const StateZ1& z_tau = run.final_state();
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
            rows.push_back({alpha, delta, z1_norm(z_tau - z1, modes), z1_norm(z_tau - y_tau, modes),
                            z1_norm(y_tau - z1, modes), elapsed, cfg.steps()});
        }
    }
    return rows;
}

PullbackAssessment assess_pullback(const std::vector<ResultRow>& rows, double epsilon) {
    PullbackAssessment a;
    if (rows.empty()) return a;
    std::set<double, std::greater<>> deltas;
    std::set<double, std::greater<>> alphas;
    std::map<std::pair<double, double>, const ResultRow*> cell;
    a.best_error = std::numeric_limits<double>::infinity();
    a.triangle_consistent = true;
    for (const auto& r : rows) {
        deltas.insert(r.delta);
        alphas.insert(r.alpha);
        cell[{r.delta, r.alpha}] = &r;
        if (r.error_total < a.best_error) {
            a.best_error = r.error_total;
            a.best_alpha = r.alpha;
            a.best_delta = r.delta;
        }
        a.fitted_c = std::max(a.fitted_c, r.error_nl / r.delta);
        if (r.error_total > r.error_nl + r.error_lin + 1e-10) a.triangle_consistent = false;
    }
    a.reached_epsilon = a.best_error < epsilon;

    a.nl_decreasing = true;
    a.min_nl_ratio = std::numeric_limits<double>::infinity();
    const std::vector<double> ds(deltas.begin(), deltas.end());
    for (double alpha : alphas) {
        for (std::size_t i = 0; i + 1 < ds.size(); ++i) {
            const auto hi = cell.find({ds[i], alpha});
            const auto lo = cell.find({ds[i + 1], alpha});
            if (hi == cell.end() || lo == cell.end()) continue;
            const double ratio = hi->second->error_nl / lo->second->error_nl;
            a.min_nl_ratio = std::min(a.min_nl_ratio, ratio);
            if (!(ratio >= 1.5)) a.nl_decreasing = false;
        }
    }

    a.lin_decreasing = true;
    const std::vector<double> as(alphas.begin(), alphas.end());
    for (double delta : ds) {
        for (std::size_t i = 0; i + 1 < as.size(); ++i) {
            const auto hi = cell.find({delta, as[i]});
            const auto lo = cell.find({delta, as[i + 1]});
            if (hi == cell.end() || lo == cell.end()) continue;
            if (lo->second->error_lin > hi->second->error_lin + 1e-12) a.lin_decreasing = false;
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Linear verification suite
// ---------------------------------------------------------------------------

namespace {

CheckResult check(std::string name, double measured, double tolerance, std::string detail = {}) {
    return {std::move(name), measured <= tolerance, measured, tolerance, false, std::move(detail)};
}

double max_abs_diff(const StateZ1& a, const StateZ1& b, const ModeSet& modes) {
    return z1_norm(a - b, modes);
}

}  // namespace

std::vector<CheckResult> run_linear_suite(const ExperimentSpec& spec) {
    spec.validate();
    const ModeSet modes = spec.sim.mode_set();
    const double beta = spec.sim.beta;
    const SteerWindow window(spec.sim.tau, spec.deltas.front());

    auto rng = seeded(spec, 3);
    const StateZ1 y0 = random_state(modes, rng);
    const StateZ1 z1 = random_state(modes, rng);

    std::vector<CheckResult> out;

    const GramianSet qset = assemble_gramian(modes, beta, window);
    out.push_back({"gramian positive definite", qset.positive_definite(), qset.min_eigenvalue(), 0.0, false,
                   "min eigenvalue over all modes"});

    double sym = 0.0;
    for (const auto& b : qset.blocks()) sym = std::max(sym, std::abs(b.q(0, 1) - b.q(1, 0)));
    out.push_back(check("gramian symmetric", sym, 1e-12));

    double residual_worst = 0.0;
    double energy_worst = 0.0;
    double solve_worst = 0.0;
    for (double alpha : spec.alphas) {
        const SteeringPlan plan = plan_steering({y0, z1, window, alpha}, modes, beta);
        const StateZ1 y = steer_linear(y0, plan.control, modes, beta);
        const StateZ1 predicted = (-1.0) * regularized_miss(plan.gramian, alpha, plan.mismatch);
        residual_worst = std::max(residual_worst, max_abs_diff(y - z1, predicted, modes));

        const double energy = control_energy(plan.control, beta, modes, window.start(), window.tau());
        const StateZ1 q_eta = apply_gramian(plan.gramian, plan.eta);
        // <eta, Q eta> in Z^1
        double quad = 0.0;
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const double l2 = modes.lambda(j) * modes.lambda(j);
            quad += l2 * plan.eta.w[j] * q_eta.w[j] + plan.eta.v[j] * q_eta.v[j];
        }
        energy_worst = std::max(energy_worst, std::abs(energy - quad) / std::max(quad, 1e-300));

        const StateZ1 lhs = alpha * plan.eta + q_eta;
        solve_worst = std::max(solve_worst, z1_norm(lhs - plan.mismatch, modes) / z1_norm(plan.mismatch, modes));
    }
    out.push_back(check("residual identity y(tau) - z1 = -alpha (alpha I + Q)^-1 d", residual_worst, 1e-8));
    out.push_back(check("control energy equals <eta, Q eta>", energy_worst, 1e-8, "relative"));
    out.push_back(check("regularized solve residual", solve_worst, 1e-12, "relative"));

    const auto sweep = alpha_sweep(y0, z1, window, spec.alphas, modes, beta);
    double monotone_violation = 0.0;
    double predict_gap = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        predict_gap = std::max(predict_gap, std::abs(sweep[i].error - sweep[i].predicted));
        if (i > 0) monotone_violation = std::max(monotone_violation, sweep[i].error - sweep[i - 1].error);
    }
    out.push_back(check("alpha sweep nonincreasing", monotone_violation, 1e-12));
    out.push_back(check("alpha sweep matches blockwise miss", predict_gap, 1e-8));

    const auto right = approximate_right_inverse_check(qset, z1, spec.alphas);
    double bound_violation = -std::numeric_limits<double>::infinity();
    double right_gap = 0.0;
    for (const auto& p : right) {
        bound_violation = std::max(bound_violation, p.error - p.bound);
        right_gap = std::max(right_gap, std::abs(p.error - p.predicted));
    }
    out.push_back(check("right inverse error within alpha ||z|| / (alpha + q_min)", bound_violation, 1e-10));
    out.push_back(check("right inverse error matches blockwise miss", right_gap, 1e-8));

    // A zero-length window has a vanishing gramian: this probe must fail.
    const GramianSet empty = assemble_gramian(modes, beta, SteerWindow(spec.sim.tau, 0.0));
    out.push_back({"delta = 0 probe: gramian not positive definite", !empty.positive_definite(),
                   empty.min_eigenvalue(), 0.0, true, "expected failure of positive definiteness"});

    // Single mode against a direct 2x2 computation with a quadrature gramian.
    {
        const ModeSet one({modes.lambda(0)});
        const ModeBlock mb(modes.lambda(0), beta);
        const StateZ1 a{{y0.w[0]}, {y0.v[0]}};
        const StateZ1 b{{z1.w[0]}, {z1.v[0]}};
        const double alpha = spec.alphas.back();
        const auto sweep1 = alpha_sweep(a, b, window, std::span<const double>(&alpha, 1), one, beta);

        const Mat2 q = gramian_mode_quadrature(mb, window, 64).q;
        const Vec2 ya = block_exp(mb, window.delta()) * Vec2{a.w[0], a.v[0]};
        const double l = mb.lambda();
        const Vec2 d{l * (b.w[0] - ya[0]), b.v[0] - ya[1]};
        const Mat2 m = q + alpha * Mat2::identity();
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const Vec2 miss{alpha * (m(1, 1) * d[0] - m(0, 1) * d[1]) / det,
                        alpha * (m(0, 0) * d[1] - m(1, 0) * d[0]) / det};
        out.push_back(check("single mode matches direct 2x2 computation", std::abs(sweep1[0].error - norm2(miss)),
                            1e-8));
    }
    return out;
}

std::vector<CheckResult> run_gramian_check(const ExperimentSpec& spec) {
    spec.validate();
    const ModeSet modes = spec.sim.mode_set();
    std::vector<CheckResult> out;
    for (double delta : spec.deltas) {
        const SteerWindow window(spec.sim.tau, delta);
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const ModeBlock mb(modes.lambda(j), spec.sim.beta);
            const ModeGramian exact = gramian_mode_closedform(mb, window);
            const ModeGramian quad = gramian_mode_quadrature(mb, window, 64);
            char label[96];
            std::snprintf(label, sizeof label, "delta=%g mode %zu", delta, j + 1);
            out.push_back(check(std::string(label) + " closed form vs quadrature", max_abs_entry(exact.q - quad.q),
                                1e-12));
            out.push_back({std::string(label) + " positive definite", exact.positive_definite(),
                           exact.min_eigenvalue(), 0.0, false, "min eigenvalue"});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string format_csv(const std::vector<ResultRow>& rows, std::uint64_t seed, CsvOptions options) {
    std::vector<ResultRow> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& x, const ResultRow& y) {
        if (x.delta != y.delta) return x.delta > y.delta;
        return x.alpha > y.alpha;
    });
    std::string out = "# seed=" + std::to_string(seed) + "\n";
    out += "alpha,delta,error_total,error_nl,error_lin,runtime_s,steps\n";
    char buf[256];
    for (const auto& r : sorted) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%zu\n", r.alpha, r.delta, r.error_total,
                      r.error_nl, r.error_lin, options.record_runtime ? r.runtime_s : 0.0, r.steps);
        out += buf;
    }
    return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path, std::uint64_t seed,
              CsvOptions options) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << format_csv(rows, seed, options);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace beamctl

#include "beamctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace beamctl {

ForcingKind parse_forcing_kind(std::string_view name) {
    if (name == "zero") return ForcingKind::Zero;
    if (name == "linear_growth") return ForcingKind::LinearGrowth;
    if (name == "bounded_trig") return ForcingKind::BoundedTrig;
    throw std::invalid_argument("unknown forcing kind '" + std::string(name) + "'");
}

MemoryMapKind parse_memory_map_kind(std::string_view name) {
    if (name == "zero") return MemoryMapKind::Zero;
    if (name == "sin") return MemoryMapKind::Sine;
    if (name == "rational") return MemoryMapKind::Rational;
    throw std::invalid_argument("unknown memory nonlinearity '" + std::string(name) + "'");
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "zero") return KernelKind::Zero;
    if (name == "exponential") return KernelKind::Exponential;
    throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

std::string_view to_string(ForcingKind k) {
    switch (k) {
        case ForcingKind::Zero: return "zero";
        case ForcingKind::LinearGrowth: return "linear_growth";
        case ForcingKind::BoundedTrig: return "bounded_trig";
    }
    return "?";
}

std::string_view to_string(MemoryMapKind k) {
    switch (k) {
        case MemoryMapKind::Zero: return "zero";
        case MemoryMapKind::Sine: return "sin";
        case MemoryMapKind::Rational: return "rational";
    }
    return "?";
}

std::string_view to_string(KernelKind k) {
    switch (k) {
        case KernelKind::Zero: return "zero";
        case KernelKind::Exponential: return "exponential";
    }
    return "?";
}

void NonlinearityCatalog::validate() const {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw std::invalid_argument("forcing constants a, b must be nonnegative");
    }
    if (!(kappa >= 0.0) || !(gamma >= 0.0)) {
        throw std::invalid_argument("kernel constants kappa, gamma must be nonnegative");
    }
}

double NonlinearityCatalog::forcing(double /*t*/, double y, double v, double u) const {
    switch (f_kind) {
        case ForcingKind::Zero: return 0.0;
        case ForcingKind::LinearGrowth: return a * y * std::cos(u) + b;
        case ForcingKind::BoundedTrig: return a * std::sin(y + v) / std::numbers::sqrt2 + b * std::cos(u);
    }
    throw std::invalid_argument("unknown forcing kind");
}

double NonlinearityCatalog::memory_map(double w) const {
    switch (g_kind) {
        case MemoryMapKind::Zero: return 0.0;
        case MemoryMapKind::Sine: return std::sin(w);
        case MemoryMapKind::Rational: return w / (1.0 + w * w);
    }
    throw std::invalid_argument("unknown memory nonlinearity");
}

double NonlinearityCatalog::kernel(double lag) const {
    switch (kernel_kind) {
        case KernelKind::Zero: return 0.0;
        case KernelKind::Exponential: return kappa * std::exp(-gamma * lag);
    }
    throw std::invalid_argument("unknown kernel kind");
}

void ImpulseSchedule::validate(double tau) const {
    if (times.size() != gains.size()) {
        throw std::invalid_argument("impulse times and gains differ in length");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0) || !(times[k] < tau)) {
            throw std::invalid_argument("impulse times must lie in (0, tau)");
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw std::invalid_argument("impulse times must be strictly increasing");
        }
    }
}

double ImpulseSchedule::jump(std::size_t k, double w, double v, double /*u*/) const {
    return gains.at(k) * std::tanh(w + v);
}

void SimConfig::validate() const {
    if (modes < 1) throw std::invalid_argument("modes must be at least 1");
    if (grid_points < 2 * modes) throw std::invalid_argument("grid_points must be at least 2 * modes");
    if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
    if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (!(delay > 0.0)) throw std::invalid_argument("delay r must be positive");
    if (!(step > 0.0) || step > delay) throw std::invalid_argument("step h must lie in (0, r]");
    (void)aligned_steps(tau, step, "tau");
    (void)aligned_steps(delay, step, "delay r");
    catalog.validate();
    impulses.validate(tau);
    for (double tk : impulses.times) (void)aligned_steps(tk, step, "impulse time");
    if (delta) {
        if (!(*delta > 0.0)) throw std::invalid_argument("delta must be positive");
        // Equality within rounding counts as a violation.
        constexpr double slack = 1e-12;
        if (!(*delta < delay - slack)) throw std::invalid_argument("delta must be < r (pullback condition)");
        const double last = impulses.times.empty() ? 0.0 : impulses.times.back();
        if (!(*delta < tau - last - slack)) throw std::invalid_argument("delta must be < tau - t_p");
        (void)aligned_steps(tau - *delta, step, "tau - delta");
    }
    if (alpha && (!(*alpha > 0.0) || *alpha > 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
}

HistorySegment SimConfig::sample_history() const {
    const std::size_t nr = aligned_steps(delay, step, "delay r");
    std::vector<StateZ1> samples;
    samples.reserve(nr + 1);
    for (std::size_t k = 0; k <= nr; ++k) {
        const double s = -delay + static_cast<double>(k) * step;
        StateZ1 z = history ? history(s) : StateZ1::zero(static_cast<std::size_t>(modes));
        if (z.size() != static_cast<std::size_t>(modes) || z.v.size() != static_cast<std::size_t>(modes)) {
            throw std::invalid_argument("history generator returned the wrong number of modes");
        }
        samples.push_back(std::move(z));
    }
    return HistorySegment(delay, step, std::move(samples));
}

std::size_t Trajectory::index_of(double t) const {
    const double pos = (t - start) / step;
    const double idx = std::round(pos);
    if (std::abs(pos - idx) > 1e-6 || idx < 0.0 || idx >= static_cast<double>(states.size())) {
        throw std::invalid_argument("time is not a stored grid node");
    }
    return static_cast<std::size_t>(idx);
}

const StateZ1& Trajectory::at(double t, Side side) const {
    const std::size_t idx = index_of(t);
    if (side == Side::Left) {
        if (auto it = left_limits.find(idx); it != left_limits.end()) return it->second;
    }
    return states[idx];
}

StateZ1 evaluate_nonlinearity(double t, const StateZ1& z_delayed, const FieldCoeffs& u_value,
                              const NonlinearityCatalog& catalog, const SineBasis& basis) {
    const std::size_t n = basis.modes().size();
    StateZ1 out = StateZ1::zero(n);
    if (!catalog.has_forcing()) return out;
    if (z_delayed.size() != n || u_value.size() != n) {
        throw std::invalid_argument("evaluate_nonlinearity: size mismatch");
    }
    const auto y = basis.synthesize(z_delayed.w);
    const auto v = basis.synthesize(z_delayed.v);
    const auto u = basis.synthesize(u_value);
    std::vector<double> f(y.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = catalog.forcing(t, y[i], v[i], u[i]);
    out.v = basis.project(f);
    return out;
}

namespace {

FieldCoeffs projected_memory_map(const FieldCoeffs& w, const NonlinearityCatalog& catalog, const SineBasis& basis) {
    auto samples = basis.synthesize(w);
    for (double& x : samples) x = catalog.memory_map(x);
    return basis.project(samples);
}

}  // namespace

StateZ1 memory_term(double t, const Trajectory& traj, const NonlinearityCatalog& catalog, const SineBasis& basis) {
    const std::size_t n_modes = basis.modes().size();
    StateZ1 out = StateZ1::zero(n_modes);
    if (!catalog.has_memory() || t <= 0.0) return out;
    const std::size_t n = aligned_steps(t, traj.step, "memory time");
    // Node s_i = i h reads w(s_i - r), stored at index i.
    if (n >= traj.states.size()) {
        throw std::logic_error("memory_term: trajectory prefix does not reach t - r");
    }
    for (std::size_t i = 0; i <= n; ++i) {
        const double weight = (i == 0 || i == n) ? 0.5 * traj.step : traj.step;
        const double s = static_cast<double>(i) * traj.step;
        const FieldCoeffs g = projected_memory_map(traj.states[i].w, catalog, basis);
        const double m = weight * catalog.kernel(t - s);
        for (std::size_t j = 0; j < n_modes; ++j) out.v[j] += m * g[j];
    }
    return out;
}

StateZ1 apply_impulse(const StateZ1& z, std::size_t k, const FieldCoeffs& u_value, const ImpulseSchedule& schedule,
                      const SineBasis& basis) {
    if (k >= schedule.size()) {
        throw std::invalid_argument("impulse index out of range");
    }
    const auto w = basis.synthesize(z.w);
    const auto v = basis.synthesize(z.v);
    const auto u = basis.synthesize(u_value);
    std::vector<double> jump(w.size());
    for (std::size_t i = 0; i < jump.size(); ++i) jump[i] = schedule.jump(k, w[i], v[i], u[i]);
    const FieldCoeffs dv = basis.project(jump);
    StateZ1 out = z;
    for (std::size_t j = 0; j < out.v.size(); ++j) out.v[j] += dv[j];
    return out;
}

namespace {

// phi_1(x) = (e^x - 1) / x and phi_2(x) = (e^x - 1 - x) / x^2.
double phi1(double x) { return std::abs(x) < 1e-8 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

double phi2(double x) {
    if (std::abs(x) < 1e-4) return 0.5 + x / 6.0 + x * x / 24.0;
    return (std::expm1(x) - x) / (x * x);
}

// One-step propagator for a mode with velocity-slot forcing interpolated
// linearly between its values at the step ends.
struct StepPropagator {
    Mat2 e;       // exp(K h)
    Vec2 from_0;  // weight of f(t_n)
    Vec2 from_1;  // weight of f(t_{n+1})

    StepPropagator(const ModeBlock& mb, double h) {
        const SpectralSplit sp = spectral_split(mb);
        e = block_exp(mb, h);
        const Vec2 b{0.0, 1.0};
        const Vec2 pb_slow = sp.p_slow * b;
        const Vec2 pb_fast = sp.p_fast * b;
        const double xs = sp.rho_slow * h;
        const double xf = sp.rho_fast * h;
        from_0 = (h * (phi1(xs) - phi2(xs))) * pb_slow + (h * (phi1(xf) - phi2(xf))) * pb_fast;
        from_1 = (h * phi2(xs)) * pb_slow + (h * phi2(xf)) * pb_fast;
    }
};

}  // namespace

Trajectory simulate(const SimConfig& config, const ControlSignal& control) {
    config.validate();
    const ModeSet modes = config.mode_set();
    const SineBasis basis = config.basis();
    const std::size_t n_modes = modes.size();
    if (control.modes() != n_modes) {
        throw std::invalid_argument("control has the wrong number of modes");
    }
    if (const auto win = control.window()) {
        if (std::abs(win->tau() - config.tau) > 1e-12) {
            throw std::invalid_argument("steering window must end at tau");
        }
        (void)aligned_steps(win->start(), config.step, "tau - delta");
    }

    const double h = config.step;
    const std::size_t nr = config.delay_steps();
    const std::size_t nt = config.steps();

    std::vector<StepPropagator> props;
    props.reserve(n_modes);
    for (double lambda : modes.lambdas()) props.emplace_back(ModeBlock(lambda, config.beta), h);

    std::map<std::size_t, std::size_t> impulse_at;  // step index -> impulse number
    for (std::size_t k = 0; k < config.impulses.size(); ++k) {
        impulse_at[aligned_steps(config.impulses.times[k], h, "impulse time")] = k;
    }

    Trajectory traj;
    traj.start = -config.delay;
    traj.step = h;
    traj.delay_steps = nr;
    traj.states = config.sample_history().samples();
    traj.states.reserve(nr + nt + 1);
    traj.controls.reserve(nt + 1);
    traj.memory_terms.reserve(nt + 1);

    const auto time_of = [h](std::size_t n) { return static_cast<double>(n) * h; };
    // State at t_n - r lives at storage index n.
    const auto delayed = [&traj](std::size_t n, Side side) -> const StateZ1& {
        if (side == Side::Left) {
            if (auto it = traj.left_limits.find(n); it != traj.left_limits.end()) return it->second;
        }
        return traj.states[n];
    };

    const bool memory = config.catalog.has_memory();
    std::vector<FieldCoeffs> g_cache;  // P g(w(t_i - r)), i = 0..n
    std::vector<double> kernel_cache;  // M(i h)
    if (memory) {
        g_cache.reserve(nt + 1);
        kernel_cache.reserve(nt + 1);
    }
    const auto memory_at = [&](std::size_t n) {
        FieldCoeffs m(n_modes, 0.0);
        if (!memory) return m;
        while (g_cache.size() <= n) {
            const std::size_t i = g_cache.size();
            g_cache.push_back(projected_memory_map(traj.states[i].w, config.catalog, basis));
            kernel_cache.push_back(config.catalog.kernel(time_of(i)));
        }
        if (n == 0) return m;
        for (std::size_t i = 0; i <= n; ++i) {
            const double weight = (i == 0 || i == n) ? 0.5 * h : h;
            const double c = weight * kernel_cache[n - i];
            for (std::size_t j = 0; j < n_modes; ++j) m[j] += c * g_cache[i][j];
        }
        return m;
    };

    const auto forcing_at = [&](std::size_t n, Side side, const FieldCoeffs& mem) {
        const double t = time_of(n);
        FieldCoeffs f = evaluate_nonlinearity(t, delayed(n, side), control.value(t, side), config.catalog, basis).v;
        for (std::size_t j = 0; j < n_modes; ++j) f[j] += mem[j];
        return f;
    };

    FieldCoeffs mem_now = memory_at(0);
    traj.controls.push_back(control.value(0.0, Side::Right));
    traj.memory_terms.push_back(mem_now);

    for (std::size_t n = 0; n < nt; ++n) {
        const double t0 = time_of(n);
        const double t1 = time_of(n + 1);
        const FieldCoeffs f0 = forcing_at(n, Side::Right, mem_now);
        const FieldCoeffs mem_next = memory_at(n + 1);
        const FieldCoeffs f1 = forcing_at(n + 1, Side::Left, mem_next);

        const StateZ1& z = traj.states.back();
        StateZ1 next = StateZ1::zero(n_modes);
        for (std::size_t j = 0; j < n_modes; ++j) {
            const StepPropagator& p = props[j];
            const Vec2 r = p.e * Vec2{z.w[j], z.v[j]} + f0[j] * p.from_0 + f1[j] * p.from_1;
            next.w[j] = r[0];
            next.v[j] = r[1];
        }
        const bool idle = !control.has_base() && !control.steering_active(t0, Side::Right);
        if (!idle) next += control_response(control, modes, config.beta, t0, t1);

        const std::size_t idx = nr + n + 1;
        if (auto it = impulse_at.find(n + 1); it != impulse_at.end()) {
            traj.left_limits.emplace(idx, next);
            next = apply_impulse(next, it->second, control.value(t1, Side::Left), config.impulses, basis);
        }
        const double norm = z1_norm(next, modes);
        if (!std::isfinite(norm) || norm > kBlowUpNorm) {
            throw BlowUpError("state norm exceeded 1e12 at t = " + std::to_string(t1));
        }
        traj.states.push_back(std::move(next));
        traj.controls.push_back(control.value(t1, Side::Right));
        traj.memory_terms.push_back(mem_next);
        mem_now = mem_next;
    }
    return traj;
}

FBoundReport verify_f_bound(const NonlinearityCatalog& catalog, const SineBasis& basis, std::size_t samples,
                            std::uint64_t seed) {
    catalog.validate();
    const ModeSet& modes = basis.modes();
    const std::size_t n = modes.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amplitude(0.0, 20.0);
    std::uniform_real_distribution<double> time(0.0, 1.0);
    std::normal_distribution<double> control(0.0, 3.0);

    FBoundReport rep{};
    rep.declared_a = catalog.a * std::max(1.0, 1.0 / modes.lambda(0));
    rep.declared_b = catalog.b * std::sqrt(basis.domain().length());
    rep.max_excess = -std::numeric_limits<double>::infinity();
    rep.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        // Every tenth sample probes the state-independent part.
        const StateZ1 phi = (s % 10 == 0) ? StateZ1::zero(n) : random_state(modes, rng, amplitude(rng));
        FieldCoeffs u(n);
        for (double& c : u) c = control(rng);
        const double fnorm = z1_norm(evaluate_nonlinearity(time(rng), phi, u, catalog, basis), modes);
        const double pnorm = z1_norm(phi, modes);
        rep.max_excess = std::max(rep.max_excess, fnorm - (rep.declared_a * pnorm + rep.declared_b));
        if (pnorm == 0.0) {
            rep.empirical_b = std::max(rep.empirical_b, fnorm);
        } else {
            rep.empirical_a = std::max(rep.empirical_a, std::max(0.0, fnorm - rep.declared_b) / pnorm);
        }
    }
    return rep;
}

}  // namespace beamctl

#include "beamctl/steering.hpp"

#include "beamctl/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beamctl {

SteeringComponent::SteeringComponent(ModeSet modes, double beta, SteerWindow window, std::vector<Vec2> xi)
    : modes_(std::move(modes)), window_(window), xi_(std::move(xi)) {
    if (xi_.size() != modes_.size()) {
        throw std::invalid_argument("steering coefficients do not match mode set");
    }
    blocks_.reserve(modes_.size());
    for (double lambda : modes_.lambdas()) blocks_.emplace_back(lambda, beta);
}

FieldCoeffs SteeringComponent::value(double t) const {
    const double lag = std::max(0.0, window_.tau() - t);
    FieldCoeffs u(xi_.size());
    for (std::size_t j = 0; j < xi_.size(); ++j) {
        u[j] = (block_exp(blocks_[j], lag).transposed() * xi_[j])[1];
    }
    return u;
}

ControlSignal::ControlSignal(std::size_t modes, ControlFn base) : modes_(modes), base_(std::move(base)) {
    if (modes == 0) {
        throw std::invalid_argument("control must have at least one mode");
    }
}

ControlSignal ControlSignal::with_steering(SteeringComponent steering, ControlFn aux) const {
    if (steering.xi().size() != modes_) {
        throw std::invalid_argument("steering component has the wrong number of modes");
    }
    ControlSignal out(modes_, base_);
    out.steering_.emplace(std::move(steering));
    out.aux_ = std::move(aux);

    const SteerWindow& win = out.steering_->window();
    out.sample_times_.resize(kCacheSamples);
    out.samples_.reserve(kCacheSamples);
    for (int k = 0; k < kCacheSamples; ++k) {
        const double t = win.start() + win.delta() * k / (kCacheSamples - 1);
        out.sample_times_[static_cast<std::size_t>(k)] = t;
        out.samples_.push_back(out.steering_value(t));
    }
    return out;
}

std::optional<SteerWindow> ControlSignal::window() const {
    if (!steering_) return std::nullopt;
    return steering_->window();
}

bool ControlSignal::steering_active(double t, Side side) const {
    if (!steering_) return false;
    const double start = steering_->window().start();
    return side == Side::Right ? t >= start : t > start;
}

FieldCoeffs ControlSignal::base_value(double t) const {
    if (!base_) return FieldCoeffs(modes_, 0.0);
    FieldCoeffs u = base_(t);
    if (u.size() != modes_) {
        throw std::invalid_argument("base control returned " + std::to_string(u.size()) + " modes");
    }
    return u;
}

FieldCoeffs ControlSignal::steering_value(double t) const {
    FieldCoeffs u = steering_->value(t);
    if (aux_) {
        const FieldCoeffs a = aux_(t);
        if (a.size() != modes_) {
            throw std::invalid_argument("auxiliary control has the wrong number of modes");
        }
        for (std::size_t j = 0; j < modes_; ++j) u[j] += a[j];
    }
    return u;
}

FieldCoeffs ControlSignal::value(double t, Side side) const {
    return steering_active(t, side) ? steering_value(t) : base_value(t);
}

namespace {

double fastest_rate(const ModeSet& modes, double beta) {
    return ModeBlock(modes.lambda(modes.size() - 1), beta).rho_fast();
}

// Accumulates int_{a}^{b} exp(K_j (t1 - s)) B u(s) ds into `acc` on a piece
// where u is smooth.
void accumulate_piece(const ControlSignal& u, const std::vector<ModeBlock>& blocks, double a, double b,
                      double t1, Side side_inside, StateZ1& acc) {
    if (!(b > a)) return;
    const GaussLegendre& rule = gauss_legendre_64();
    // Integrand rates reach 2 rho_fast when u is itself a steering exponential.
    const int panels = stiff_panels(2.0 * blocks.back().rho_fast(), b - a);
    const double width = (b - a) / panels;
    const double half = 0.5 * width;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        for (int i = 0; i < rule.points(); ++i) {
            const double s = mid + half * rule.nodes()[static_cast<std::size_t>(i)];
            const double wgt = half * rule.weights()[static_cast<std::size_t>(i)];
            const FieldCoeffs us = u.value(s, side_inside);
            for (std::size_t j = 0; j < blocks.size(); ++j) {
                if (us[j] == 0.0) continue;
                const Mat2 e = block_exp(blocks[j], t1 - s);
                // exp(K (t1 - s)) (0, u)^T is the second column scaled by u.
                acc.w[j] += wgt * e(0, 1) * us[j];
                acc.v[j] += wgt * e(1, 1) * us[j];
            }
        }
    }
}

}  // namespace

StateZ1 control_response(const ControlSignal& u, const ModeSet& modes, double beta, double t0, double t1) {
    if (u.modes() != modes.size()) {
        throw std::invalid_argument("control and mode set disagree on the number of modes");
    }
    if (t1 < t0) {
        throw std::invalid_argument("control_response: t1 < t0");
    }
    std::vector<ModeBlock> blocks;
    blocks.reserve(modes.size());
    for (double lambda : modes.lambdas()) blocks.emplace_back(lambda, beta);

    StateZ1 acc = StateZ1::zero(modes.size());
    const auto win = u.window();
    if (win && t0 < win->start() && win->start() < t1) {
        accumulate_piece(u, blocks, t0, win->start(), t1, Side::Left, acc);
        accumulate_piece(u, blocks, win->start(), t1, t1, Side::Right, acc);
    } else {
        // Interior nodes never touch the endpoints, so either side is fine.
        accumulate_piece(u, blocks, t0, t1, t1, Side::Right, acc);
    }
    return acc;
}

double control_energy(const ControlSignal& u, double beta, const ModeSet& modes, double t0, double t1) {
    if (!(t1 > t0)) return 0.0;
    const GaussLegendre& rule = gauss_legendre_64();
    const int panels = stiff_panels(2.0 * fastest_rate(modes, beta), t1 - t0);
    return rule.integrate(
        [&](double s) {
            double sum = 0.0;
            for (double c : u.value(s)) sum += c * c;
            return sum;
        },
        t0, t1, panels);
}

void SteeringProblem::validate(const ModeSet& modes) const {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("alpha must lie in (0, 1]");
    }
    if (y0.size() != modes.size() || z1.size() != modes.size() || y0.v.size() != modes.size() ||
        z1.v.size() != modes.size()) {
        throw std::invalid_argument("steering states do not match mode set");
    }
}

SteeringPlan plan_steering(const SteeringProblem& p, const ModeSet& modes, double beta, ControlFn base,
                           ControlFn aux) {
    p.validate(modes);
    GramianSet qset = assemble_gramian(modes, beta, p.window);
    if (!qset.positive_definite()) {
        throw std::invalid_argument("controllability gramian is not positive definite on the window");
    }

    StateZ1 d = p.z1 - apply_semigroup(p.y0, p.window.delta(), modes, beta);
    ControlSignal control(modes.size(), std::move(base));
    if (aux) {
        const ControlSignal v_only =
            ControlSignal(modes.size())
                .with_steering(SteeringComponent(modes, beta, p.window, std::vector<Vec2>(modes.size())), aux);
        d -= control_response(v_only, modes, beta, p.window.start(), p.window.tau());
    }

    StateZ1 eta = solve_regularized(qset, p.alpha, d);
    // G* eta in Z^1: B* T*(tau - t) eta = (exp(K^T (tau - t)) W eta)_2, W = diag(lambda^2, 1).
    std::vector<Vec2> xi(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double l = modes.lambda(j);
        xi[j] = Vec2{l * l * eta.w[j], eta.v[j]};
    }
    control = control.with_steering(SteeringComponent(modes, beta, p.window, std::move(xi)), std::move(aux));
    return {std::move(qset), std::move(d), std::move(eta), std::move(control)};
}

ControlSignal synthesize_control(const SteeringProblem& p, const ModeSet& modes, double beta) {
    return plan_steering(p, modes, beta).control;
}

StateZ1 steer_linear(const StateZ1& y0, const ControlSignal& u, const ModeSet& modes, double beta) {
    const auto win = u.window();
    if (!win) {
        throw std::invalid_argument("steer_linear: control has no steering window");
    }
    return apply_semigroup(y0, win->delta(), modes, beta) +
           control_response(u, modes, beta, win->start(), win->tau());
}

namespace {

void require_decreasing_alphas(std::span<const double> alphas) {
    if (alphas.empty()) {
        throw std::invalid_argument("alpha list must not be empty");
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0) || alphas[i] > 1.0) {
            throw std::invalid_argument("alphas must lie in (0, 1]");
        }
        if (i > 0 && !(alphas[i] < alphas[i - 1])) {
            throw std::invalid_argument("alphas must be strictly decreasing");
        }
    }
}

}  // namespace

std::vector<SweepPoint> alpha_sweep(const StateZ1& y0, const StateZ1& z1, const SteerWindow& window,
                                    std::span<const double> alphas, const ModeSet& modes, double beta) {
    require_decreasing_alphas(alphas);
    std::vector<SweepPoint> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        const SteeringPlan plan = plan_steering({y0, z1, window, alpha}, modes, beta);
        const StateZ1 y = steer_linear(y0, plan.control, modes, beta);
        out.push_back({alpha, z1_norm(y - z1, modes),
                       z1_norm(regularized_miss(plan.gramian, alpha, plan.mismatch), modes)});
    }
    return out;
}

std::vector<RightInversePoint> approximate_right_inverse_check(const GramianSet& qset, const StateZ1& z,
                                                               std::span<const double> alphas) {
    require_decreasing_alphas(alphas);
    const ModeSet& modes = qset.modes();
    const StateZ1 zero = StateZ1::zero(modes.size());
    const double znorm = z1_norm(z, modes);
    std::vector<RightInversePoint> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        const ControlSignal gamma_z = synthesize_control({zero, z, qset.window(), alpha}, modes, qset.beta());
        const StateZ1 g_gamma_z = steer_linear(zero, gamma_z, modes, qset.beta());
        out.push_back({alpha, z1_norm(g_gamma_z - z, modes), z1_norm(regularized_miss(qset, alpha, z), modes),
                       alpha * znorm / (alpha + qset.min_eigenvalue())});
    }
    return out;
}

}  // namespace beamctl

#pragma once

// Regularized minimum-energy steering on the window [tau - delta, tau].
//
// For a mismatch d = z1 - T(delta) y0 the control
//
//     u_alpha(t) = B* T*(tau - t) (alpha I + Q)^{-1} d
//
// drives the linear system from y0 at tau - delta to
// y(tau) = z1 - alpha (alpha I + Q)^{-1} d.

#include "beamctl/gramian.hpp"
#include "beamctl/semigroup.hpp"
#include "beamctl/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace beamctl {

/// Which one-sided limit to take when a control or state jumps at a node.
enum class Side { Left, Right };

/// Coefficient-valued control u(t) in U = L^2(0, L).
using ControlFn = std::function<FieldCoeffs(double t)>;

/// u_j(t) = (exp(K_j^T (tau - t)) xi_j)_2, the range of G* restricted to one window.
class SteeringComponent {
public:
    SteeringComponent(ModeSet modes, double beta, SteerWindow window, std::vector<Vec2> xi);

    [[nodiscard]] const SteerWindow& window() const noexcept { return window_; }
    [[nodiscard]] const std::vector<Vec2>& xi() const noexcept { return xi_; }
    [[nodiscard]] FieldCoeffs value(double t) const;

private:
    ModeSet modes_;
    std::vector<ModeBlock> blocks_;
    SteerWindow window_;
    std::vector<Vec2> xi_;
};

/// Piecewise control: `base` on [0, tau - delta], steering (+ optional
/// auxiliary term) on [tau - delta, tau]. Without a steering part the base
/// control applies everywhere.
class ControlSignal {
public:
    static constexpr int kCacheSamples = 256;

    /// An empty `base` means u = 0.
    explicit ControlSignal(std::size_t modes, ControlFn base = {});

    [[nodiscard]] ControlSignal with_steering(SteeringComponent steering, ControlFn aux = {}) const;

    [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
    [[nodiscard]] bool has_steering() const noexcept { return steering_.has_value(); }
    [[nodiscard]] bool has_base() const noexcept { return static_cast<bool>(base_); }
    [[nodiscard]] std::optional<SteerWindow> window() const;

    /// True when the steering branch is active at t from the given side.
    [[nodiscard]] bool steering_active(double t, Side side) const;
    [[nodiscard]] FieldCoeffs value(double t, Side side = Side::Right) const;

    /// Uniform samples over the steering window (both endpoints); empty when no window.
    [[nodiscard]] const std::vector<double>& sample_times() const noexcept { return sample_times_; }
    [[nodiscard]] const std::vector<FieldCoeffs>& samples() const noexcept { return samples_; }

private:
    [[nodiscard]] FieldCoeffs base_value(double t) const;
    [[nodiscard]] FieldCoeffs steering_value(double t) const;

    std::size_t modes_;
    ControlFn base_;
    std::optional<SteeringComponent> steering_;
    ControlFn aux_;
    std::vector<double> sample_times_;
    std::vector<FieldCoeffs> samples_;
};

/// int_{t0}^{t1} exp(K_j (t1 - s)) B u(s) ds for every mode, by composite
/// 64-point Gauss-Legendre. Intervals straddling the window start are split.
[[nodiscard]] StateZ1 control_response(const ControlSignal& u, const ModeSet& modes, double beta, double t0,
                                       double t1);

/// int_{t0}^{t1} sum_j u_j(s)^2 ds.
[[nodiscard]] double control_energy(const ControlSignal& u, double beta, const ModeSet& modes, double t0,
                                    double t1);

struct SteeringProblem {
    StateZ1 y0;  // state at tau - delta
    StateZ1 z1;  // target
    SteerWindow window;
    double alpha;

    void validate(const ModeSet& modes) const;
};

/// Everything computed while synthesizing u_alpha.
struct SteeringPlan {
    GramianSet gramian;
    StateZ1 mismatch;  // z1 - T(delta) y0 - G v
    StateZ1 eta;       // (alpha I + Q)^{-1} mismatch
    ControlSignal control;
};

/// Builds u_alpha. With a non-empty `aux` v the control is
/// G*(alpha I + Q)^{-1}(d - G v) + v, whose terminal miss is
/// alpha (alpha I + Q)^{-1}(d - G v).
[[nodiscard]] SteeringPlan plan_steering(const SteeringProblem& p, const ModeSet& modes, double beta,
                                         ControlFn base = {}, ControlFn aux = {});

[[nodiscard]] ControlSignal synthesize_control(const SteeringProblem& p, const ModeSet& modes, double beta);

/// y(tau) = T(delta) y0 + int_{tau-delta}^{tau} T(tau - s) B u(s) ds.
[[nodiscard]] StateZ1 steer_linear(const StateZ1& y0, const ControlSignal& u, const ModeSet& modes, double beta);

struct SweepPoint {
    double alpha;
    double error;      // ||y(tau) - z1||, measured through steer_linear
    double predicted;  // ||alpha (alpha I + Q)^{-1} d||
};

[[nodiscard]] std::vector<SweepPoint> alpha_sweep(const StateZ1& y0, const StateZ1& z1, const SteerWindow& window,
                                                  std::span<const double> alphas, const ModeSet& modes,
                                                  double beta);

struct RightInversePoint {
    double alpha;
    double error;      // ||G Gamma_alpha z - z||, with G applied by quadrature
    double predicted;  // ||alpha (alpha I + Q)^{-1} z||
    double bound;      // alpha ||z|| / (alpha + q_min)
};

[[nodiscard]] std::vector<RightInversePoint> approximate_right_inverse_check(const GramianSet& qset,
                                                                             const StateZ1& z,
                                                                             std::span<const double> alphas);

}  // namespace beamctl

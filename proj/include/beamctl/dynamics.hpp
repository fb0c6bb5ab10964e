#pragma once

// Mild-solution simulator for the impulsive semilinear beam with delay and
// memory,
//
//   z' = A z + B u + int_0^t M(t - s) (0, g(w(s - r)))^T ds + (0, f(t, w(t-r), v(t-r), u))^T,
//   v(t_k+) = v(t_k-) + I_k(w(t_k), v(t_k)),
//
// on the uniform grid t_n = n h with r, tau, t_k all multiples of h so that
// delayed reads land on stored nodes.

#include "beamctl/semigroup.hpp"
#include "beamctl/spectral.hpp"
#include "beamctl/steering.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace beamctl {

enum class ForcingKind { Zero, LinearGrowth, BoundedTrig };
enum class MemoryMapKind { Zero, Sine, Rational };
enum class KernelKind { Zero, Exponential };

[[nodiscard]] ForcingKind parse_forcing_kind(std::string_view name);
[[nodiscard]] MemoryMapKind parse_memory_map_kind(std::string_view name);
[[nodiscard]] KernelKind parse_kernel_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(ForcingKind k);
[[nodiscard]] std::string_view to_string(MemoryMapKind k);
[[nodiscard]] std::string_view to_string(KernelKind k);

/// Pointwise nonlinearities. Every forcing member obeys
/// |f(t, y, v, u)| <= a sqrt(y^2 + v^2) + b.
///
///   linear_growth: f = a y cos(u) + b
///   bounded_trig:  f = (a / sqrt 2) sin(y + v) + b cos(u)
///   g: sin(w) or w / (1 + w^2);  M(lag) = kappa exp(-gamma lag)
struct NonlinearityCatalog {
    ForcingKind f_kind = ForcingKind::Zero;
    double a = 0.0;
    double b = 0.0;
    MemoryMapKind g_kind = MemoryMapKind::Zero;
    KernelKind kernel_kind = KernelKind::Zero;
    double kappa = 0.0;
    double gamma = 0.0;

    void validate() const;

    [[nodiscard]] double forcing(double t, double y, double v, double u) const;
    [[nodiscard]] double memory_map(double w) const;
    [[nodiscard]] double kernel(double lag) const;

    [[nodiscard]] bool has_forcing() const noexcept { return f_kind != ForcingKind::Zero; }
    [[nodiscard]] bool has_memory() const noexcept {
        return g_kind != MemoryMapKind::Zero && kernel_kind != KernelKind::Zero && kappa != 0.0;
    }
};

/// I_k(w, v) = c_k tanh(w + v), applied pointwise to the velocity.
struct ImpulseSchedule {
    std::vector<double> times;
    std::vector<double> gains;

    void validate(double tau) const;
    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] double jump(std::size_t k, double w, double v, double u) const;
};

using HistoryFn = std::function<StateZ1(double s)>;

struct SimConfig {
    int modes = 8;
    double length = 1.0;
    int grid_points = 64;
    double beta = 2.0;
    double tau = 1.0;
    double delay = 0.3;
    double step = 1.0 / 600.0;
    NonlinearityCatalog catalog;
    ImpulseSchedule impulses;
    std::optional<double> delta;  // steering window length, when steering is planned
    std::optional<double> alpha;
    HistoryFn history;            // Phi(s), s in [-r, 0]; empty means zero history

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;

    [[nodiscard]] ModeSet mode_set() const { return laplacian_eigenvalues(length, modes); }
    [[nodiscard]] SpatialDomain domain() const { return SpatialDomain(length, grid_points); }
    [[nodiscard]] SineBasis basis() const { return SineBasis(domain(), mode_set()); }
    [[nodiscard]] std::size_t steps() const { return aligned_steps(tau, step, "tau"); }
    [[nodiscard]] std::size_t delay_steps() const { return aligned_steps(delay, step, "delay"); }
    [[nodiscard]] HistorySegment sample_history() const;
};

class BlowUpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kBlowUpNorm = 1e12;

/// States on the grid -r, -r + h, ..., tau. `states` holds right limits; at
/// impulse nodes the pre-jump state is kept in `left_limits`.
struct Trajectory {
    double start = 0.0;  // -r
    double step = 0.0;
    std::size_t delay_steps = 0;
    std::vector<StateZ1> states;
    std::map<std::size_t, StateZ1> left_limits;
    std::vector<FieldCoeffs> controls;      // u(t_n+) for n >= 0
    std::vector<FieldCoeffs> memory_terms;  // velocity coefficients of the memory integral at t_n, n >= 0

    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    [[nodiscard]] double time(std::size_t idx) const { return start + static_cast<double>(idx) * step; }
    /// Storage index of the node at time t (must be on the grid).
    [[nodiscard]] std::size_t index_of(double t) const;
    [[nodiscard]] const StateZ1& at(double t, Side side = Side::Right) const;
    [[nodiscard]] const StateZ1& final_state() const { return states.back(); }
};

/// F(t, Phi, u) = (0, P f(t, w(t-r), v(t-r), u)); `z_delayed` is the state at t - r.
[[nodiscard]] StateZ1 evaluate_nonlinearity(double t, const StateZ1& z_delayed, const FieldCoeffs& u_value,
                                            const NonlinearityCatalog& catalog, const SineBasis& basis);

/// Trapezoid over the stored grid of int_0^t M(t - s) g(w(s - r)) ds, placed
/// in the velocity slot. `traj` must hold every node up to t.
[[nodiscard]] StateZ1 memory_term(double t, const Trajectory& traj, const NonlinearityCatalog& catalog,
                                  const SineBasis& basis);

/// z(t_k+) = z(t_k-) + (0, P I_k(w, v, u)).
[[nodiscard]] StateZ1 apply_impulse(const StateZ1& z, std::size_t k, const FieldCoeffs& u_value,
                                    const ImpulseSchedule& schedule, const SineBasis& basis);

/// Exponential integrator: per mode, each step propagates exactly through
/// exp(K h), integrates the control exactly by quadrature, and integrates the
/// delayed/memory forcing as a linear interpolant in time (second order).
[[nodiscard]] Trajectory simulate(const SimConfig& config, const ControlSignal& control);

struct FBoundReport {
    double declared_a;    // a * max(1, 1 / lambda_1)
    double declared_b;    // b * sqrt(L)
    double empirical_a;   // max (||F|| - declared_b)_+ / ||Phi(-r)||
    double empirical_b;   // max ||F|| at Phi(-r) = 0
    double max_excess;    // max ||F|| - (declared_a ||Phi|| + declared_b)
    std::size_t samples;
    [[nodiscard]] bool holds(double slack) const { return max_excess <= slack; }
};

/// Checks ||F(t, Phi, u)||_{Z^1} <= a~ ||Phi(-r)||_{Z^1} + b~ on seeded random states.
[[nodiscard]] FBoundReport verify_f_bound(const NonlinearityCatalog& catalog, const SineBasis& basis,
                                          std::size_t samples, std::uint64_t seed);

}  // namespace beamctl

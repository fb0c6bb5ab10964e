#pragma once

// Controllability Gramian of the steering window [tau - delta, tau].
//
// With B u = (0, u) and the adjoints taken in Z^1, the Gramian
// Q = G G* = int_0^delta T(s) B B* T*(s) ds is block diagonal. Each block is
// stored in energy coordinates (lambda w, v), where it is a symmetric 2x2
// matrix:
//
//     Q_j = int_0^delta (D_j e^{K_j s} b)(D_j e^{K_j s} b)^T ds,  b = (0, 1).
//
// All public functions that take or return a StateZ1 use physical (w, v)
// coordinates; the energy scaling is applied internally.

#include "beamctl/mat2.hpp"
#include "beamctl/semigroup.hpp"
#include "beamctl/spectral.hpp"

#include <vector>

namespace beamctl {

class SteerWindow {
public:
    /// Requires tau > 0 and 0 <= delta <= tau. delta == 0 is the degenerate
    /// empty window whose Gramian vanishes.
    SteerWindow(double tau, double delta);

    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double start() const noexcept { return tau_ - delta_; }

private:
    double tau_;
    double delta_;
};

struct ModeGramian {
    Mat2 q;

    [[nodiscard]] double min_eigenvalue() const { return symmetric_eigenvalues(q).first; }
    [[nodiscard]] double max_eigenvalue() const { return symmetric_eigenvalues(q).second; }
    [[nodiscard]] bool positive_definite() const { return min_eigenvalue() > 0.0; }
};

/// Oracle path: composite Gauss-Legendre with `nodes` points per panel and
/// enough panels to resolve the fastest exponential in the integrand.
[[nodiscard]] ModeGramian gramian_mode_quadrature(const ModeBlock& mb, const SteerWindow& win, int nodes);

/// Production path: exact antiderivative of the exponential expansion.
[[nodiscard]] ModeGramian gramian_mode_closedform(const ModeBlock& mb, const SteerWindow& win);

class GramianSet {
public:
    GramianSet(ModeSet modes, double beta, SteerWindow window, std::vector<ModeGramian> blocks);

    [[nodiscard]] const ModeSet& modes() const noexcept { return modes_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] const SteerWindow& window() const noexcept { return window_; }
    [[nodiscard]] const std::vector<ModeGramian>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] const ModeGramian& block(std::size_t j) const { return blocks_.at(j); }

    [[nodiscard]] double min_eigenvalue() const noexcept { return min_eigenvalue_; }
    [[nodiscard]] bool positive_definite() const noexcept { return min_eigenvalue_ > 0.0; }

private:
    ModeSet modes_;
    double beta_;
    SteerWindow window_;
    std::vector<ModeGramian> blocks_;
    double min_eigenvalue_;
};

[[nodiscard]] GramianSet assemble_gramian(const ModeSet& modes, double beta, const SteerWindow& win);

/// eta = (alpha I + Q)^{-1} d, blockwise.
[[nodiscard]] StateZ1 solve_regularized(const GramianSet& qset, double alpha, const StateZ1& d);

/// Q z, blockwise.
[[nodiscard]] StateZ1 apply_gramian(const GramianSet& qset, const StateZ1& z);

/// alpha (alpha I + Q)^{-1} d: the terminal miss of the regularized steering.
[[nodiscard]] StateZ1 regularized_miss(const GramianSet& qset, double alpha, const StateZ1& d);

}  // namespace beamctl

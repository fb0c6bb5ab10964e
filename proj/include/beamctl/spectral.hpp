#pragma once

// Spatial discretization on the interval (0, L) with Dirichlet conditions.
//
// The Laplacian eigenfunctions phi_j(x) = sqrt(2/L) sin(j pi x / L) form the
// basis; fields are stored as coefficient vectors against them. Grid values
// live on the interior collocation nodes x_i = i L / Mx, i = 1..Mx-1.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace beamctl {

class SpatialDomain {
public:
    SpatialDomain(double length, int grid_points);

    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] int grid_points() const noexcept { return grid_points_; }
    [[nodiscard]] double spacing() const noexcept { return length_ / grid_points_; }
    [[nodiscard]] std::size_t interior_count() const noexcept {
        return static_cast<std::size_t>(grid_points_ - 1);
    }
    [[nodiscard]] std::vector<double> nodes() const;

private:
    double length_;
    int grid_points_;
};

/// Dirichlet Laplacian eigenvalues, strictly increasing and positive.
class ModeSet {
public:
    explicit ModeSet(std::vector<double> lambdas);

    [[nodiscard]] std::size_t size() const noexcept { return lambdas_.size(); }
    [[nodiscard]] double lambda(std::size_t j) const { return lambdas_.at(j); }
    [[nodiscard]] std::span<const double> lambdas() const noexcept { return lambdas_; }

private:
    std::vector<double> lambdas_;
};

[[nodiscard]] ModeSet laplacian_eigenvalues(double length, int count);

/// Coordinates against the orthonormal sine basis, one per retained mode.
using FieldCoeffs = std::vector<double>;

/// z = (w, w') in Z^1 = X^1 x X, mode-major coefficients.
struct StateZ1 {
    FieldCoeffs w;
    FieldCoeffs v;

    [[nodiscard]] static StateZ1 zero(std::size_t modes) {
        return {FieldCoeffs(modes, 0.0), FieldCoeffs(modes, 0.0)};
    }
    [[nodiscard]] std::size_t size() const noexcept { return w.size(); }

    StateZ1& operator+=(const StateZ1& o);
    StateZ1& operator-=(const StateZ1& o);
    StateZ1& operator*=(double s);

    friend bool operator==(const StateZ1&, const StateZ1&) = default;
};

[[nodiscard]] StateZ1 operator+(StateZ1 a, const StateZ1& b);
[[nodiscard]] StateZ1 operator-(StateZ1 a, const StateZ1& b);
[[nodiscard]] StateZ1 operator*(double s, StateZ1 a);

/// sqrt(sum_j lambda_j^2 w_j^2 + v_j^2).
[[nodiscard]] double z1_norm(const StateZ1& z, const ModeSet& modes);

/// Composite trapezoid projection of interior-node samples onto the first
/// modes.size() eigenfunctions. Requires Mx >= 2 N.
[[nodiscard]] FieldCoeffs project(std::span<const double> samples, const SpatialDomain& domain,
                                  const ModeSet& modes);

/// Pointwise sum_j c_j phi_j(x_i) on the interior nodes.
[[nodiscard]] std::vector<double> synthesize(std::span<const double> coeffs, const SpatialDomain& domain);

/// Tabulated eigenfunctions for repeated transforms on a fixed grid.
class SineBasis {
public:
    SineBasis(SpatialDomain domain, ModeSet modes);

    [[nodiscard]] const SpatialDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] const ModeSet& modes() const noexcept { return modes_; }

    [[nodiscard]] FieldCoeffs project(std::span<const double> samples) const;
    [[nodiscard]] std::vector<double> synthesize(std::span<const double> coeffs) const;

private:
    SpatialDomain domain_;
    ModeSet modes_;
    std::vector<double> table_;  // [j * interior + i] = phi_j(x_i)
};

/// Samples of Phi = (phi_1, phi_2) on the uniform grid -r, -r + h, ..., 0.
class HistorySegment {
public:
    HistorySegment(double delay, double step, std::vector<StateZ1> samples);

    [[nodiscard]] double delay() const noexcept { return delay_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] std::size_t steps() const noexcept { return samples_.size() - 1; }
    [[nodiscard]] const std::vector<StateZ1>& samples() const noexcept { return samples_; }
    /// Sample at -r + k h.
    [[nodiscard]] const StateZ1& at(std::size_t k) const { return samples_.at(k); }
    [[nodiscard]] const StateZ1& initial() const { return samples_.back(); }

private:
    double delay_;
    double step_;
    std::vector<StateZ1> samples_;
};

/// Seeded random state: energy coordinates (lambda_j w_j, v_j) drawn standard
/// normal with 1/j weights, then scaled to the requested Z^1 norm.
[[nodiscard]] StateZ1 random_state(const ModeSet& modes, std::mt19937_64& rng, double z1_amplitude = 1.0);

/// Integer count n with n * step == span, or throws std::invalid_argument.
[[nodiscard]] std::size_t aligned_steps(double span, double step, const char* what);

}  // namespace beamctl

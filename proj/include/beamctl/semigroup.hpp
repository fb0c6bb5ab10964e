#pragma once

// Block-diagonal semigroup T(t) = sum_j exp(K_j t) P_j of the damped beam,
//
//     K_j = [[0, 1], [-lambda_j^2, -2 beta lambda_j]],
//
// evaluated in closed form from the two distinct real characteristic roots.

#include "beamctl/mat2.hpp"
#include "beamctl/spectral.hpp"

#include <stdexcept>

namespace beamctl {

/// Raised when the characteristic roots are too close for the two-root formula.
class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// beta must exceed 1 by at least this for the closed-form exponential.
inline constexpr double kConfluenceGuard = 1e-6;

class ModeBlock {
public:
    ModeBlock(double lambda, double beta);

    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    /// rho_slow = -lambda (beta - sqrt(beta^2 - 1)), the root closest to zero.
    [[nodiscard]] double rho_slow() const noexcept { return rho_slow_; }
    /// rho_fast = -lambda (beta + sqrt(beta^2 - 1)).
    [[nodiscard]] double rho_fast() const noexcept { return rho_fast_; }

private:
    double lambda_;
    double beta_;
    double rho_slow_;
    double rho_fast_;
};

/// exp(K t) = exp(rho_slow t) P_slow + exp(rho_fast t) P_fast.
struct SpectralSplit {
    double rho_slow;
    double rho_fast;
    Mat2 p_slow;
    Mat2 p_fast;
};

[[nodiscard]] Mat2 block_matrix(const ModeBlock& mb);

/// Eigenprojections of K; throws IllConditionedError near confluence.
[[nodiscard]] SpectralSplit spectral_split(const ModeBlock& mb);

[[nodiscard]] Mat2 block_exp(const ModeBlock& mb, double t);

/// diag(lambda, 1): maps (w, v) to energy coordinates where the Z^1 norm is Euclidean.
[[nodiscard]] inline Mat2 energy_scaling(double lambda) { return Mat2::diagonal(lambda, 1.0); }

[[nodiscard]] StateZ1 apply_semigroup(const StateZ1& z, double t, const ModeSet& modes, double beta);

/// Z^1-induced operator norm of T(t): max_j sigma_max(D_j exp(K_j t) D_j^{-1}).
[[nodiscard]] double semigroup_norm(const ModeSet& modes, double beta, double t);

struct DecayEnvelope {
    double M;
    double mu;
};

/// ||T(t)|| <= M exp(-mu t) with mu the slowest modal rate and M the sampled sup.
[[nodiscard]] DecayEnvelope decay_envelope(const ModeSet& modes, double beta);

}  // namespace beamctl

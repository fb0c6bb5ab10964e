#include "beamctl/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beamctl {

ModeBlock::ModeBlock(double lambda, double beta) : lambda_(lambda), beta_(beta) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("mode eigenvalue must be positive");
    }
    if (!(beta > 1.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("damping beta must be > 1, got " + std::to_string(beta));
    }
    // rho_slow * rho_fast = lambda^2; the quotient form avoids cancellation for large beta.
    const double s = std::sqrt((beta - 1.0) * (beta + 1.0));
    rho_fast_ = -lambda * (beta + s);
    rho_slow_ = -lambda / (beta + s);
}

Mat2 block_matrix(const ModeBlock& mb) {
    const double l = mb.lambda();
    return {0.0, 1.0, -l * l, -2.0 * mb.beta() * l};
}

SpectralSplit spectral_split(const ModeBlock& mb) {
    if (mb.beta() <= 1.0 + kConfluenceGuard) {
        throw IllConditionedError("characteristic roots nearly confluent (beta within 1e-6 of 1)");
    }
    const double r1 = mb.rho_slow();
    const double r2 = mb.rho_fast();
    const Mat2 k = block_matrix(mb);
    const double gap = r1 - r2;
    return {r1, r2, (k - r2 * Mat2::identity()) * (1.0 / gap), (r1 * Mat2::identity() - k) * (1.0 / gap)};
}

Mat2 block_exp(const ModeBlock& mb, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("block_exp: time must be nonnegative");
    }
    const SpectralSplit sp = spectral_split(mb);
    if (t == 0.0) return Mat2::identity();
    return std::exp(sp.rho_slow * t) * sp.p_slow + std::exp(sp.rho_fast * t) * sp.p_fast;
}

StateZ1 apply_semigroup(const StateZ1& z, double t, const ModeSet& modes, double beta) {
    if (z.size() != modes.size() || z.v.size() != modes.size()) {
        throw std::invalid_argument("apply_semigroup: state size does not match mode set");
    }
    StateZ1 out = z;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const Vec2 r = block_exp(ModeBlock(modes.lambda(j), beta), t) * Vec2{z.w[j], z.v[j]};
        out.w[j] = r[0];
        out.v[j] = r[1];
    }
    return out;
}

namespace {

double block_norm_z1(const ModeBlock& mb, double t) {
    const Mat2 d = energy_scaling(mb.lambda());
    const Mat2 dinv = Mat2::diagonal(1.0 / mb.lambda(), 1.0);
    return sigma_max(d * block_exp(mb, t) * dinv);
}

}  // namespace

double semigroup_norm(const ModeSet& modes, double beta, double t) {
    double n = 0.0;
    for (double lambda : modes.lambdas()) {
        n = std::max(n, block_norm_z1(ModeBlock(lambda, beta), t));
    }
    return n;
}

DecayEnvelope decay_envelope(const ModeSet& modes, double beta) {
    const ModeBlock first(modes.lambda(0), beta);
    const double mu = -first.rho_slow();

    constexpr double dt = 0.01;
    const double horizon = 10.0 / mu;
    double m = 1.0;
    for (int k = 0; k * dt <= horizon + 1e-12; ++k) {
        const double t = k * dt;
        m = std::max(m, semigroup_norm(modes, beta, t) * std::exp(mu * t));
    }
    // As t grows, exp(mu t) T(t) tends to the slow eigenprojection of mode 1;
    // include that limit so the envelope also covers times past the horizon.
    const SpectralSplit sp = spectral_split(first);
    const Mat2 d = energy_scaling(first.lambda());
    const Mat2 dinv = Mat2::diagonal(1.0 / first.lambda(), 1.0);
    m = std::max(m, sigma_max(d * sp.p_slow * dinv));
    return {m, mu};
}

}  // namespace beamctl

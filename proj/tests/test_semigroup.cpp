#include "beamctl/semigroup.hpp"

#include "dense_expm.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace beamctl;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Mat2 scaled(const Mat2& e, double lambda) {
    return energy_scaling(lambda) * e * Mat2::diagonal(1.0 / lambda, 1.0);
}

}  // namespace

TEST_CASE("block generator") {
    const Mat2 k = block_matrix(ModeBlock(1.0, 2.0));
    CHECK(k(0, 0) == 0.0);
    CHECK(k(0, 1) == 1.0);
    CHECK(k(1, 0) == -1.0);
    CHECK(k(1, 1) == -4.0);

    const Mat2 k2 = block_matrix(ModeBlock(kPi2, 2.0));
    CHECK(k2(1, 0) == doctest::Approx(-kPi2 * kPi2).epsilon(1e-15));
    CHECK(k2(1, 1) == doctest::Approx(-4.0 * kPi2).epsilon(1e-15));

    CHECK_THROWS_AS(ModeBlock(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModeBlock(0.0, 2.0), std::invalid_argument);
}

TEST_CASE("characteristic roots") {
    const ModeBlock mb(1.0, 2.0);
    CHECK(mb.rho_slow() == doctest::Approx(-2.0 + std::sqrt(3.0)).epsilon(1e-14));
    CHECK(mb.rho_fast() == doctest::Approx(-2.0 - std::sqrt(3.0)).epsilon(1e-14));
    CHECK(mb.rho_slow() == doctest::Approx(-0.267949).epsilon(1e-6));
    CHECK(mb.rho_fast() == doctest::Approx(-3.732051).epsilon(1e-6));
}

TEST_CASE("near-confluent damping is refused") {
    const ModeBlock mb(1.0, 1.0 + 5e-7);
    CHECK_THROWS_AS((void)spectral_split(mb), IllConditionedError);
    CHECK_THROWS_AS((void)block_exp(mb, 0.5), IllConditionedError);
}

TEST_CASE("projectors split the identity") {
    const auto sp = spectral_split(ModeBlock(3.0, 1.7));
    const Mat2 sum = sp.p_slow + sp.p_fast;
    CHECK(max_abs_entry(sum - Mat2::identity()) < 1e-14);
    CHECK(max_abs_entry(sp.p_slow * sp.p_fast) < 1e-13);
}

TEST_CASE("block exponential against the dense oracle") {
    const ModeBlock unit(1.0, 2.0);
    const Mat2 e0 = block_exp(unit, 0.0);
    CHECK(e0(0, 0) == 1.0);
    CHECK(e0(0, 1) == 0.0);
    CHECK(e0(1, 0) == 0.0);
    CHECK(e0(1, 1) == 1.0);
    CHECK_THROWS_AS((void)block_exp(unit, -0.1), std::invalid_argument);

    const double one = 1.0;
    const auto ref = oracle::dense_expm(oracle::beam_generator(std::span<const double>(&one, 1), 2.0));
    const Mat2 e = block_exp(unit, 1.0);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            CHECK(std::abs(e(r, c) - static_cast<double>(ref(r, c))) < 1e-10);
        }
    }

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lam(0.5, 200.0);
    std::uniform_real_distribution<double> bet(1.05, 4.0);
    std::uniform_real_distribution<double> tim(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double l = lam(rng);
        const double b = bet(rng);
        const double t = tim(rng);
        const auto dense = oracle::dense_expm(
            oracle::beam_generator_energy(std::span<const double>(&l, 1), b) * static_cast<long double>(t));
        const Mat2 s = scaled(block_exp(ModeBlock(l, b), t), l);
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) CHECK(std::abs(s(r, c) - static_cast<double>(dense(r, c))) < 1e-10);
        }
    }
}

TEST_CASE("semigroup law and identity at zero") {
    const auto modes = laplacian_eigenvalues(1.0, 8);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> tim(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const StateZ1 z = random_state(modes, rng);
        CHECK(apply_semigroup(z, 0.0, modes, 2.0) == z);
        const double s = tim(rng);
        const double t = tim(rng);
        const StateZ1 two = apply_semigroup(apply_semigroup(z, s, modes, 2.0), t, modes, 2.0);
        const StateZ1 one = apply_semigroup(z, s + t, modes, 2.0);
        CHECK(z1_norm(two - one, modes) <= 1e-10 * std::max(z1_norm(one, modes), 1e-300));
    }
}

TEST_CASE("long-time decay") {
    const auto modes = laplacian_eigenvalues(1.0, 8);
    std::mt19937_64 rng(2);
    const StateZ1 z = random_state(modes, rng, 3.0);
    CHECK(z1_norm(apply_semigroup(z, 50.0, modes, 2.0), modes) <= 1e-8 * z1_norm(z, modes));
}

TEST_CASE("decay envelope") {
    const auto modes = laplacian_eigenvalues(1.0, 8);
    const DecayEnvelope env = decay_envelope(modes, 2.0);
    CHECK(env.mu == doctest::Approx(kPi2 * (2.0 - std::sqrt(3.0))).epsilon(1e-12));
    CHECK(env.M >= 1.0);
    for (int k = 0; k <= 2000; ++k) {
        const double t = 0.005 * k;
        CHECK(semigroup_norm(modes, 2.0, t) <= env.M * std::exp(-env.mu * t) * (1.0 + 1e-12));
    }
    CHECK(semigroup_norm(modes, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

    const auto one = laplacian_eigenvalues(1.0, 1);
    const DecayEnvelope e1 = decay_envelope(one, 2.0);
    double sup = 0.0;
    for (int k = 0; k <= 100000; ++k) {
        const double t = 0.001 * k;
        sup = std::max(sup, semigroup_norm(one, 2.0, t) * std::exp(e1.mu * t));
    }
    CHECK(e1.M >= 1.0);
    CHECK(e1.M == doctest::Approx(sup).epsilon(1e-6));

    CHECK_THROWS_AS((void)decay_envelope(modes, 1.0), std::invalid_argument);
}

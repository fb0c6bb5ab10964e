#include "beamctl/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace beamctl;

namespace {

// Direct composite trapezoid of samples * sqrt(2/L) sin(j pi x / L) on [0, L]
// with zero boundary values.
double trapezoid_coefficient(const std::vector<double>& samples, double length, int j) {
    const std::size_t m = samples.size() + 1;
    const double h = length / static_cast<double>(m);
    double acc = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        const double x = static_cast<double>(i) * h;
        acc += samples[i - 1] * std::sqrt(2.0 / length) * std::sin(j * std::numbers::pi * x / length);
    }
    return h * acc;
}

std::vector<double> sample_mode(const SpatialDomain& d, int j) {
    std::vector<double> s;
    for (double x : d.nodes()) s.push_back(std::sqrt(2.0 / d.length()) * std::sin(j * std::numbers::pi * x / d.length()));
    return s;
}

}  // namespace

TEST_CASE("dirichlet eigenvalues") {
    const auto m = laplacian_eigenvalues(1.0, 3);
    REQUIRE(m.size() == 3);
    CHECK(m.lambda(0) == doctest::Approx(9.8696).epsilon(1e-5));
    CHECK(m.lambda(1) == doctest::Approx(39.4784).epsilon(1e-5));
    CHECK(m.lambda(2) == doctest::Approx(88.8264).epsilon(1e-5));

    const auto unit = laplacian_eigenvalues(std::numbers::pi, 1);
    CHECK(unit.lambda(0) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS((void)laplacian_eigenvalues(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)laplacian_eigenvalues(-1.0, 2), std::invalid_argument);
}

TEST_CASE("mode set rejects unordered or nonpositive eigenvalues") {
    CHECK_THROWS_AS(ModeSet({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSet({2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSet({0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSet({}), std::invalid_argument);
}

TEST_CASE("projection of single eigenfunctions") {
    const SpatialDomain d(1.0, 64);
    const auto modes4 = laplacian_eigenvalues(1.0, 4);
    const auto c = project(sample_mode(d, 1), d, modes4);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == doctest::Approx(trapezoid_coefficient(sample_mode(d, 1), 1.0, 1)).epsilon(1e-14));
    CHECK(std::abs(c[0] - 1.0) < 1e-3);
    for (int j = 1; j < 4; ++j) CHECK(std::abs(c[static_cast<std::size_t>(j)]) < 1e-3);

    const auto modes1 = laplacian_eigenvalues(1.0, 1);
    const auto c2 = project(sample_mode(d, 2), d, modes1);
    REQUIRE(c2.size() == 1);
    CHECK(std::abs(c2[0]) < 1e-3);

    const std::vector<double> zeros(d.interior_count(), 0.0);
    for (double x : project(zeros, d, modes4)) CHECK(x == 0.0);
}

TEST_CASE("projection matches the trapezoid oracle on random fields") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        const SpatialDomain d(0.5 + trial * 0.1, 40 + 2 * trial);
        const auto modes = laplacian_eigenvalues(d.length(), 6);
        std::vector<double> s(d.interior_count());
        for (double& x : s) x = n01(rng);
        const auto c = project(s, d, modes);
        for (int j = 1; j <= 6; ++j) {
            CHECK(c[static_cast<std::size_t>(j - 1)] ==
                  doctest::Approx(trapezoid_coefficient(s, d.length(), j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("synthesis and round trip") {
    const SpatialDomain d(1.0, 64);
    const std::vector<double> e1{1.0, 0.0, 0.0};
    const auto s = synthesize(e1, d);
    const auto ref = sample_mode(d, 1);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-14));

    const std::vector<double> none(5, 0.0);
    for (double x : synthesize(none, d)) CHECK(x == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int n = 1; n <= 8; ++n) {
        const SpatialDomain dn(1.0, 16 * n);
        const auto modes = laplacian_eigenvalues(1.0, n);
        const SineBasis basis(dn, modes);
        FieldCoeffs c(static_cast<std::size_t>(n));
        for (double& x : c) x = n01(rng);
        const auto back = basis.project(basis.synthesize(c));
        const auto back_free = project(synthesize(c, dn), dn, modes);
        for (std::size_t j = 0; j < c.size(); ++j) {
            CHECK(std::abs(back[j] - c[j]) < 1e-3);
            CHECK(back_free[j] == doctest::Approx(back[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("sine basis needs two grid cells per mode") {
    CHECK_THROWS_AS(SineBasis(SpatialDomain(1.0, 7), laplacian_eigenvalues(1.0, 4)), std::invalid_argument);
    const SineBasis ok(SpatialDomain(1.0, 8), laplacian_eigenvalues(1.0, 4));
    CHECK_THROWS_AS((void)ok.project(std::vector<double>(3)), std::invalid_argument);
    CHECK_THROWS_AS((void)ok.synthesize(std::vector<double>(2)), std::invalid_argument);
}

TEST_CASE("z1 norm") {
    const auto modes = laplacian_eigenvalues(1.0, 3);
    StateZ1 z = StateZ1::zero(3);
    CHECK(z1_norm(z, modes) == 0.0);
    z.w[0] = 1.0;
    CHECK(z1_norm(z, modes) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-15));
    z = StateZ1::zero(3);
    z.v[1] = 1.0;
    CHECK(z1_norm(z, modes) == 1.0);
    CHECK_THROWS_AS((void)z1_norm(StateZ1::zero(2), modes), std::invalid_argument);
}

TEST_CASE("random states are seeded and scaled") {
    const auto modes = laplacian_eigenvalues(1.0, 8);
    std::mt19937_64 a(5);
    std::mt19937_64 b(5);
    const StateZ1 za = random_state(modes, a, 2.5);
    const StateZ1 zb = random_state(modes, b, 2.5);
    CHECK(za == zb);
    CHECK(z1_norm(za, modes) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("state arithmetic") {
    StateZ1 a{{1.0, 2.0}, {3.0, 4.0}};
    const StateZ1 b{{0.5, 0.5}, {1.0, 1.0}};
    const StateZ1 c = a - b + 2.0 * b;
    CHECK(c.w[0] == 1.5);
    CHECK(c.v[1] == 5.0);
    CHECK_THROWS_AS(a += StateZ1::zero(3), std::invalid_argument);
}

TEST_CASE("history segment and step alignment") {
    CHECK(aligned_steps(0.3, 1.0 / 600.0, "r") == 180);
    CHECK_THROWS_AS((void)aligned_steps(0.3, 0.07, "r"), std::invalid_argument);
    std::vector<StateZ1> samples(4, StateZ1::zero(2));
    samples.back().w[0] = 1.0;
    const HistorySegment seg(0.3, 0.1, samples);
    CHECK(seg.steps() == 3);
    CHECK(seg.initial().w[0] == 1.0);
    CHECK_THROWS_AS(HistorySegment(0.3, 0.1, std::vector<StateZ1>(3, StateZ1::zero(2))), std::invalid_argument);
}

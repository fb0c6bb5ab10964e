#include "beamctl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beamctl {

namespace {

void require_same_size(const StateZ1& a, const StateZ1& b) {
    if (a.w.size() != b.w.size() || a.v.size() != b.v.size()) {
        throw std::invalid_argument("state size mismatch");
    }
}

double eigenfunction(int j, double x, double length) {
    return std::sqrt(2.0 / length) * std::sin(j * std::numbers::pi * x / length);
}

}  // namespace

SpatialDomain::SpatialDomain(double length, int grid_points) : length_(length), grid_points_(grid_points) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("domain length must be positive");
    }
    if (grid_points < 2) {
        throw std::invalid_argument("grid_points must be at least 2");
    }
}

std::vector<double> SpatialDomain::nodes() const {
    std::vector<double> x(interior_count());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i + 1) * length_ / grid_points_;
    }
    return x;
}

ModeSet::ModeSet(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) {
        throw std::invalid_argument("mode set must be non-empty");
    }
    if (!(lambdas_.front() > 0.0)) {
        throw std::invalid_argument("eigenvalues must be positive");
    }
    if (std::adjacent_find(lambdas_.begin(), lambdas_.end(), std::greater_equal<>{}) != lambdas_.end()) {
        throw std::invalid_argument("eigenvalues must be strictly increasing");
    }
}

ModeSet laplacian_eigenvalues(double length, int count) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("length must be positive");
    }
    if (count < 1) {
        throw std::invalid_argument("mode count must be at least 1");
    }
    std::vector<double> lambdas(static_cast<std::size_t>(count));
    for (int j = 1; j <= count; ++j) {
        const double k = j * std::numbers::pi / length;
        lambdas[static_cast<std::size_t>(j - 1)] = k * k;
    }
    return ModeSet(std::move(lambdas));
}

StateZ1& StateZ1::operator+=(const StateZ1& o) {
    require_same_size(*this, o);
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] += o.w[j];
        v[j] += o.v[j];
    }
    return *this;
}

StateZ1& StateZ1::operator-=(const StateZ1& o) {
    require_same_size(*this, o);
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] -= o.w[j];
        v[j] -= o.v[j];
    }
    return *this;
}

StateZ1& StateZ1::operator*=(double s) {
    for (auto& x : w) x *= s;
    for (auto& x : v) x *= s;
    return *this;
}

StateZ1 operator+(StateZ1 a, const StateZ1& b) { return a += b; }
StateZ1 operator-(StateZ1 a, const StateZ1& b) { return a -= b; }
StateZ1 operator*(double s, StateZ1 a) { return a *= s; }

double z1_norm(const StateZ1& z, const ModeSet& modes) {
    if (z.w.size() != modes.size() || z.v.size() != modes.size()) {
        throw std::invalid_argument("z1_norm: state has " + std::to_string(z.w.size()) + " modes, expected " +
                                    std::to_string(modes.size()));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double lw = modes.lambda(j) * z.w[j];
        sum += lw * lw + z.v[j] * z.v[j];
    }
    return std::sqrt(sum);
}

FieldCoeffs project(std::span<const double> samples, const SpatialDomain& domain, const ModeSet& modes) {
    return SineBasis(domain, modes).project(samples);
}

std::vector<double> synthesize(std::span<const double> coeffs, const SpatialDomain& domain) {
    std::vector<double> out(domain.interior_count(), 0.0);
    const auto x = domain.nodes();
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0.0) continue;
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += coeffs[j] * eigenfunction(static_cast<int>(j + 1), x[i], domain.length());
        }
    }
    return out;
}

SineBasis::SineBasis(SpatialDomain domain, ModeSet modes) : domain_(domain), modes_(std::move(modes)) {
    if (static_cast<std::size_t>(domain_.grid_points()) < 2 * modes_.size()) {
        throw std::invalid_argument("grid_points must be at least twice the number of modes");
    }
    const std::size_t m = domain_.interior_count();
    const auto x = domain_.nodes();
    table_.resize(modes_.size() * m);
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            table_[j * m + i] = eigenfunction(static_cast<int>(j + 1), x[i], domain_.length());
        }
    }
}

FieldCoeffs SineBasis::project(std::span<const double> samples) const {
    const std::size_t m = domain_.interior_count();
    if (samples.size() != m) {
        throw std::invalid_argument("project: expected " + std::to_string(m) + " interior samples, got " +
                                    std::to_string(samples.size()));
    }
    // Trapezoid weights are h at interior nodes; boundary samples vanish.
    const double h = domain_.spacing();
    FieldCoeffs c(modes_.size(), 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double* row = &table_[j * m];
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += samples[i] * row[i];
        c[j] = h * acc;
    }
    return c;
}

std::vector<double> SineBasis::synthesize(std::span<const double> coeffs) const {
    if (coeffs.size() != modes_.size()) {
        throw std::invalid_argument("synthesize: coefficient count does not match mode set");
    }
    const std::size_t m = domain_.interior_count();
    std::vector<double> out(m, 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const double c = coeffs[j];
        if (c == 0.0) continue;
        const double* row = &table_[j * m];
        for (std::size_t i = 0; i < m; ++i) out[i] += c * row[i];
    }
    return out;
}

StateZ1 random_state(const ModeSet& modes, std::mt19937_64& rng, double z1_amplitude) {
    std::normal_distribution<double> normal(0.0, 1.0);
    StateZ1 z = StateZ1::zero(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double weight = 1.0 / static_cast<double>(j + 1);
        z.w[j] = weight * normal(rng) / modes.lambda(j);
        z.v[j] = weight * normal(rng);
    }
    const double n = z1_norm(z, modes);
    if (n > 0.0) z *= z1_amplitude / n;
    return z;
}

std::size_t aligned_steps(double span, double step, const char* what) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (span < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be nonnegative");
    }
    const double ratio = span / step;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-6) {
        throw std::invalid_argument(std::string(what) + " is not an integer multiple of the time step");
    }
    return static_cast<std::size_t>(n);
}

HistorySegment::HistorySegment(double delay, double step, std::vector<StateZ1> samples)
    : delay_(delay), step_(step), samples_(std::move(samples)) {
    if (!(delay > 0.0)) {
        throw std::invalid_argument("delay must be positive");
    }
    const std::size_t n = aligned_steps(delay, step, "delay");
    if (n == 0 || samples_.size() != n + 1) {
        throw std::invalid_argument("history must cover [-r, 0] with both endpoints");
    }
}

}  // namespace beamctl

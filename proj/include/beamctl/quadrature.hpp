#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace beamctl {

/// n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
    explicit GaussLegendre(int points);

    [[nodiscard]] int points() const noexcept { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

    /// Applies the rule on [a, b] split into `panels` equal panels. F may return
    /// any type supporting `+=` and scalar multiplication from the left.
    template <class F>
    auto integrate(F&& f, double a, double b, int panels = 1) const {
        const double width = (b - a) / panels;
        const double half = 0.5 * width;
        auto acc = 0.0 * f(a + half);
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * width;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                acc += (half * weights_[i]) * f(mid + half * nodes_[i]);
            }
        }
        return acc;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Shared 64-point rule.
[[nodiscard]] const GaussLegendre& gauss_legendre_64();

/// Panels needed so that `rate * panel_width` stays below the range a
/// 64-point rule resolves to double precision for decaying exponentials.
[[nodiscard]] inline int stiff_panels(double rate, double length) {
    constexpr double kResolvedProduct = 128.0;
    const double p = std::ceil(std::abs(rate) * length / kResolvedProduct);
    return p < 1.0 ? 1 : static_cast<int>(p);
}

}  // namespace beamctl

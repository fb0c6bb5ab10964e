#pragma once

// Fixed-size 2x2 linear algebra used by every per-mode block computation.

#include <array>
#include <cmath>
#include <utility>

namespace beamctl {

/// Column 2-vector; per-mode (w_j, v_j) pair.
struct Vec2 {
    std::array<double, 2> a{};

    constexpr Vec2() = default;
    constexpr Vec2(double x0, double x1) : a{x0, x1} {}

    [[nodiscard]] constexpr double operator[](int i) const { return a[i]; }
    [[nodiscard]] constexpr double& operator[](int i) { return a[i]; }

    constexpr Vec2& operator+=(const Vec2& o) {
        a[0] += o.a[0];
        a[1] += o.a[1];
        return *this;
    }
    constexpr Vec2& operator-=(const Vec2& o) {
        a[0] -= o.a[0];
        a[1] -= o.a[1];
        return *this;
    }
};

/// Row-major 2x2 real matrix.
struct Mat2 {
    std::array<double, 4> a{};

    constexpr Mat2() = default;
    constexpr Mat2(double m00, double m01, double m10, double m11) : a{m00, m01, m10, m11} {}

    [[nodiscard]] static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    [[nodiscard]] static constexpr Mat2 diagonal(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

    [[nodiscard]] constexpr double operator()(int i, int j) const { return a[2 * i + j]; }
    [[nodiscard]] constexpr double& operator()(int i, int j) { return a[2 * i + j]; }

    [[nodiscard]] constexpr Mat2 transposed() const { return {a[0], a[2], a[1], a[3]}; }
    [[nodiscard]] constexpr double trace() const { return a[0] + a[3]; }
    [[nodiscard]] constexpr double det() const { return a[0] * a[3] - a[1] * a[2]; }

    constexpr Mat2& operator+=(const Mat2& o) {
        for (int k = 0; k < 4; ++k) a[k] += o.a[k];
        return *this;
    }
    constexpr Mat2& operator-=(const Mat2& o) {
        for (int k = 0; k < 4; ++k) a[k] -= o.a[k];
        return *this;
    }
    constexpr Mat2& operator*=(double s) {
        for (auto& x : a) x *= s;
        return *this;
    }
};

[[nodiscard]] constexpr Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
[[nodiscard]] constexpr Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
[[nodiscard]] constexpr Mat2 operator*(Mat2 x, double s) { return x *= s; }
[[nodiscard]] constexpr Mat2 operator*(double s, Mat2 x) { return x *= s; }

[[nodiscard]] constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
            x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]};
}

[[nodiscard]] constexpr Vec2 operator*(const Mat2& x, const Vec2& v) {
    return {x.a[0] * v[0] + x.a[1] * v[1], x.a[2] * v[0] + x.a[3] * v[1]};
}

[[nodiscard]] constexpr Vec2 operator+(const Vec2& x, const Vec2& y) { return {x[0] + y[0], x[1] + y[1]}; }
[[nodiscard]] constexpr Vec2 operator-(const Vec2& x, const Vec2& y) { return {x[0] - y[0], x[1] - y[1]}; }
[[nodiscard]] constexpr Vec2 operator*(double s, const Vec2& x) { return {s * x[0], s * x[1]}; }

[[nodiscard]] inline double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

[[nodiscard]] constexpr Mat2 outer(const Vec2& x, const Vec2& y) {
    return {x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]};
}

[[nodiscard]] inline double max_abs_entry(const Mat2& m) {
    double r = 0.0;
    for (double x : m.a) r = std::max(r, std::abs(x));
    return r;
}

/// Eigenvalues of the symmetric part of m, ascending.
[[nodiscard]] inline std::pair<double, double> symmetric_eigenvalues(const Mat2& m) {
    const double p = 0.5 * (m.a[0] + m.a[3]);
    const double off = 0.5 * (m.a[1] + m.a[2]);
    const double q = std::hypot(0.5 * (m.a[0] - m.a[3]), off);
    return {p - q, p + q};
}

/// Largest singular value (spectral norm).
[[nodiscard]] inline double sigma_max(const Mat2& m) {
    // Singular values of a 2x2 matrix from the sum and difference of the
    // diagonal/antidiagonal rotations; avoids forming m^T m.
    const double e = 0.5 * (m.a[0] + m.a[3]);
    const double f = 0.5 * (m.a[0] - m.a[3]);
    const double g = 0.5 * (m.a[2] + m.a[1]);
    const double h = 0.5 * (m.a[2] - m.a[1]);
    return std::hypot(e, h) + std::hypot(f, g);
}

/// Solves m x = rhs by Cramer's rule; m must be nonsingular.
[[nodiscard]] inline Vec2 solve(const Mat2& m, const Vec2& rhs) {
    const double d = m.det();
    return {(m.a[3] * rhs[0] - m.a[1] * rhs[1]) / d, (m.a[0] * rhs[1] - m.a[2] * rhs[0]) / d};
}

}  // namespace beamctl

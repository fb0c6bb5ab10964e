#pragma once

// Dense matrix exponential by scaling and squaring of a truncated Taylor
// series, in extended precision. Test-only oracle for the modal semigroup.

#include <Eigen/Dense>

#include <cmath>
#include <span>

namespace beamctl::oracle {

using DenseMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

inline DenseMatrix dense_expm(const DenseMatrix& a) {
    const long double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.125L) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.125L)));
    const DenseMatrix b = a / std::ldexp(1.0L, squarings);

    const auto n = a.rows();
    DenseMatrix sum = DenseMatrix::Identity(n, n);
    DenseMatrix term = DenseMatrix::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = (term * b) / static_cast<long double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-24L) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

/// Generator of the N-mode damped beam in physical coordinates, laid out as
/// (w_1..w_N, v_1..v_N).
inline DenseMatrix beam_generator(std::span<const double> lambdas, double beta) {
    const auto n = static_cast<Eigen::Index>(lambdas.size());
    DenseMatrix a = DenseMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const long double l = lambdas[static_cast<std::size_t>(j)];
        a(j, n + j) = 1.0L;
        a(n + j, j) = -l * l;
        a(n + j, n + j) = -2.0L * beta * l;
    }
    return a;
}

/// Same generator after the change of variables (lambda w, v).
inline DenseMatrix beam_generator_energy(std::span<const double> lambdas, double beta) {
    const auto n = static_cast<Eigen::Index>(lambdas.size());
    DenseMatrix a = DenseMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const long double l = lambdas[static_cast<std::size_t>(j)];
        a(j, n + j) = l;
        a(n + j, j) = -l;
        a(n + j, n + j) = -2.0L * beta * l;
    }
    return a;
}

}  // namespace beamctl::oracle

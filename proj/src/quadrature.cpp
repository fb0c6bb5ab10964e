#include "beamctl/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <stdexcept>

namespace beamctl {

GaussLegendre::GaussLegendre(int points) {
    if (points < 1) {
        throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
    }
    // Boost returns the nonnegative zeros only, ascending.
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(points);
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it != 0.0) nodes_.push_back(-*it);
    }
    for (double x : zeros) nodes_.push_back(x);
    weights_.reserve(nodes_.size());
    for (double x : nodes_) {
        const double dp = boost::math::legendre_p_prime(points, x);
        weights_.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
}

const GaussLegendre& gauss_legendre_64() {
    static const GaussLegendre rule(64);
    return rule;
}

}  // namespace beamctl

#include "beamctl/gramian.hpp"

#include "beamctl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamctl {

SteerWindow::SteerWindow(double tau, double delta) : tau_(tau), delta_(delta) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("steering window: tau must be positive");
    }
    if (!(delta >= 0.0) || delta > tau) {
        throw std::invalid_argument("steering window: delta must lie in [0, tau]");
    }
}

namespace {

Mat2 symmetrized(const Mat2& m) {
    const double off = 0.5 * (m(0, 1) + m(1, 0));
    return {m(0, 0), off, off, m(1, 1)};
}

// int_0^delta e^{a s} ds
double exp_integral(double a, double delta) {
    if (a == 0.0) return delta;
    return std::expm1(a * delta) / a;
}

}  // namespace

ModeGramian gramian_mode_quadrature(const ModeBlock& mb, const SteerWindow& win, int nodes) {
    if (nodes < 2) {
        throw std::invalid_argument("gramian quadrature needs at least 2 nodes");
    }
    const double delta = win.delta();
    if (delta == 0.0) return {Mat2{}};
    const Mat2 d = energy_scaling(mb.lambda());
    const GaussLegendre rule(nodes);
    const auto integrand = [&](double s) {
        const Vec2 x = d * (block_exp(mb, s) * Vec2{0.0, 1.0});
        return outer(x, x);
    };
    const int panels = stiff_panels(2.0 * mb.rho_fast(), delta);
    return {symmetrized(rule.integrate(integrand, 0.0, delta, panels))};
}

ModeGramian gramian_mode_closedform(const ModeBlock& mb, const SteerWindow& win) {
    const SpectralSplit sp = spectral_split(mb);
    const double delta = win.delta();
    if (delta == 0.0) return {Mat2{}};

    // D e^{Ks} b = (e^{r1 s} c1 - e^{r2 s} c2) / (r1 - r2), c_i = (lambda, r_i).
    const double r1 = sp.rho_slow;
    const double r2 = sp.rho_fast;
    const double l = mb.lambda();
    const double gap2 = (r1 - r2) * (r1 - r2);
    const double e11 = exp_integral(2.0 * r1, delta);
    const double e12 = exp_integral(r1 + r2, delta);
    const double e22 = exp_integral(2.0 * r2, delta);

    const double q00 = l * l * (e11 - 2.0 * e12 + e22) / gap2;
    const double q01 = l * (r1 * e11 - (r1 + r2) * e12 + r2 * e22) / gap2;
    const double q11 = (r1 * r1 * e11 - 2.0 * r1 * r2 * e12 + r2 * r2 * e22) / gap2;
    return {Mat2{q00, q01, q01, q11}};
}

GramianSet::GramianSet(ModeSet modes, double beta, SteerWindow window, std::vector<ModeGramian> blocks)
    : modes_(std::move(modes)), beta_(beta), window_(window), blocks_(std::move(blocks)) {
    if (blocks_.size() != modes_.size()) {
        throw std::invalid_argument("gramian block count does not match mode set");
    }
    min_eigenvalue_ = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) min_eigenvalue_ = std::min(min_eigenvalue_, b.min_eigenvalue());
}

GramianSet assemble_gramian(const ModeSet& modes, double beta, const SteerWindow& win) {
    std::vector<ModeGramian> blocks;
    blocks.reserve(modes.size());
    for (double lambda : modes.lambdas()) {
        blocks.push_back(gramian_mode_closedform(ModeBlock(lambda, beta), win));
    }
    return GramianSet(modes, beta, win, std::move(blocks));
}

namespace {

void require_matching(const GramianSet& qset, const StateZ1& d) {
    if (d.w.size() != qset.modes().size() || d.v.size() != qset.modes().size()) {
        throw std::invalid_argument("state size does not match gramian");
    }
}

template <class BlockOp>
StateZ1 blockwise(const GramianSet& qset, const StateZ1& d, BlockOp&& op) {
    require_matching(qset, d);
    StateZ1 out = d;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double l = qset.modes().lambda(j);
        const Vec2 r = op(qset.block(j).q, Vec2{l * d.w[j], d.v[j]});
        out.w[j] = r[0] / l;
        out.v[j] = r[1];
    }
    return out;
}

}  // namespace

StateZ1 solve_regularized(const GramianSet& qset, double alpha, const StateZ1& d) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("regularization alpha must be positive");
    }
    return blockwise(qset, d, [alpha](const Mat2& q, const Vec2& x) {
        return solve(q + alpha * Mat2::identity(), x);
    });
}

StateZ1 apply_gramian(const GramianSet& qset, const StateZ1& z) {
    return blockwise(qset, z, [](const Mat2& q, const Vec2& x) { return q * x; });
}

StateZ1 regularized_miss(const GramianSet& qset, double alpha, const StateZ1& d) {
    return alpha * solve_regularized(qset, alpha, d);
}

}  // namespace beamctl

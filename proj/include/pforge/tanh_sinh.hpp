#pragma once

#include <cmath>
#include <numbers>

namespace pforge {

// One node of the tanh-sinh rule on (lo, hi). Distances to both ends are
// carried separately (and as logs) so integrands can evaluate endpoint
// factors without the cancellation in t - lo.
struct DeNode {
    double x;      // abscissa
    double dl, dr; // x - lo, hi - x
    double log_dl, log_dr;
    double log_w; // log of dx/dt at this node (step h not included)
};

template <class V>
struct DeOutcome {
    V value;
    int levels;
    bool converged;
    double last_change;
};

// Level m uses step 2^-m; stops when two successive levels agree within
// max(tol, tol*|value|). f(node) returns the node's contribution already
// multiplied by exp(node.log_w) (done by the caller so that large endpoint
// powers can be folded into the exponent).
template <class V, class F, class Norm>
DeOutcome<V> tanh_sinh(double lo, double hi, F&& f, double tol, int max_levels, Norm norm, V zero) {
    constexpr double half_pi = std::numbers::pi / 2;
    const double tmax = 6.5;
    const double half = 0.5 * (hi - lo);
    const double log_len = std::log(hi - lo);

    auto node_at = [&](double t) {
        double u = half_pi * std::sinh(t);
        double au = std::abs(u);
        double e = std::exp(-2 * au);
        double l1p = std::log1p(e);
        double log_near = log_len - 2 * au - l1p;
        double log_far = log_len - l1p;
        double near = std::exp(log_near), far = std::exp(log_far);
        DeNode nd;
        if (t < 0) {
            nd.dl = near, nd.dr = far, nd.log_dl = log_near, nd.log_dr = log_far;
            nd.x = lo + near;
        } else {
            nd.dl = far, nd.dr = near, nd.log_dl = log_far, nd.log_dr = log_near;
            nd.x = hi - near;
        }
        nd.log_w = std::log(half * half_pi * std::cosh(t)) + std::log(4.0) - 2 * au - 2 * l1p;
        return nd;
    };

    double h = 1.0;
    V sum = f(node_at(0.0));
    for (int j = 1; j * h <= tmax; ++j) sum = sum + f(node_at(j * h)) + f(node_at(-j * h));
    V est = sum * h;
    double change = 0;
    for (int level = 1; level <= max_levels; ++level) {
        h *= 0.5;
        V add = zero;
        for (int j = 1; j * h <= tmax; j += 2) add = add + f(node_at(j * h)) + f(node_at(-j * h));
        sum = sum + add;
        V next = sum * h;
        change = norm(next - est);
        est = next;
        if (level >= 2 && change <= std::fmax(tol, tol * norm(est))) return {est, level, true, change};
    }
    return {est, max_levels, false, change};
}

} // namespace pforge

#pragma once

#include "pforge/surface.hpp"

#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace pforge {

// core(t) * (t - lo)^(-left_exponent) * (hi - t)^(-right_exponent) on (lo, hi).
struct SingularIntegrand {
    std::function<double(double)> core;
    double left_exponent = 0;
    double right_exponent = 0;
    double lo = 0;
    double hi = 1;
};

struct QuadResult {
    double value;
    int levels;
    double change; // difference between the last two levels
};

constexpr double default_tol = 1e-10;
constexpr int default_max_levels = 14;

// Tanh-sinh with the declared endpoint powers folded into the node weights.
QuadResult integrate_singular_detail(const SingularIntegrand& f, double tol = default_tol,
                                     int max_levels = default_max_levels);
double integrate_singular(const SingularIntegrand& f, double tol = default_tol);

// Gauss-Jacobi rule for the same integrand: the endpoint powers become the
// Jacobi weight and only core is sampled.
double integrate_gauss_jacobi(const SingularIntegrand& f, int n);
// Doubles n from 16 until two rules agree within tol (n <= 1024).
double integrate_gauss_jacobi_adaptive(const SingularIntegrand& f, double tol = default_tol);

// Nodes and weights on [-1, 1] for weight (1-x)^alpha (1+x)^beta.
void gauss_jacobi_rule(int n, double alpha, double beta, std::vector<double>& x, std::vector<double>& w);

// scale * prod |t - c|^e. Factors at equal points are merged.
class PowerProduct {
public:
    PowerProduct() = default;
    explicit PowerProduct(double scale) : scale_(scale) {}

    PowerProduct& times(double c, double e);
    PowerProduct& scaled(double s) {
        scale_ *= s;
        return *this;
    }

    double operator()(double t) const;
    // The integrand on (lo, hi): factors sitting at lo or hi become the
    // declared endpoint exponents, the rest form the core.
    SingularIntegrand on(double lo, double hi) const;
    // f(1/s) / s^2, the integrand after t = 1/s.
    PowerProduct inverted() const;
    // (hi - lo) * f(lo + (hi - lo) v) as a function of v on (0, 1).
    PowerProduct affine(double lo, double hi) const;

    double scale() const { return scale_; }
    const std::vector<std::pair<double, double>>& factors() const { return f_; }

private:
    double scale_ = 1;
    std::vector<std::pair<double, double>> f_;
};

// Integral of a power product over (lo, hi), either end possibly infinite.
// No factor point may lie strictly inside the interval.
double integrate_power(const PowerProduct& f, double lo, double hi, double tol = default_tol);

struct PeriodIntegrals {
    double I0, I1, J0, Jplus, Jminus, J1;
};

// The closed-form integrands over the real axis (k, a, b raw; b = 1 allowed).
PowerProduct j_integrand(int k, double a, double b); // J0, J+, J- share it
PowerProduct i1_integrand(int k, double a, double b);

double j0_integral(int k, double a, double b, double tol = default_tol);
double jplus_integral(int k, double a, double b, double tol = default_tol);
double jminus_integral(int k, double a, double b, double tol = default_tol);
double i0_integral(int k, double a, double b, double tol = default_tol);
double i1_integral(int k, double a, double b, double tol = default_tol);
// J+ evaluated after t = a + (b - a) v; an independent route used to
// cross-check I0.
double jplus_affine(int k, double a, double b, double tol = default_tol);
// The regularized forms: I1 after t = b - u^{k+1}, J- after t = (1 + u^{k+1})/b.
double i1_regularized(int k, double a, double b, double tol = default_tol);
double jminus_regularized(int k, double a, double b, double tol = default_tol);

PeriodIntegrals period_integrals(int k, double a, double b, double tol = default_tol);
PeriodIntegrals period_integrals(const Params& p, double tol = default_tol);

enum class EtaMark { MinusInf, Zero, S, One, PlusInf };
// Integral of dt / sqrt|t (t-1) (t-s)| between two marks.
double eta_integral(double s, EtaMark from, EtaMark to, double tol = default_tol);

// The real number whose vanishing the horizontal period would require.
double obstruction_value(const Params& p, double tol = default_tol);

} // namespace pforge

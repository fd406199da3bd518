#pragma once
// Independent reference computations for the tests. Nothing here calls the
// quadrature or continuation code of the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

inline double beta(double x, double y) { return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y)); }

// Romberg on a smooth integrand over [lo, hi].
inline double romberg(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13,
                      int max_levels = 22) {
    std::vector<double> prev, cur;
    double h = hi - lo;
    prev.push_back(0.5 * h * (f(lo) + f(hi)));
    for (int i = 1; i <= max_levels; ++i) {
        h *= 0.5;
        double s = 0;
        long n = 1L << (i - 1);
        for (long j = 0; j < n; ++j) s += f(lo + (2 * j + 1) * h);
        cur.assign(i + 1, 0);
        cur[0] = 0.5 * prev[0] + h * s;
        double p4 = 1;
        for (int m = 1; m <= i; ++m) {
            p4 *= 4;
            cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (p4 - 1);
        }
        if (i >= 5 && std::abs(cur[i] - prev[i - 1]) <= tol * std::max(1.0, std::abs(cur[i]))) return cur[i];
        prev.swap(cur);
    }
    return prev.back();
}

// Integral over (lo, hi) of f, singular like a power at either end: the
// substitution t = lo + (hi - lo) x(s) with x = sin^2(pi s / 2) raised
// through x -> x^M / (x^M + (1-x)^M) flattens both ends before Romberg.
// Offsets of t from both ends, known without cancellation.
struct EndPoint {
    double t, lo, hi, dl, dr;
    // t - c, exact when c is one of the ends
    double minus(double c) const { return c == lo ? dl : c == hi ? -dr : t - c; }
};

inline double endpoint_integral_ends(const std::function<double(const EndPoint&)>& f, double lo, double hi, int M) {
    auto g = [&](double s) {
        if (s <= 0 || s >= 1) return 0.0;
        double x0 = std::sin(0.5 * pi * s);
        x0 *= x0;
        double dx0 = 0.5 * pi * std::sin(pi * s); // d/ds sin^2(pi s/2)
        double pm = std::pow(x0, M), qm = std::pow(1 - x0, M);
        double den = pm + qm;
        double x = pm / den;
        double dx = M * std::pow(x0 * (1 - x0), M - 1) / (den * den) * dx0;
        double dl = (hi - lo) * x, dr = (hi - lo) * qm / den;
        if (dl == 0 || dr == 0) return 0.0; // underflowed onto an integrable end
        double t = dl < dr ? lo + dl : hi - dr;
        return f(EndPoint{t, lo, hi, dl, dr}) * (hi - lo) * dx;
    };
    return romberg(g, 0.0, 1.0);
}

inline double endpoint_integral(const std::function<double(double)>& f, double lo, double hi, int M) {
    return endpoint_integral_ends([&](const EndPoint& e) {
        if (e.t <= lo || e.t >= hi) return 0.0; // rounded onto an end
        return f(e.t);
    }, lo, hi, M);
}

// The closed-form integrands of the period equations, straight from their
// displayed definitions (absolute values on the reciprocal interval).
inline double j_form(int k, double a, double b, const EndPoint& e) {
    const double n = 2.0 * k + 2, q = double(k) / (k + 1);
    auto d = [&](double c) { return std::abs(e.minus(c)); };
    // |1 - c t| = c |t - 1/c|
    double num = std::pow(d(0), 1 / n) * std::pow(d(b) / (b * d(1 / b)), q);
    double den = std::pow(a * d(1 / a), 1 / n) * std::pow(d(a), (2 * k + 1) / n);
    return num / den;
}
inline double i1_form(int k, double a, double b, const EndPoint& e) {
    const double n = 2.0 * k + 2, q = double(k) / (k + 1);
    auto d = [&](double c) { return std::abs(e.minus(c)); };
    double t = e.t;
    double num = std::pow(b * d(1 / b) / d(b), q) / t;
    double den = std::pow(t * d(a), 1 / n) * std::pow(a * d(1 / a), (2 * k + 1) / n);
    return num / den;
}

struct Periods {
    double I0, I1, J0, Jplus, Jminus;
};
inline Periods periods(int k, double a, double b) {
    const int M = 4 * (k + 1);
    auto jf = [=](const EndPoint& t) { return j_form(k, a, b, t); };
    auto if1 = [=](const EndPoint& t) { return i1_form(k, a, b, t); };
    Periods P;
    P.J0 = endpoint_integral_ends(jf, 0, a, M);
    P.Jplus = endpoint_integral_ends(jf, a, b, M);
    P.Jminus = endpoint_integral_ends(jf, 1 / b, 1 / a, M);
    P.I0 = P.Jplus;
    P.I1 = endpoint_integral_ends(if1, a, b, M);
    return P;
}

// Complete elliptic integral K(m) by the arithmetic-geometric mean.
inline double ellip_k(double m) {
    double x = 1, y = std::sqrt(1 - m);
    for (int i = 0; i < 60 && std::abs(x - y) > 1e-16 * x; ++i) {
        double nx = 0.5 * (x + y);
        y = std::sqrt(x * y);
        x = nx;
    }
    return pi / (2 * x);
}
// k = 1: int_{-inf}^0 a beta dt / sqrt|t (t-a)(at-1)| = 1.
// eta = dt / sqrt|t (t-1)(t-s)|: t = s sin^2 phi on (0,s) and the
// Moebius images of the other segments all reduce to 2 K.
inline double eta_0s(double s) { return 2 * ellip_k(s); }
inline double eta_s1(double s) { return 2 * ellip_k(1 - s); }
inline double eta_1inf(double s) { return 2 * ellip_k(s); }
inline double eta_minf0(double s) { return 2 * ellip_k(1 - s); }

inline double b0_beta_k1(double a) { return 1 / (2 * a * ellip_k(1 - a * a)); }

// R(z) of CaseVIII, straight from its product form.
inline cd rhs_viii(double a, double b, cd z) {
    return (b * b / a) * z * (z - a) * (z - 1 / b) * (z - 1 / b) / ((z - 1 / a) * (z - b) * (z - b));
}

// Fine-step nearest-root continuation of u^N = R(z) along a polyline; the
// N candidate roots come from the polar form of R.
inline cd continue_root(double a, double b, int N, const std::vector<cd>& path, cd u0, int steps_per_leg = 4000) {
    cd u = u0;
    for (size_t l = 0; l + 1 < path.size(); ++l)
        for (int s = 1; s <= steps_per_leg; ++s) {
            cd z = path[l] + (path[l + 1] - path[l]) * (double(s) / steps_per_leg);
            cd R = rhs_viii(a, b, z);
            double m = std::pow(std::abs(R), 1.0 / N), th = std::arg(R);
            cd best;
            double bd = INFINITY;
            for (int j = 0; j < N; ++j) {
                cd c = std::polar(m, (th + 2 * pi * j) / N);
                if (std::abs(c - u) < bd) bd = std::abs(c - u), best = c;
            }
            u = best;
        }
    return u;
}

// |g dh| / |dt| on the real axis: |dh| = a|b0| / sqrt|t(t-a)(at -+ 1)| (plus
// for CaseI), |g| = |t| / |R|^{k/(2k+2)} with R read off each family's divisor.
enum class Fam { I, V, VI };
inline double abs_g_dh(Fam f, int k, double a, double b, double beta, const EndPoint& e) {
    const double n = 2.0 * k + 2, t = e.t;
    auto d = [&](double c) { return std::abs(e.minus(c)); };
    double R = (b * b / a) * d(0) * d(a);
    double cubic;
    switch (f) {
    case Fam::I:
        R *= std::pow(d(-1 / b), 2) / (d(-1 / a) * std::pow(d(b), 2));
        cubic = d(0) * d(a) * a * d(-1 / a);
        break;
    case Fam::V:
        R *= std::pow(d(1 / b), 2) / (d(1 / a) * std::pow(d(b), 2));
        cubic = d(0) * d(a) * a * d(1 / a);
        break;
    case Fam::VI:
    default:
        R *= std::pow(d(-1 / b), 2) / (d(1 / a) * std::pow(d(-b), 2));
        cubic = d(0) * d(a) * a * d(1 / a);
        break;
    }
    return std::abs(t) / std::pow(R, k / n) * a * beta / std::sqrt(cubic);
}

} // namespace oracle

#include "pforge/quadrature.hpp"

#include "pforge/error.hpp"
#include "pforge/tanh_sinh.hpp"
#include "pforge/weierstrass.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace pforge {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

void check_integrand(const SingularIntegrand& f) {
    if (!(f.lo < f.hi) || !std::isfinite(f.lo) || !std::isfinite(f.hi))
        throw Error(Errc::QuadratureFailure, "integration interval must be finite and non-empty");
    for (double e : {f.left_exponent, f.right_exponent})
        if (!(e > -1 && e < 1)) throw Error(Errc::QuadratureFailure, "endpoint exponent outside (-1, 1)");
    if (!f.core) throw Error(Errc::QuadratureFailure, "missing core");
}

bool same_point(double x, double c) { return std::abs(x - c) <= 1e-14 * std::max(1.0, std::abs(c)); }

} // namespace

QuadResult integrate_singular_detail(const SingularIntegrand& f, double tol, int max_levels) {
    check_integrand(f);
    const double al = f.left_exponent, ar = f.right_exponent;
    auto term = [&](const DeNode& nd) {
        double lw = nd.log_w - al * nd.log_dl - ar * nd.log_dr;
        if (lw < -745) return 0.0;
        double v = f.core(nd.x) * std::exp(lw);
        return v;
    };
    auto out = tanh_sinh(f.lo, f.hi, term, tol, max_levels, [](double x) { return std::abs(x); }, 0.0);
    if (!std::isfinite(out.value)) throw Error(Errc::QuadratureFailure, "non-finite integrand value");
    if (!out.converged) throw Error(Errc::NoConvergence, "tanh-sinh did not settle within the level budget");
    return {out.value, out.levels, out.last_change};
}

double integrate_singular(const SingularIntegrand& f, double tol) { return integrate_singular_detail(f, tol).value; }

void gauss_jacobi_rule(int n, double alpha, double beta, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw Error(Errc::QuadratureFailure, "rule size must be positive");
    // Golub-Welsch on the Jacobi matrix of the monic recurrence.
    Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
    const double ab = alpha + beta;
    for (int i = 0; i < n; ++i) {
        double s = 2.0 * i + ab;
        diag(i) = (i == 0) ? (beta - alpha) / (ab + 2) : (beta * beta - alpha * alpha) / (s * (s + 2));
    }
    for (int i = 1; i < n; ++i) {
        double s = 2.0 * i + ab;
        double v;
        if (i == 1) v = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
        else v = 4 * i * (i + alpha) * (i + beta) * (i + ab) / (s * s * (s + 1) * (s - 1));
        off(i - 1) = std::sqrt(v);
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) J(i, i) = diag(i);
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = off(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(alpha + 1) + std::lgamma(beta + 1) -
                          std::lgamma(ab + 2));
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        w[i] = mu0 * v0 * v0;
    }
}

namespace {
struct RuleCache {
    std::mutex mu;
    std::map<std::tuple<int, double, double>, std::pair<std::vector<double>, std::vector<double>>> rules;
};
RuleCache& rule_cache() {
    static RuleCache c;
    return c;
}
} // namespace

double integrate_gauss_jacobi(const SingularIntegrand& f, int n) {
    check_integrand(f);
    // weight (1-x)^alpha (1+x)^beta: alpha belongs to the right end.
    double alpha = -f.right_exponent, beta = -f.left_exponent;
    std::vector<double> x, w;
    {
        RuleCache& c = rule_cache();
        std::lock_guard<std::mutex> lock(c.mu);
        auto key = std::make_tuple(n, alpha, beta);
        auto it = c.rules.find(key);
        if (it == c.rules.end()) {
            gauss_jacobi_rule(n, alpha, beta, x, w);
            c.rules.emplace(key, std::make_pair(x, w));
        } else {
            x = it->second.first;
            w = it->second.second;
        }
    }
    double half = 0.5 * (f.hi - f.lo);
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += w[i] * f.core(f.lo + half * (1 + x[i]));
    return std::pow(half, 1 + alpha + beta) * sum;
}

double integrate_gauss_jacobi_adaptive(const SingularIntegrand& f, double tol) {
    double prev = integrate_gauss_jacobi(f, 16);
    for (int n = 32; n <= 1024; n *= 2) {
        double cur = integrate_gauss_jacobi(f, n);
        if (std::abs(cur - prev) <= std::max(tol, tol * std::abs(cur))) return cur;
        prev = cur;
    }
    throw Error(Errc::NoConvergence, "Gauss-Jacobi rules did not settle");
}

PowerProduct& PowerProduct::times(double c, double e) {
    for (auto& [cc, ee] : f_) {
        if (same_point(c, cc)) {
            ee += e;
            return *this;
        }
    }
    f_.emplace_back(c, e);
    return *this;
}

double PowerProduct::operator()(double t) const {
    double v = scale_;
    for (auto [c, e] : f_)
        if (e != 0) v *= std::pow(std::abs(t - c), e);
    return v;
}

SingularIntegrand PowerProduct::on(double lo, double hi) const {
    SingularIntegrand s;
    s.lo = lo;
    s.hi = hi;
    std::vector<std::pair<double, double>> core;
    for (auto [c, e] : f_) {
        if (std::abs(e) < 1e-15) continue;
        bool at_lo = same_point(lo, c), at_hi = same_point(hi, c);
        if (at_lo && e < 1) s.left_exponent = -e;
        else if (at_hi && e < 1) s.right_exponent = -e;
        else if (!at_lo && !at_hi && c > lo && c < hi)
            throw Error(Errc::QuadratureFailure, "singular point inside the integration interval");
        else core.emplace_back(c, e);
    }
    double scale = scale_;
    s.core = [scale, core](double t) {
        double acc = 0;
        for (auto [c, e] : core) acc += e * std::log(std::abs(t - c));
        return scale * std::exp(acc);
    };
    return s;
}

PowerProduct PowerProduct::inverted() const {
    PowerProduct out(scale_);
    double s_power = -2;
    for (auto [c, e] : f_) {
        s_power -= e;
        if (c != 0) {
            out.scale_ *= std::pow(std::abs(c), e);
            out.times(1 / c, e);
        }
    }
    out.times(0.0, s_power);
    return out;
}

PowerProduct PowerProduct::affine(double lo, double hi) const {
    double len = hi - lo;
    PowerProduct out(scale_ * len);
    for (auto [c, e] : f_) {
        out.scale_ *= std::pow(len, e);
        out.times((c - lo) / len, e);
    }
    return out;
}

double integrate_power(const PowerProduct& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw Error(Errc::QuadratureFailure, "empty interval");
    if (std::isfinite(lo) && std::isfinite(hi)) return integrate_singular(f.on(lo, hi), tol);
    if (lo == -inf && hi == inf) return integrate_power(f, lo, 0.0, tol) + integrate_power(f, 0.0, hi, tol);
    if (hi == inf) {
        if (lo > 0) return integrate_singular(f.inverted().on(0.0, 1 / lo), tol);
        double t = std::max(lo + 1, 1.0);
        return integrate_singular(f.on(lo, t), tol) + integrate_singular(f.inverted().on(0.0, 1 / t), tol);
    }
    if (hi < 0) return integrate_singular(f.inverted().on(1 / hi, 0.0), tol);
    double t = std::min(hi - 1, -1.0);
    return integrate_singular(f.on(t, hi), tol) + integrate_singular(f.inverted().on(1 / t, 0.0), tol);
}

PowerProduct j_integrand(int k, double a, double b) {
    const double n = 2.0 * k + 2, q = double(k) / (k + 1);
    PowerProduct f(std::pow(b, -q) * std::pow(a, -1 / n));
    f.times(0.0, 1 / n).times(b, q).times(1 / b, -q).times(1 / a, -1 / n).times(a, -(2 * k + 1) / n);
    return f;
}

PowerProduct i1_integrand(int k, double a, double b) {
    const double n = 2.0 * k + 2, q = double(k) / (k + 1);
    PowerProduct f(std::pow(b, q) * std::pow(a, -(2 * k + 1) / n));
    f.times(1 / b, q).times(b, -q).times(0.0, -1 - 1 / n).times(a, -1 / n).times(1 / a, -(2 * k + 1) / n);
    return f;
}

double j0_integral(int k, double a, double b, double tol) { return integrate_power(j_integrand(k, a, b), 0, a, tol); }
double jplus_integral(int k, double a, double b, double tol) { return integrate_power(j_integrand(k, a, b), a, b, tol); }
double jminus_integral(int k, double a, double b, double tol) {
    return integrate_power(j_integrand(k, a, b), 1 / b, 1 / a, tol);
}
double i0_integral(int k, double a, double b, double tol) { return integrate_power(j_integrand(k, a, b), a, b, tol); }
double i1_integral(int k, double a, double b, double tol) { return integrate_power(i1_integrand(k, a, b), a, b, tol); }

double jplus_affine(int k, double a, double b, double tol) {
    return integrate_power(j_integrand(k, a, b).affine(a, b), 0.0, 1.0, tol);
}

namespace {
// sum_{j=0}^{k} U^j u^{k-j} = (U^{k+1} - u^{k+1}) / (U - u)
double geometric_sum(double U, double u, int k) {
    double s = 0, p = 1;
    for (int j = 0; j <= k; ++j) {
        s += p * std::pow(u, k - j);
        p *= U;
    }
    return s;
}
} // namespace

double i1_regularized(int k, double a, double b, double tol) {
    const double n = 2.0 * k + 2, q = double(k) / (k + 1);
    const double U = std::pow(b - a, 1.0 / (k + 1));
    SingularIntegrand s;
    s.lo = 0;
    s.hi = U;
    s.right_exponent = 1 / n;
    s.core = [=](double u) {
        double uk1 = std::pow(u, k + 1);
        double t = b - uk1;
        return (k + 1) * std::pow(1 - b * t, q) * std::pow(t, -1 - 1 / n) *
               std::pow(geometric_sum(U, u, k), -1 / n) * std::pow(1 - a * t, -(2 * k + 1) / n);
    };
    return integrate_singular(s, tol);
}

double jminus_regularized(int k, double a, double b, double tol) {
    const double n = 2.0 * k + 2, q = double(k) / (k + 1);
    const double V = std::pow(b / a - 1, 1.0 / (k + 1));
    SingularIntegrand s;
    s.lo = 0;
    s.hi = V;
    s.right_exponent = 1 / n;
    s.core = [=](double u) {
        double uk1 = std::pow(u, k + 1);
        double t = (1 + uk1) / b;
        double t_minus_b = (1 - b * b) / b + uk1 / b;
        return ((k + 1) / b) * std::pow(t, 1 / n) * std::pow(t_minus_b, q) *
               std::pow((a / b) * geometric_sum(V, u, k), -1 / n) * std::pow(t - a, -(2 * k + 1) / n);
    };
    return integrate_singular(s, tol);
}

PeriodIntegrals period_integrals(int k, double a, double b, double tol) {
    PeriodIntegrals r;
    r.I0 = i0_integral(k, a, b, tol);
    r.I1 = i1_integral(k, a, b, tol);
    r.J0 = j0_integral(k, a, b, tol);
    r.Jplus = jplus_affine(k, a, b, tol);
    r.Jminus = jminus_integral(k, a, b, tol);
    r.J1 = r.Jplus + r.Jminus;
    return r;
}

PeriodIntegrals period_integrals(const Params& p, double tol) {
    if (p.family != Family::CaseVIII) throw Error(Errc::WrongFamily, "period integrals are for CaseVIII");
    return period_integrals(p.k, p.a, p.b, tol);
}

double eta_integral(double s, EtaMark from, EtaMark to, double tol) {
    auto val = [s](EtaMark m) {
        switch (m) {
        case EtaMark::MinusInf: return -inf;
        case EtaMark::Zero: return 0.0;
        case EtaMark::S: return s;
        case EtaMark::One: return 1.0;
        case EtaMark::PlusInf: return inf;
        }
        return 0.0;
    };
    double lo = val(from), hi = val(to);
    if (!(lo < hi)) throw Error(Errc::QuadratureFailure, "eta segment must be increasing");
    PowerProduct f(1.0);
    f.times(0.0, -0.5).times(1.0, -0.5).times(s, -0.5);
    return integrate_power(f, lo, hi, tol);
}

namespace {

// |g dh| / |dz| on the real axis as a power product in t.
PowerProduct abs_g_dh(const Params& p) {
    CoverShape s = cover_shape(p);
    const double n = p.n(), k = p.k;
    PowerProduct f(std::pow(s.lead, -k / n) * p.a * p.b0.imag() / std::sqrt(s.radicand_lead));
    f.times(0.0, 1.0);
    for (const Factor& fc : s.r) f.times(fc.c, -k * fc.e / n);
    for (double r : s.radicand) f.times(r, -0.5);
    return f;
}

// Re int over (lo, hi) of rot * g dh, using that the phase of g dh is
// constant on a real interval free of branch points.
double real_part_on(const Params& p, double lo, double hi, cd rot, double tol) {
    PowerProduct f = abs_g_dh(p);
    double phase = 0;
    for (int i = 0; i < 3; ++i) {
        double t = lo + (hi - lo) * (0.2 + 0.3 * i);
        cd v = rot * domain_products(p, cd(t, 0.0)).g_dh;
        double ph = std::arg(v);
        if (std::abs(std::abs(v) - f(t)) > 1e-8 * f(t))
            throw Error(Errc::QuadratureFailure, "|g dh| closed form disagrees with the branch");
        if (i == 0) phase = ph;
        else if (std::abs(std::remainder(ph - phase, 2 * pi)) > 1e-8)
            throw Error(Errc::QuadratureFailure, "phase of g dh not constant on the interval");
    }
    return std::cos(phase) * integrate_power(f, lo, hi, tol);
}

} // namespace

double obstruction_value(const Params& p0, double tol) {
    Params p = p0.b0 == cd(0, 0) ? normalize_b0(p0) : p0;
    const double a = p.a, b = p.b;
    cd tilde = rotation_factor(p.k, Rotation::Tilde);
    switch (p.family) {
    case Family::CaseI: return real_part_on(p, -1 / b, -1 / a, tilde, tol) + real_part_on(p, 0, b, tilde, tol);
    case Family::CaseVI: return real_part_on(p, -b, 0, 1.0, tol);
    case Family::CaseV: return real_part_on(p, 0, 1 / a, tilde, tol);
    case Family::CaseVIII: break;
    }
    throw Error(Errc::WrongFamily, "CaseVIII has no obstruction; its period problem is solvable");
}

} // namespace pforge

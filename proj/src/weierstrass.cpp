#include "pforge/weierstrass.hpp"

#include "pforge/error.hpp"
#include "pforge/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pforge {

namespace {

constexpr double pi = std::numbers::pi;
const cd I(0.0, 1.0);

cd m_factor(const CoverShape& s, cd z0, cd dz) {
    cd m = s.m_lead;
    for (const Factor& f : s.m) {
        cd d = (z0 - f.c) + dz;
        m *= f.e > 0 ? d : 1.0 / d;
    }
    return m;
}

void require_viii(const Params& p) {
    if (p.family != Family::CaseVIII) throw Error(Errc::WrongFamily, "boundary data are defined for CaseVIII");
}

} // namespace

const char* stretch_name(BoundaryStretch s) {
    switch (s) {
    case BoundaryStretch::I_0a: return "I_0a";
    case BoundaryStretch::I_ab: return "I_ab";
    case BoundaryStretch::I_b1: return "I_b1";
    case BoundaryStretch::Arc: return "Arc";
    case BoundaryStretch::I_m10: return "I_m10";
    }
    return "?";
}

cd rotation_factor(int k, Rotation r) {
    double n = 2.0 * k + 2;
    return std::polar(1.0, r == Rotation::Tilde ? -pi / n : -pi * k / n);
}

cd gauss_map(const Params& p, const SurfacePoint& pt) {
    if (pt.u == cd(0, 0)) return cd(std::numeric_limits<double>::infinity(), 0);
    return pt.zvalue() / std::pow(pt.u, p.k);
}

cd height_coeff(const Params& p, const SurfacePoint& pt) {
    if (pt.u == cd(0, 0)) throw Error(Errc::BranchPoint, "dh is singular where u = 0");
    CoverShape s = cover_shape(p);
    cd m = m_factor(s, pt.zvalue(), 0.0);
    return s.eps * p.a * p.b0 * m / std::pow(pt.u, p.k + 1);
}

namespace {
cd nearest_sheet(const Params& p, cd z, cd seed) {
    std::vector<cd> roots = sheet_values(p, z);
    return *std::min_element(roots.begin(), roots.end(),
                             [&](cd x, cd y) { return std::abs(x - seed) < std::abs(y - seed); });
}

FormsValue assemble(cd g_dh, cd dh_over_g, cd dh, cd g) {
    FormsValue f;
    f.phi1 = 0.5 * (dh_over_g - g_dh);
    f.phi2 = 0.5 * I * (dh_over_g + g_dh);
    f.phi3 = dh;
    f.g = g;
    f.dh_coeff = dh;
    return f;
}
} // namespace

cd height_coeff(const Params& p, cd z, cd branch_seed) {
    return height_coeff(p, SurfacePoint{z, nearest_sheet(p, z, branch_seed), Chart::Finite});
}

FormsValue phi_forms(const Params& p, const SurfacePoint& pt) {
    cd z = pt.zvalue();
    if (pt.u == cd(0, 0) || z == cd(0, 0) || !std::isfinite(std::abs(z)))
        throw Error(Errc::VerticalNormal, "forms requested where g is 0 or infinite");
    CoverShape s = cover_shape(p);
    cd base = s.eps * p.a * p.b0 * m_factor(s, z, 0.0);
    cd dh = base / std::pow(pt.u, p.k + 1);
    cd g_dh = base * z / std::pow(pt.u, 2 * p.k + 1);
    cd dh_over_g = base / (z * pt.u);
    return assemble(g_dh, dh_over_g, dh, gauss_map(p, pt));
}

FormsValue phi_forms(const Params& p, cd z, cd branch_seed) {
    return phi_forms(p, SurfacePoint{z, nearest_sheet(p, z, branch_seed), Chart::Finite});
}

ProductForms domain_products(const Params& p, cd z0, cd dz) {
    CoverShape s = cover_shape(p);
    cd z = z0 + dz;
    cd u = upper_branch_u(p, z0, dz);
    cd base = s.eps * p.a * p.b0 * m_factor(s, z0, dz);
    cd uk = std::pow(u, p.k);
    ProductForms out;
    out.dh = base / (uk * u);
    out.g_dh = base * z / (uk * uk * u);
    out.dh_over_g = base / (z * u);
    return out;
}

FormsValue domain_forms(const Params& p, cd z0, cd dz) {
    ProductForms pr = domain_products(p, z0, dz);
    cd z = z0 + dz;
    cd u = upper_branch_u(p, z0, dz);
    cd g = u == cd(0, 0) ? cd(std::numeric_limits<double>::infinity(), 0) : z / std::pow(u, p.k);
    return assemble(pr.g_dh, pr.dh_over_g, pr.dh, g);
}

cd stretch_point(BoundaryStretch s, double t) {
    return s == BoundaryStretch::Arc ? std::polar(1.0, t) : cd(t, 0.0);
}

std::pair<cd, cd> boundary_forms(const Params& p, BoundaryStretch s, double t, Rotation r) {
    require_viii(p);
    const double a = p.a, b = p.b, k = p.k, n = 2.0 * p.k + 2, q = k / (k + 1);
    const double beta = p.b0.imag();
    double lo = 0, hi = 0;
    switch (s) {
    case BoundaryStretch::I_0a: lo = 0, hi = a; break;
    case BoundaryStretch::I_ab: lo = a, hi = b; break;
    case BoundaryStretch::I_b1: lo = b, hi = 1; break;
    case BoundaryStretch::Arc: lo = 0, hi = pi; break;
    case BoundaryStretch::I_m10: lo = -1, hi = 0; break;
    }
    if (!(t >= lo && t <= hi)) throw Error(Errc::OutOfStretch, "parameter outside the stretch");

    cd ghat, dh;
    if (s == BoundaryStretch::Arc) {
        // z = e^{it}: |z - c| and arg(z - c) in closed form.
        double ct = std::cos(t), st = std::sin(t);
        auto mod = [&](double c) { return std::sqrt(1 - 2 * c * ct + c * c); };
        auto ang = [&](double c) { return std::atan2(st, ct - c); };
        double log_u = std::log(b * b / a) / n + (std::log(mod(0)) + std::log(mod(a)) + 2 * std::log(mod(1 / b)) -
                                                   std::log(mod(1 / a)) - 2 * std::log(mod(b))) / n;
        double arg_u = (ang(0) + ang(a) + 2 * ang(1 / b) - ang(1 / a) - 2 * ang(b)) / n;
        double g_mod = std::exp(-k * log_u);
        double g_arg = t - k * arg_u;
        ghat = std::polar(g_mod, g_arg - pi * k / n);
        double m_mod = (b / a) * mod(1 / b) / (mod(1 / a) * mod(b));
        double m_arg = ang(1 / b) - ang(1 / a) - ang(b);
        dh = std::polar(a * beta * m_mod * std::exp(-(k + 1) * log_u), pi / 2 + m_arg - (k + 1) * arg_u);
    } else {
        double at = std::abs(t);
        double g_mod = std::pow(at, (k + 2) / n) * std::pow(std::abs((1 - a * t) / (t - a)), k / n) *
                       std::pow(std::abs((b - t) / (1 - b * t)), q);
        double dh_mod = a * beta / std::sqrt(std::abs(t * (t - a) * (1 - a * t)));
        double g_arg = 0, dh_arg = 0;
        switch (s) {
        case BoundaryStretch::I_0a: g_arg = -pi * k / n, dh_arg = -pi / 2; break;
        case BoundaryStretch::I_ab: g_arg = 0, dh_arg = 0; break;
        case BoundaryStretch::I_b1: g_arg = -2 * pi * k / n, dh_arg = 0; break;
        case BoundaryStretch::I_m10: g_arg = 2 * pi / n, dh_arg = pi; break;
        case BoundaryStretch::Arc: break;
        }
        ghat = std::polar(g_mod, g_arg);
        dh = std::polar(dh_mod, dh_arg);
    }
    // hat g = e^{-i pi k/n} g, tilde g = e^{-i pi/n} g = e^{i pi (k-1)/n} hat g.
    cd g = r == Rotation::Hat ? ghat : ghat * std::polar(1.0, pi * (k - 1) / n);
    return {g, dh};
}

cd dg_over_g(const Params& p, cd z) {
    return 1.0 / z - (double(p.k) / p.n()) * log_derivative(p, z);
}

double gaussian_curvature(const Params& p, const SurfacePoint& pt) {
    cd z = pt.zvalue();
    if (z == cd(0, 0) || !std::isfinite(std::abs(z))) throw Error(Errc::EndPoint, "curvature at an end");
    double gm = std::abs(gauss_map(p, pt));
    cd dh = height_coeff(p, pt);
    double ratio = std::abs(dg_over_g(p, z) / dh);
    double t = gm / (1 + gm * gm); // (|g| + 1/|g|)^{-1}
    double K = -16 * std::pow(t, 4) * ratio * ratio;
    if (!std::isfinite(K)) throw Error(Errc::EndPoint, "curvature undefined at this point");
    return K;
}

double domain_curvature(const Params& p, cd z) {
    if (z == cd(0, 0)) throw Error(Errc::EndPoint, "curvature at an end");
    cd u = upper_branch_u(p, z);
    return gaussian_curvature(p, SurfacePoint{z, u, Chart::Finite});
}

Params normalize_b0(const Params& p) {
    CoverShape s = cover_shape(p);
    std::vector<double> cuts;
    PowerProduct f(1 / std::sqrt(s.radicand_lead));
    for (double r : s.radicand) {
        f.times(r, -0.5);
        if (r < 0) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    double lo = -std::numeric_limits<double>::infinity();
    double total = 0;
    for (double c : cuts) {
        total += integrate_power(f, lo, c);
        lo = c;
    }
    total += integrate_power(f, lo, 0.0);
    Params out = p;
    out.b0 = cd(0.0, 1.0 / (p.a * total));
    return out;
}

std::vector<cd> dg_zero_sites(const Params& p) {
    CoverShape s = cover_shape(p);
    const double kn = double(p.k) / p.n();
    // Polynomials as coefficient vectors, lowest degree first.
    using Poly = std::vector<double>;
    auto mul = [](const Poly& x, const Poly& y) {
        Poly r(x.size() + y.size() - 1, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
        return r;
    };
    auto add = [](Poly x, const Poly& y, double c) {
        if (x.size() < y.size()) x.resize(y.size(), 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) x[i] += c * y[i];
        return x;
    };
    std::vector<Factor> rest;
    double e0 = 0;
    for (const Factor& f : s.r) {
        if (f.c == 0) e0 = f.e;
        else rest.push_back(f);
    }
    Poly all{1.0};
    for (const Factor& f : rest) all = mul(all, Poly{-f.c, 1.0});
    Poly num = add(Poly{}, all, 1 - kn * e0);
    for (std::size_t j = 0; j < rest.size(); ++j) {
        Poly term{0.0, 1.0};
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (i != j) term = mul(term, Poly{-rest[i].c, 1.0});
        num = add(num, term, -kn * rest[j].e);
    }
    while (num.size() > 1 && std::abs(num.back()) < 1e-300) num.pop_back();
    int deg = int(num.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -num[i] / num[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<cd> roots;
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
    // Newton polish on the rational function itself.
    for (cd& z : roots) {
        for (int it = 0; it < 4; ++it) {
            cd f = dg_over_g(p, z);
            cd df = -1.0 / (z * z);
            for (const Factor& fc : s.r) df += kn * fc.e / ((z - fc.c) * (z - fc.c));
            cd step = f / df;
            if (!std::isfinite(std::abs(step))) break;
            z -= step;
        }
    }
    std::sort(roots.begin(), roots.end(), [](cd x, cd y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return roots;
}

} // namespace pforge

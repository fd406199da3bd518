#include "pforge/surface.hpp"

#include "pforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pforge {

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre 8-point rule on [-1, 1].
constexpr std::array<double, 8> gl_x = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_w = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

std::vector<cd> roots_of(cd r, int n) {
    double rho = std::pow(std::abs(r), 1.0 / n);
    double th = std::arg(r);
    std::vector<cd> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
        double ang = (th + 2 * pi * j) / n;
        ang = std::remainder(ang, 2 * pi);
        if (ang <= -pi) ang += 2 * pi;
        out.push_back(std::polar(rho, ang));
    }
    std::sort(out.begin(), out.end(), [](cd x, cd y) { return std::arg(x) < std::arg(y); });
    return out;
}

// R evaluated in whichever chart is better conditioned.
cd rhs_any(const Params& p, cd x, bool w_space) {
    cd z = w_space ? 1.0 / x : x;
    if (std::abs(z) > 5.0) return defining_rhs_w(p, w_space ? x : 1.0 / x);
    return defining_rhs(p, z);
}

} // namespace

const char* family_name(Family f) {
    switch (f) {
    case Family::CaseI: return "CaseI";
    case Family::CaseV: return "CaseV";
    case Family::CaseVI: return "CaseVI";
    case Family::CaseVIII: return "CaseVIII";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    for (Family f : {Family::CaseI, Family::CaseV, Family::CaseVI, Family::CaseVIII})
        if (s == family_name(f)) return f;
    throw Error(Errc::RangeViolation, "unknown family " + s);
}

Params make_params(Family family, int k, double a, double b) {
    if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1");
    bool ok = std::isfinite(a) && std::isfinite(b);
    switch (family) {
    case Family::CaseVIII: ok = ok && 0 < a && a < b && b < 1; break;
    case Family::CaseV: ok = ok && 1 < b && b < a; break;
    case Family::CaseVI: ok = ok && 0 < a && a < 1 && 0 < b && b < 1; break;
    case Family::CaseI: ok = ok && a > 0 && 0 < b && b < a; break;
    }
    if (!ok) throw Error(Errc::RangeViolation, std::string("moduli outside the region of ") + family_name(family));
    Params p;
    p.family = family;
    p.k = k;
    p.a = a;
    p.b = b;
    return p;
}

Moduli recover_moduli(const Params& p) {
    double a = p.a, b = p.b;
    switch (p.family) {
    case Family::CaseVIII:
    case Family::CaseV: return {1 / (a * a), b / a, 1 / (a * b)};
    case Family::CaseVI: return {1 / (a * a), -b / a, -1 / (a * b)};
    case Family::CaseI: {
        double s = -1 / (a * a), y1 = b / a;
        return {s, y1, s / y1};
    }
    }
    return {0, 0, 0};
}

CoverShape cover_shape(const Params& p) {
    double a = p.a, b = p.b;
    CoverShape s{};
    s.lead = b * b / a;
    s.m_lead = b / a;
    s.radicand_lead = a;
    switch (p.family) {
    case Family::CaseVIII:
    case Family::CaseV:
        s.r = {{{0, 1}, {a, 1}, {1 / b, 2}, {1 / a, -1}, {b, -2}}};
        s.m = {{{1 / b, 1}, {1 / a, -1}, {b, -1}}};
        s.eps = 1;
        s.radicand = {0, a, 1 / a};
        break;
    case Family::CaseVI:
        s.r = {{{0, 1}, {a, 1}, {-1 / b, 2}, {1 / a, -1}, {-b, -2}}};
        s.m = {{{-1 / b, 1}, {1 / a, -1}, {-b, -1}}};
        s.eps = -1;
        s.radicand = {0, a, 1 / a};
        break;
    case Family::CaseI:
        s.r = {{{0, 1}, {a, 1}, {-1 / b, 2}, {-1 / a, -1}, {b, -2}}};
        s.m = {{{-1 / b, 1}, {-1 / a, -1}, {b, -1}}};
        s.eps = 1;
        s.radicand = {0, a, -1 / a};
        break;
    }
    return s;
}

cd defining_rhs(const Params& p, cd z) {
    CoverShape s = cover_shape(p);
    cd r = s.lead;
    for (const Factor& f : s.r) {
        cd d = z - f.c;
        if (f.e < 0 && d == cd(0, 0)) throw Error(Errc::PoleHit, "finite evaluation at a pole of R");
        r *= f.e == 1 ? d : f.e == 2 ? d * d : f.e == -1 ? 1.0 / d : 1.0 / (d * d);
    }
    return r;
}

cd defining_rhs_w(const Params& p, cd w) {
    CoverShape s = cover_shape(p);
    if (w == cd(0, 0)) throw Error(Errc::PoleHit, "R has a pole at infinity");
    cd r = s.lead / w;
    for (const Factor& f : s.r) {
        cd d = 1.0 - f.c * w;
        r *= f.e == 1 ? d : f.e == 2 ? d * d : f.e == -1 ? 1.0 / d : 1.0 / (d * d);
    }
    return r;
}

cd log_derivative(const Params& p, cd z) {
    CoverShape s = cover_shape(p);
    cd acc = 0;
    for (const Factor& f : s.r) acc += double(f.e) / (z - f.c);
    return acc;
}

std::vector<cd> sheet_values(const Params& p, cd z) {
    cd r = defining_rhs(p, z);
    if (r == cd(0, 0) || !std::isfinite(std::abs(r))) throw Error(Errc::BranchPoint, "z is a branch point of R");
    return roots_of(r, p.n());
}

cd upper_branch_u(const Params& p, cd z0, cd dz) {
    CoverShape s = cover_shape(p);
    const double n = p.n();
    double log_mod = std::log(s.lead) / n;
    double phase = 0;
    for (const Factor& f : s.r) {
        cd d = (z0 - f.c) + dz;
        if (d == cd(0, 0)) {
            return f.e > 0 ? cd(0, 0) : cd(std::numeric_limits<double>::infinity(), 0);
        }
        double im = d.imag() > 0 ? d.imag() : 0.0;
        log_mod += f.e * std::log(std::abs(d)) / n;
        phase += f.e * std::atan2(im, d.real()) / n;
    }
    return std::polar(std::exp(log_mod), phase);
}

double residual(const Params& p, const SurfacePoint& pt) {
    cd r = pt.chart == Chart::Finite ? defining_rhs(p, pt.z) : defining_rhs_w(p, pt.z);
    return std::abs(std::pow(pt.u, p.n()) - r) / (1 + std::abs(r));
}

namespace {

struct Tracker {
    const Params& p;
    const ContinuationOptions& opt;
    int n;
    std::vector<cd> branch_z; // finite branch points

    double branch_distance(cd x, bool w_space) const {
        double d = std::numeric_limits<double>::infinity();
        for (cd c : branch_z) {
            if (w_space) {
                if (c == cd(0, 0)) continue; // z = 0 is w = infinity
                d = std::min(d, std::abs(x - 1.0 / c));
            } else {
                d = std::min(d, std::abs(x - c));
            }
        }
        if (w_space) d = std::min(d, std::abs(x)); // z = infinity
        return d;
    }

    // Root of R(x_new) continuing u from (r_old, u_old); returns false when the
    // nearest root is not discriminated.
    bool next_root(cd r_old, cd u_old, cd r_new, cd& u_new) const {
        cd pred = u_old * std::pow(r_new / r_old, 1.0 / n);
        std::vector<cd> roots = roots_of(r_new, n);
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        for (cd r : roots) {
            double d = std::abs(r - pred);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                u_new = r;
            } else if (d < d2) {
                d2 = d;
            }
        }
        return opt.discrimination * d1 <= d2;
    }
};

} // namespace

namespace {

TrackedPath track_path_impl(const Params& p, const PathSpec& path, const ContinuationOptions& opt,
                            bool with_nodes) {
    if (path.vertices.empty()) throw Error(Errc::ContinuationFailure, "empty path");
    if (!(path.max_step > 0)) throw Error(Errc::ContinuationFailure, "max_step must be positive");
    Tracker tr{p, opt, p.n(), {}};
    for (const Factor& f : cover_shape(p).r) tr.branch_z.push_back(f.c);

    auto zval = [](const PathVertex& v) { return v.chart == Chart::Finite ? v.coord : 1.0 / v.coord; };
    {
        const PathVertex& v0 = path.vertices.front();
        SurfacePoint start{v0.coord, path.u_start, v0.chart};
        if (residual(p, start) > 1e-8)
            throw Error(Errc::ContinuationFailure, "u_start does not lie over the first vertex");
    }

    TrackedPath out;
    cd u = path.u_start;
    for (std::size_t seg = 0; seg + 1 < path.vertices.size(); ++seg) {
        const PathVertex& va = path.vertices[seg];
        const PathVertex& vb = path.vertices[seg + 1];
        bool w_space = va.chart == Chart::InfinityChart || vb.chart == Chart::InfinityChart;
        cd x0 = w_space ? 1.0 / zval(va) : zval(va);
        cd x1 = w_space ? 1.0 / zval(vb) : zval(vb);
        double len = std::abs(x1 - x0);
        if (len == 0) continue;
        if (tr.branch_distance(x0, w_space) < opt.exclusion || tr.branch_distance(x1, w_space) < opt.exclusion)
            throw Error(Errc::BranchProximity, "path vertex inside the branch-point exclusion radius");

        double s = 0;
        cd x = x0;
        cd r = rhs_any(p, x, w_space);
        double h = 0;
        while (s < 1) {
            double dist = tr.branch_distance(x, w_space);
            if (dist < opt.exclusion) throw Error(Errc::BranchProximity, "path passes a branch point");
            double limit = std::min(path.max_step, 0.25 * dist) / len;
            h = h == 0 ? limit : std::min(2 * h, limit);
            h = std::min(h, 1 - s);
            // a remainder below min_step is rounding from accumulating s
            if ((1 - s - h) * len < opt.min_step) h = 1 - s;
            cd u_new, x_new, r_new;
            bool last = false;
            for (;;) {
                if (h * len < opt.min_step) throw Error(Errc::StepFailure, "continuation step underflow");
                last = h == 1 - s;
                x_new = last ? x1 : x0 + (s + h) * (x1 - x0);
                if (tr.branch_distance(x_new, w_space) < opt.exclusion)
                    throw Error(Errc::BranchProximity, "path passes a branch point");
                r_new = rhs_any(p, x_new, w_space);
                if (tr.next_root(r, u, r_new, u_new)) break;
                h *= 0.5;
            }
            if (with_nodes) {
                cd dx = x_new - x;
                for (int j = 0; j < 8; ++j) {
                    cd xj = x + 0.5 * (1 + gl_x[j]) * dx;
                    cd rj = rhs_any(p, xj, w_space);
                    cd uj;
                    if (!tr.next_root(r, u, rj, uj))
                        throw Error(Errc::StepFailure, "quadrature node not discriminated");
                    PathNode node;
                    cd zj = w_space ? 1.0 / xj : xj;
                    if (std::abs(zj) > 5.0) node.pt = {1.0 / zj, uj, Chart::InfinityChart};
                    else node.pt = {zj, uj, Chart::Finite};
                    node.dz = 0.5 * gl_w[j] * dx;
                    if (w_space) node.dz *= -1.0 / (xj * xj);
                    out.max_residual = std::max(out.max_residual, residual(p, node.pt));
                    out.nodes.push_back(node);
                }
            }
            s = last ? 1 : s + h;
            x = x_new;
            r = r_new;
            u = u_new;
        }
    }
    out.u_end = u;
    return out;
}

} // namespace

TrackedPath track_path(const Params& p, const PathSpec& path, const ContinuationOptions& opt) {
    return track_path_impl(p, path, opt, true);
}

cd continue_u(const Params& p, const PathSpec& path, const ContinuationOptions& opt) {
    return track_path_impl(p, path, opt, false).u_end;
}

} // namespace pforge

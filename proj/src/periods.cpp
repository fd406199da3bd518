#include "pforge/periods.hpp"

#include "pforge/error.hpp"
#include "pforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace pforge {

namespace {

constexpr double pi = std::numbers::pi;

double quad_tol(double tol) { return std::clamp(tol * 1e-2, 1e-13, 1e-10); }

// Bisection to width `width`, then three secant steps kept inside the bracket.
double refine_root(const std::function<double(double)>& f, Bracket br, double width) {
    double lo = br.lo, hi = br.hi, flo = br.f_lo, fhi = br.f_hi;
    while (hi - lo > width) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
        else hi = mid, fhi = fm;
    }
    double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
    double fbest = std::min(std::abs(flo), std::abs(fhi));
    double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
    for (int i = 0; i < 3; ++i) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 >= lo && x2 <= hi)) break;
        double f2 = f(x2);
        if (std::abs(f2) < fbest) best = x2, fbest = std::abs(f2);
        x0 = x1, f0 = f1, x1 = x2, f1 = f2;
        if (f2 == 0) break;
    }
    return best;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

double vertical_residual(int k, double a, double b, double tol) {
    double n = 2.0 * k + 2;
    double j0 = j0_integral(k, a, b, tol);
    double jp = jplus_integral(k, a, b, tol);
    double jm = jminus_integral(k, a, b, tol);
    return j0 - std::cos(pi / n) * (jp + jm);
}

AlphaCurveSample solve_alpha(int k, double b, double tol) {
    if (!(b > 0 && b < 1)) throw Error(Errc::RangeViolation, "b must lie in (0, 1)");
    const double qt = quad_tol(tol);
    auto f = [&](double a) { return vertical_residual(k, a, b, qt); };
    Bracket br;
    br.lo = 1e-3 * b;
    br.f_lo = f(br.lo);
    bool found = false;
    for (int m = 3; m <= 15 && !found; ++m) {
        double hi = b * (1 - std::pow(10.0, -m));
        if (!(hi > br.lo && hi < b)) break;
        br.hi = hi;
        br.f_hi = f(hi);
        found = (br.f_lo < 0) != (br.f_hi < 0);
    }
    if (!found)
        throw Error(Errc::NoSignChange, "vertical residual has no sign change: f(" + fmt(br.lo) + ")=" + fmt(br.f_lo) +
                                            ", f(" + fmt(br.hi) + ")=" + fmt(br.f_hi));
    AlphaCurveSample s;
    s.b = b;
    s.bracket = br;
    s.a_of_b = refine_root(f, br, std::min(1e-12 * b, 1e-3 * (b - br.hi)));
    s.vert_residual_at_root = f(s.a_of_b);
    return s;
}

double horizontal_residual_on_curve(int k, double b, double tol) {
    AlphaCurveSample s = solve_alpha(k, b, tol);
    double qt = quad_tol(tol);
    return i0_integral(k, s.a_of_b, b, qt) - i1_integral(k, s.a_of_b, b, qt);
}

namespace {

struct CurveTracer {
    int k;
    double qt;

    double F(double a, double b) const { return vertical_residual(k, a, b, qt); }
    double H(double a, double b) const { return i0_integral(k, a, b, qt) - i1_integral(k, a, b, qt); }

    // Gradient (dF/da, dF/db) by central differences.
    std::pair<double, double> grad(double a, double b) const {
        double ha = 1e-7 * std::max(a, 1e-3), hb = 1e-7 * std::max(b, 1e-3);
        ha = std::min(ha, 0.25 * (b - a));
        hb = std::min(hb, 0.25 * (b - a));
        return {(F(a + ha, b) - F(a - ha, b)) / (2 * ha), (F(a, b + hb) - F(a, b - hb)) / (2 * hb)};
    }

    // Moves (a, b) along direction (na, nb) onto F = 0 by a chord iteration.
    bool correct(double& a, double& b, double na, double nb, double slope, double max_shift) const {
        double s = 0;
        for (int it = 0; it < 40; ++it) {
            double aa = a + s * na, bb = b + s * nb;
            if (!(aa > 0 && aa < bb && bb < 1)) return false;
            double f = F(aa, bb);
            double ds = -f / slope;
            s += ds;
            if (std::abs(s) > max_shift) return false;
            if (std::abs(ds) < 1e-14 || f == 0) {
                a += s * na;
                b += s * nb;
                return a > 0 && a < b && b < 1;
            }
        }
        return false;
    }

    // One direction of the trace; dir = +1 toward larger b initially.
    std::vector<CurvePoint> run(double a, double b, int dir, double max_step) const {
        std::vector<CurvePoint> pts;
        auto [ga, gb] = grad(a, b);
        double ta = -gb, tb = ga;
        double norm = std::hypot(ta, tb);
        ta /= norm, tb /= norm;
        if ((tb < 0) == (dir > 0)) ta = -ta, tb = -tb;
        double h = max_step;
        for (int step = 0; step < 20000; ++step) {
            if (b > 1 - 1e-3 || b < 2e-2 || b - a < 1e-9 * b) break;
            double pa = a + h * ta, pb = b + h * tb;
            auto [na, nb] = grad(a, b);
            double gn = std::hypot(na, nb);
            bool ok = false;
            double ca = pa, cb = pb;
            if (pa > 0 && pa < pb && pb < 1) ok = correct(ca, cb, na / gn, nb / gn, gn, 0.5 * h);
            if (ok) {
                auto [ga2, gb2] = grad(ca, cb);
                double t2a = -gb2, t2b = ga2, n2 = std::hypot(t2a, t2b);
                t2a /= n2, t2b /= n2;
                if (t2a * ta + t2b * tb < 0) t2a = -t2a, t2b = -t2b;
                if (t2a * ta + t2b * tb < std::cos(0.2)) ok = false; // turning too fast
                if (ok) {
                    a = ca, b = cb, ta = t2a, tb = t2b;
                    pts.push_back({a, b, H(a, b)});
                    h = std::min(max_step, 1.5 * h);
                    continue;
                }
            }
            h *= 0.5;
            if (h < 1e-10) break;
        }
        return pts;
    }
};

} // namespace

std::vector<CurvePoint> trace_alpha_curve(int k, double tol, double max_step) {
    if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1");
    CurveTracer tr{k, quad_tol(tol)};
    // Start where the root sits well away from the diagonal a = b.
    AlphaCurveSample s;
    for (double b : {0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95}) {
        s = solve_alpha(k, b, tol);
        if (b - s.a_of_b > 1e-2 * b) break;
    }
    std::vector<CurvePoint> back = tr.run(s.a_of_b, s.b, -1, max_step);
    std::vector<CurvePoint> fwd = tr.run(s.a_of_b, s.b, +1, max_step);
    std::vector<CurvePoint> out(back.rbegin(), back.rend());
    out.push_back({s.a_of_b, s.b, tr.H(s.a_of_b, s.b)});
    out.insert(out.end(), fwd.begin(), fwd.end());
    return out;
}

PeriodSolution solve_period_problem(int k, double tol, int prescan) {
    if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1");
    if (prescan < 8) throw Error(Errc::RangeViolation, "prescan resolution too small");
    CurveTracer tr{k, quad_tol(tol)};
    std::vector<CurvePoint> curve = trace_alpha_curve(k, tol, 1.0 / prescan);

    PeriodSolution sol;
    sol.k = k;
    sol.curve_points = int(curve.size());
    sol.curve_b_min = curve.front().b;
    sol.curve_b_max = curve.back().b;
    for (std::size_t i = 2; i < curve.size(); ++i) {
        double d1 = curve[i - 1].b - curve[i - 2].b, d2 = curve[i].b - curve[i - 1].b;
        if ((d1 < 0) != (d2 < 0)) ++sol.curve_folds;
    }

    std::vector<std::size_t> changes;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if ((curve[i - 1].horiz < 0) != (curve[i].horiz < 0)) changes.push_back(i);
    if (changes.empty()) throw Error(Errc::NoSignChange, "horizontal residual keeps its sign along the curve");

    sol.all_roots.resize(changes.size());
    parallel_for(changes.size(), [&](std::size_t r) {
        const CurvePoint& p0 = curve[changes[r] - 1];
        const CurvePoint& p1 = curve[changes[r]];
        double ca = p1.a - p0.a, cb = p1.b - p0.b, len = std::hypot(ca, cb);
        // Points of the chord are pushed back onto the curve along its normal.
        double na = -cb / len, nb = ca / len;
        auto [ga, gb] = tr.grad(0.5 * (p0.a + p1.a), 0.5 * (p0.b + p1.b));
        double slope = ga * na + gb * nb;
        auto project = [&](double lam, double& a, double& b) {
            a = p0.a + lam * ca, b = p0.b + lam * cb;
            if (!tr.correct(a, b, na, nb, slope, len))
                throw Error(Errc::NoConvergence, "could not return to the alpha-curve");
        };
        auto h = [&](double lam) {
            double a, b;
            project(lam, a, b);
            return tr.H(a, b);
        };
        Bracket lb{0.0, 1.0, p0.horiz, p1.horiz};
        double lam = refine_root(h, lb, 1e-12 / len);
        PeriodRoot root;
        project(lam, root.a_star, root.b_star);
        root.vert_residual = tr.F(root.a_star, root.b_star);
        root.horiz_residual = tr.H(root.a_star, root.b_star);
        root.b_bracket = {p0.b, p1.b, p0.horiz, p1.horiz};
        double da = 1e-6 * (root.b_star - root.a_star);
        root.alpha_bracket = {root.a_star - da, root.a_star + da, tr.F(root.a_star - da, root.b_star),
                              tr.F(root.a_star + da, root.b_star)};
        sol.all_roots[r] = root;
    });
    const PeriodRoot& first = sol.all_roots.front();
    sol.a_star = first.a_star;
    sol.b_star = first.b_star;
    sol.vert_residual = first.vert_residual;
    sol.horiz_residual = first.horiz_residual;
    sol.brackets[0] = first.alpha_bracket;
    sol.brackets[1] = first.b_bracket;
    return sol;
}

double chm_ratio(int k, double a, double tol) {
    double j0 = j0_integral(k, a, 1.0, tol);
    double j1 = jplus_integral(k, a, 1.0, tol) + jminus_integral(k, a, 1.0, tol);
    return j0 / j1;
}

ChmBoundary chm_boundary(int k, double tol) {
    if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1");
    const double qt = quad_tol(tol), c = std::cos(pi / (2.0 * k + 2));
    auto f = [&](double a) { return chm_ratio(k, a, qt) - c; };
    Bracket br{1e-3, 0, f(1e-3), 0};
    bool found = false;
    for (int m = 3; m <= 15 && !found; ++m) {
        br.hi = 1 - std::pow(10.0, -m);
        br.f_hi = f(br.hi);
        found = (br.f_lo < 0) != (br.f_hi < 0);
    }
    if (!found) throw Error(Errc::NoSignChange, "b = 1 vertical residual has no sign change");
    ChmBoundary out;
    out.a1 = refine_root(f, br, 1e-12);
    out.J0_1 = j0_integral(k, out.a1, 1.0, qt);
    out.J1_1 = jplus_integral(k, out.a1, 1.0, qt) + jminus_integral(k, out.a1, 1.0, qt);
    return out;
}

double beta_function(double x, double y) { return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y)); }

std::vector<AsymptoticsRow> asymptotics_report(int k, double a, double b) {
    if (!(a > 0 && a <= 1e-3 && a < b && b < 1)) throw Error(Errc::RangeViolation, "need 0 < a <= 1e-3, a < b < 1");
    const double n = 2.0 * k + 2, e = 1.0 / (k + 1);
    double jp = jplus_integral(k, a, b), jm = jminus_integral(k, a, b), j0 = j0_integral(k, a, b);
    return {
        {"a^(1/(k+1)) J+", std::pow(a, e) * jp, 0.0},
        {"a^(1/(k+1)) J-", std::pow(a, e) * jm, std::pow(b, -double(k) / (k + 1)) * beta_function(e, (2 * k + 1) / n)},
        {"a^(-1/(k+1)) J0", std::pow(a, -e) * j0, std::pow(b, double(k) / (k + 1)) * beta_function(1 / n, (2 * k + 3) / n)},
    };
}

std::vector<std::pair<double, double>> scan_grid(Family family, int n) {
    if (n < 2) throw Error(Errc::RangeViolation, "grid needs at least 2 points per axis");
    const double margin = 1e-3;
    auto logit_pt = [&](int i) { // dense toward both 0 and 1
        double lo = std::log(margin / (1 - margin)), hi = -lo;
        double x = lo + (hi - lo) * i / (n - 1);
        return 1 / (1 + std::exp(-x));
    };
    auto log_pt = [&](int i, double lo, double hi) { return lo * std::pow(hi / lo, double(i) / (n - 1)); };
    std::vector<std::pair<double, double>> g;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double a = 0, b = 0;
            switch (family) {
            case Family::CaseVI: a = logit_pt(i), b = logit_pt(j); break;
            case Family::CaseI: a = log_pt(i, 1e-2, 1e2), b = a * logit_pt(j); break;
            case Family::CaseV: {
                double d = log_pt(i, margin, 1e2);
                a = 1 + d, b = 1 + d * logit_pt(j);
                break;
            }
            case Family::CaseVIII: a = logit_pt(i), b = a + (1 - a) * logit_pt(j); break;
            }
            g.emplace_back(a, b);
        }
    }
    return g;
}

ScanTable nonsolvability_scan(Family family, int k, int grid_n) {
    if (family == Family::CaseVIII) throw Error(Errc::WrongFamily, "CaseVIII is the solvable family");
    auto grid = scan_grid(family, grid_n);
    ScanTable t;
    t.family = family;
    t.k = k;
    t.grid_n = grid_n;
    t.cells.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        ScanCell& c = t.cells[i];
        c.a = grid[i].first;
        c.b = grid[i].second;
        try {
            c.value = obstruction_value(make_params(family, k, c.a, c.b));
        } catch (const Error& e) {
            c.ok = false;
            c.error = e.what();
        }
    });
    t.min_abs = std::numeric_limits<double>::infinity();
    for (const ScanCell& c : t.cells) {
        if (!c.ok) {
            ++t.failed;
            continue;
        }
        if (c.value > 0) ++t.positive;
        else if (c.value < 0) ++t.negative;
        else ++t.zero;
        if (std::abs(c.value) < t.min_abs) t.min_abs = std::abs(c.value), t.min_a = c.a, t.min_b = c.b;
    }
    return t;
}

} // namespace pforge

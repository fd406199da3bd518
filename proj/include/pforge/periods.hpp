#pragma once

#include "pforge/quadrature.hpp"
#include "pforge/surface.hpp"

#include <string>
#include <vector>

namespace pforge {

// Sign-change certificate: f(lo) and f(hi) have opposite signs.
struct Bracket {
    double lo = 0, hi = 0;
    double f_lo = 0, f_hi = 0;
};

struct AlphaCurveSample {
    double b = 0;
    double a_of_b = 0;
    double vert_residual_at_root = 0;
    Bracket bracket;
};

struct PeriodRoot {
    double a_star = 0, b_star = 0;
    double vert_residual = 0, horiz_residual = 0;
    Bracket alpha_bracket; // in a, at b_star
    Bracket b_bracket;     // in b, of the horizontal residual along the curve
};

struct PeriodSolution {
    int k = 0;
    double a_star = 0, b_star = 0;
    double vert_residual = 0, horiz_residual = 0;
    Bracket brackets[2]; // {alpha bracket, b bracket} of the reported root
    std::vector<PeriodRoot> all_roots;
    int curve_points = 0;
    double curve_b_min = 0, curve_b_max = 0;
    int curve_folds = 0; // turning points of b along the curve
};

struct CurvePoint {
    double a, b;
    double horiz; // I0 - I1
};

// The zero set of vertical_residual traced by pseudo-arclength continuation
// from the first b in {0.5, ..., 0.95} whose root is clear of the diagonal,
// ordered from the small-b end to the b -> 1 end. Arclength
// steps never exceed max_step.
std::vector<CurvePoint> trace_alpha_curve(int k, double tol = 1e-10, double max_step = 5e-3);

// J0 - cos(pi/(2k+2)) (J+ + J-).
double vertical_residual(int k, double a, double b, double tol = default_tol);

// The root a in (0, b) of vertical_residual. The lower bracket end is
// 1e-3 b; the upper one is b (1 - 10^-m) for the first m in 3..15 where the
// residual is positive.
AlphaCurveSample solve_alpha(int k, double b, double tol = 1e-10);

double horizontal_residual_on_curve(int k, double b, double tol = 1e-10);

// Roots of the horizontal residual along the traced curve; every root is
// reported. prescan sets the arclength resolution (step 1/prescan).
PeriodSolution solve_period_problem(int k, double tol = 1e-10, int prescan = 200);

struct ChmBoundary {
    double a1, J0_1, J1_1;
};
// J0(a, 1) / J1(a, 1).
double chm_ratio(int k, double a, double tol = default_tol);
ChmBoundary chm_boundary(int k, double tol = 1e-10);

struct AsymptoticsRow {
    std::string quantity;
    double value;
    double target;
};
std::vector<AsymptoticsRow> asymptotics_report(int k, double a_small, double b);

double beta_function(double x, double y);

struct ScanCell {
    double a = 0, b = 0, value = 0;
    bool ok = true;
    std::string error;
};

struct ScanTable {
    Family family = Family::CaseI;
    int k = 0, grid_n = 0;
    std::vector<ScanCell> cells; // row-major, a outer
    double min_abs = 0;
    double min_a = 0, min_b = 0;
    int positive = 0, negative = 0, zero = 0, failed = 0;
    bool constant_sign() const { return failed == 0 && zero == 0 && (positive == 0 || negative == 0); }
};

// Grid over the admissible region, dense toward its edges (margin 1e-3).
std::vector<std::pair<double, double>> scan_grid(Family family, int grid_n);
ScanTable nonsolvability_scan(Family family, int k, int grid_n);

} // namespace pforge

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace pforge {

using cd = std::complex<double>;

enum class Family { CaseI, CaseV, CaseVI, CaseVIII };

const char* family_name(Family f);
Family parse_family(const std::string& s);

// Moduli of one member of a family. b0 is zero until normalize_b0 runs.
struct Params {
    Family family = Family::CaseVIII;
    int k = 1;
    double a = 0;
    double b = 0;
    cd b0{0.0, 0.0};

    int n() const { return 2 * k + 2; } // order of the deck group
};

Params make_params(Family family, int k, double a, double b);

struct Moduli {
    double s, y1, y2;
};
Moduli recover_moduli(const Params& p);

enum class Chart { Finite, InfinityChart };

// A point (z, u) of u^{2k+2} = R(z). On the infinity chart the field z holds
// w = 1/z; u is the same coordinate on both charts.
struct SurfacePoint {
    cd z;
    cd u;
    Chart chart = Chart::Finite;

    cd zvalue() const { return chart == Chart::Finite ? z : 1.0 / z; }
};

// (z - c)^e with real c.
struct Factor {
    double c;
    int e;
};

// Family-specific structure of the cover. R(z) = lead * prod (z-c)^e over
// the five finite branch points; dh/dz = eps * a * b0 * m_lead *
// prod (z-c)^e over m / u^{k+1}.
struct CoverShape {
    double lead;
    std::array<Factor, 5> r;
    double m_lead;
    std::array<Factor, 3> m;
    double eps;
    std::array<double, 3> radicand; // roots of the cubic under dh's square root
    double radicand_lead;
};
CoverShape cover_shape(const Params& p);

// R(z); throws PoleHit at a finite pole.
cd defining_rhs(const Params& p, cd z);
// R(1/w) written in w, regular near w = 0 up to the simple pole of R at infinity.
cd defining_rhs_w(const Params& p, cd w);
// R'(z)/R(z).
cd log_derivative(const Params& p, cd z);

// All 2k+2 roots of u^{2k+2} = R(z), by increasing principal argument.
std::vector<cd> sheet_values(const Params& p, cd z);

// The branch of u over the closed upper half plane Im z >= 0 obtained by
// continuing the reference sheet from (a+b)/2 (where hat g > 0, dh > 0 for
// CaseVIII). Each factor uses arg(z - c) in [0, pi]. When the point is
// z0 + dz with z0 a branch point, passing the split keeps (z - z0) exact.
cd upper_branch_u(const Params& p, cd z0, cd dz = cd(0.0, 0.0));

struct PathVertex {
    cd coord;
    Chart chart = Chart::Finite;
};

struct PathSpec {
    std::vector<PathVertex> vertices;
    cd u_start;
    double max_step = 0.05;
};

struct ContinuationOptions {
    double discrimination = 10.0;
    double exclusion = 1e-6;
    double min_step = 1e-14;
};

// u at the last vertex by stepwise nearest-root continuation.
cd continue_u(const Params& p, const PathSpec& path, const ContinuationOptions& opt = {});

// Quadrature nodes along a path: integral of f(pt) dz is sum f(node.pt) * node.dz.
struct PathNode {
    SurfacePoint pt;
    cd dz;
};
struct TrackedPath {
    std::vector<PathNode> nodes;
    cd u_end;
    double max_residual = 0;
};
TrackedPath track_path(const Params& p, const PathSpec& path, const ContinuationOptions& opt = {});

// |u^{2k+2} - R| / (1 + |R|) on the point's chart.
double residual(const Params& p, const SurfacePoint& pt);

} // namespace pforge

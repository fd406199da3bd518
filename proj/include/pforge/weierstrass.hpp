#pragma once

#include "pforge/surface.hpp"

#include <vector>

namespace pforge {

// Integrands of X = Re int (phi1, phi2, phi3) against dz.
struct FormsValue {
    cd phi1, phi2, phi3;
    cd g;
    cd dh_coeff;
};

enum class BoundaryStretch { I_0a, I_ab, I_b1, Arc, I_m10 };
enum class Rotation { Tilde, Hat };

const char* stretch_name(BoundaryStretch s);

// e^{-i pi/(2k+2)} for Tilde, e^{-i pi k/(2k+2)} for Hat.
cd rotation_factor(int k, Rotation r);

// g = z u^{-k}; infinite at u = 0.
cd gauss_map(const Params& p, const SurfacePoint& pt);

// dh/dz at the point (z, u) of the cover. dh is single valued on the cover,
// so the sheet fully determines it.
cd height_coeff(const Params& p, const SurfacePoint& pt);
// dh/dz on the sheet over z nearest to branch_seed.
cd height_coeff(const Params& p, cd z, cd branch_seed);

FormsValue phi_forms(const Params& p, const SurfacePoint& pt);
// Sheet chosen as nearest to branch_seed.
FormsValue phi_forms(const Params& p, cd z, cd branch_seed);

// Forms on the closed upper half plane, on the branch of upper_branch_u.
// z = z0 + dz with z0 exact, as in upper_branch_u.
FormsValue domain_forms(const Params& p, cd z0, cd dz = cd(0.0, 0.0));
// g dh / dz and (dh/g) / dz there, finite up to z = a, b.
struct ProductForms {
    cd g_dh, dh_over_g, dh;
};
ProductForms domain_products(const Params& p, cd z0, cd dz = cd(0.0, 0.0));

// (rotated g, dh/dz) on a stretch of the boundary of D (CaseVIII). t is the
// real coordinate on the four segments and the angle on the arc.
std::pair<cd, cd> boundary_forms(const Params& p, BoundaryStretch s, double t, Rotation r);
// The point z of D at parameter t of a stretch.
cd stretch_point(BoundaryStretch s, double t);

// (dg/g)/dz = 1/z - k R'/((2k+2) R); depends on z only.
cd dg_over_g(const Params& p, cd z);

double gaussian_curvature(const Params& p, const SurfacePoint& pt);
// Same on the domain branch.
double domain_curvature(const Params& p, cd z);

// b0 = i beta with int over (-inf, 0) of a beta |dt| / sqrt|radicand| = 1.
Params normalize_b0(const Params& p);

// The z-roots of dg/g (a quartic numerator); each lifts to 2k+2 zeros of dg.
std::vector<cd> dg_zero_sites(const Params& p);

} // namespace pforge

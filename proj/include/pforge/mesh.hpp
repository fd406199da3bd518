#pragma once

#include "pforge/geometry.hpp"
#include "pforge/surface.hpp"
#include "pforge/weierstrass.hpp"

#include <Eigen/Core>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pforge {

// Vertex tag bits: one per boundary stretch of D, plus the end cut |z| = cutoff.
enum : unsigned {
    TagI0a = 1u << 0,
    TagIab = 1u << 1,
    TagIb1 = 1u << 2,
    TagArc = 1u << 3,
    TagIm10 = 1u << 4,
    TagEndCut = 1u << 5,
};
unsigned stretch_tag(BoundaryStretch s);

// Polar triangulation of D = {|z| <= 1, Im z >= 0} minus |z| < cutoff.
// Rings grow geometrically (ratio <= 1 + pi/resolution) so cells stay close
// to square; a, (a+b)/2 and b are ring radii, hence vertices on the real axis.
struct Domain2 {
    double a = 0, b = 0, cutoff = 0;
    int resolution = 0;
    std::vector<double> radii;  // ring radii, cutoff .. 1
    std::vector<cd> z;          // vertex (ring i, angle j) at i * (resolution+1) + j
    std::vector<unsigned> tags; // per vertex
    std::vector<Tri> tris;      // counter-clockwise in the z plane
    int index_a = -1, index_b = -1, index_root = -1;
    std::map<std::pair<int, int>, unsigned> boundary_edges; // (min, max) -> tag bit

    int ring_count() const { return static_cast<int>(radii.size()); }
    int vertex(int ring, int j) const { return ring * (resolution + 1) + j; }
};

Domain2 triangulate_domain(double a, double b, int resolution, double end_cutoff);

struct Mesh3 {
    std::vector<Vec3> pos;
    std::vector<Tri> tris;
    std::vector<cd> gauss;       // stereographic Gauss map, same frame as pos
    std::vector<double> curvature;
    std::vector<unsigned> tags;  // piece only; empty after assembly
    std::vector<int> copy_of;    // per triangle: index of the group element
};

struct ImmerseOptions {
    double loop_tol = 1e-6; // relative to the piece diameter
    bool throw_on_loop = true;
    int branch_audit_stride = 97;
};

struct Piece {
    Mesh3 mesh;
    double loop_residual_max = 0;  // over edges outside the spanning tree
    double diameter = 0;
    double branch_audit_max = 0;   // continued u vs the closed form, relative
    int branch_audit_edges = 0;
    double conformality_max = 0;   // |phi . phi| / |phi|^2 at vertices
};

// The oriented fundamental piece in the frame of the symmetry group: the
// (a,b) stretch lies in x1 = 0, (b,1) and (-1,0) in the plane through the
// x3 axis at angle pi/(k+1), (0,a) on the x3 = 0 bisector and the arc at
// x3 = 1/2, with X(a) = 0.
Piece immerse(const Params& p, const Domain2& dom, const ImmerseOptions& opt = {});

// Re of the forms integrated along the straight segment z0 -> z1 of D,
// already in the piece frame.
Vec3 segment_increment(const Params& p, cd z0, cd z1, bool singular0, bool singular1);

enum class IsometryKind { Identity, RotationReflectionJ, Sigma0, Sigma1, Sigma2Screw, TranslationTau, PlaneReflection };
const char* isometry_kind_name(IsometryKind k);

struct IsometryElement {
    IsometryKind kind = IsometryKind::Identity;
    Eigen::Matrix3d L = Eigen::Matrix3d::Identity();
    Vec3 t = Vec3::Zero();
    std::string label;
    Vec3 apply(const Vec3& x) const { return L * x + t; }
    bool improper() const { return L.determinant() < 0; }
};

IsometryElement compose(const IsometryElement& f, const IsometryElement& g); // f after g
IsometryKind classify(const Eigen::Matrix3d& L, const Vec3& t);

struct SymmetryGroup {
    int k = 0;
    IsometryElement s_a, s_b, s_c, r_l, tau;
    std::vector<IsometryElement> copies; // 8(k+1) images of the piece, one slab
    // Boundary stretch -> the generator fixing it pointwise.
    const IsometryElement& fixing(BoundaryStretch s) const;
};

SymmetryGroup symmetry_group(int k);

struct AssembleOptions {
    double weld_tol = 1e-6;
};

struct Assembly {
    Mesh3 mesh;
    int welded = 0;
    double seam_max = 0; // max |G_s(x) - x| over vertices on stretch s
    double z_min = 0, z_max = 0;
};

Assembly assemble(const Piece& piece, const SymmetryGroup& group, int slabs, const AssembleOptions& opt = {});

// Directed edges used by more than one triangle; 0 for a consistently
// oriented mesh.
int orientation_conflicts(const Mesh3& m);

struct CycleResidual {
    std::string label;
    cd int_dh_over_g, int_g_dh, int_dh;
    double horizontal; // |int dh/g - conj int g dh|
    double vertical;   // distance of Re int dh to 2Z
};

// Lifted loops around branch-point groups, one per sheet: circles enclosing
// [0, b], [a, 1/a] and [b - d, 1/(b - d)].
std::vector<PathSpec> default_cycles(const Params& p, int vertices = 256);
std::vector<CycleResidual> closure_check(const Params& p, const std::vector<PathSpec>& cycles);

double curvature_integral(const Mesh3& m);
double total_curvature_target(int k); // of the piece

struct EndHeights {
    std::vector<double> radii, means, spreads;
    double extrapolated = 0;   // r -> 0 with x3 - h ~ r^{1/2}
};
EndHeights end_heights(const Domain2& dom, const Mesh3& piece);

struct EmbeddednessReport {
    Vec3 axis;                   // projection direction
    bool boundary_simple = false;
    int boundary_crossings = 0;
    std::vector<std::pair<BoundaryStretch, bool>> stretch_monotone;
    double axis_deviation = 0; // |in-plane coordinate| of the projected (a,b) stretch
    int orientation_positive = 0, orientation_negative = 0, orientation_degenerate = 0;
    int sample_pairs = 0, sample_collisions = 0;
    double min_face_distance = -1; // assembled mesh, -1 if not run
    double search_radius = 0;
    long candidate_pairs = 0;
    bool graph_like() const {
        return boundary_simple && (orientation_positive == 0 || orientation_negative == 0) && sample_collisions == 0;
    }
};

// Centre of the hemisphere holding the Gauss image of the piece, piece frame.
Vec3 projection_axis(int k);

// Projection checks on the piece; the face distance runs on `assembled` when given.
EmbeddednessReport embeddedness_report(const Params& p, const Domain2& dom, const Piece& piece, int samples,
                                       const Mesh3* assembled = nullptr, double delta = 1e-3);

enum class DivisorSite { End0, EndInf, QPoint, RPoint };
enum class DivisorFunction { GaussMap, HeightForm, GaussDifferential };
const char* divisor_site_name(DivisorSite s);
const char* divisor_function_name(DivisorFunction f);

struct DivisorOrder {
    DivisorSite site;
    DivisorFunction fn;
    double slope;     // fitted order in the local parameter
    int expected;
    double fit_error; // max deviation of the log-log points from the line
};
DivisorOrder divisor_order(const Params& p, DivisorSite site, DivisorFunction fn);
std::vector<DivisorOrder> divisor_order_check(const Params& p);

// Mesh files. Vertex attributes gx, gy (Gauss map) and K ride along as a
// comment per vertex in OBJ and as vertex properties in PLY.
enum class MeshFormat { Obj, Ply };
MeshFormat parse_mesh_format(const std::string& s);
void export_mesh(const Mesh3& m, const std::string& path, MeshFormat fmt);
Mesh3 import_mesh(const std::string& path, MeshFormat fmt);

} // namespace pforge

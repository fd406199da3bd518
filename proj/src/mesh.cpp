#include "pforge/mesh.hpp"

#include "pforge/error.hpp"
#include "pforge/parallel.hpp"
#include "pforge/tanh_sinh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>

namespace pforge {

namespace {
constexpr double pi = std::numbers::pi;
using CVec3 = Eigen::Matrix<cd, 3, 1>;
} // namespace

unsigned stretch_tag(BoundaryStretch s) {
    switch (s) {
    case BoundaryStretch::I_0a: return TagI0a;
    case BoundaryStretch::I_ab: return TagIab;
    case BoundaryStretch::I_b1: return TagIb1;
    case BoundaryStretch::Arc: return TagArc;
    case BoundaryStretch::I_m10: return TagIm10;
    }
    return 0;
}

Domain2 triangulate_domain(double a, double b, int resolution, double end_cutoff) {
    if (resolution < 8) throw Error(Errc::BadResolution, "resolution must be at least 8");
    if (!(end_cutoff > 0 && end_cutoff < a && a < b && b < 1))
        throw Error(Errc::RangeViolation, "need 0 < cutoff < a < b < 1");
    Domain2 d;
    d.a = a, d.b = b, d.cutoff = end_cutoff, d.resolution = resolution;
    const double q = std::min(1.3, 1 + pi / resolution);
    const double breaks[] = {end_cutoff, a, 0.5 * (a + b), b, 1.0};
    d.radii.push_back(end_cutoff);
    int ring_a = -1, ring_root = -1, ring_b = -1;
    for (int s = 0; s < 4; ++s) {
        double r0 = breaks[s], r1 = breaks[s + 1];
        int m = std::max(1, static_cast<int>(std::ceil(std::log(r1 / r0) / std::log(q) - 1e-9)));
        for (int i = 1; i < m; ++i) d.radii.push_back(r0 * std::pow(r1 / r0, double(i) / m));
        d.radii.push_back(r1);
        int last = static_cast<int>(d.radii.size()) - 1;
        if (s == 0) ring_a = last;
        if (s == 1) ring_root = last;
        if (s == 2) ring_b = last;
    }
    const int n = resolution, rings = d.ring_count();
    d.z.resize(static_cast<size_t>(rings) * (n + 1));
    d.tags.assign(d.z.size(), 0u);
    for (int i = 0; i < rings; ++i) {
        double r = d.radii[i];
        for (int j = 0; j <= n; ++j) {
            cd z;
            if (j == 0) z = cd(r, 0.0);
            else if (j == n) z = cd(-r, 0.0);
            else z = std::polar(r, pi * j / n);
            int v = d.vertex(i, j);
            d.z[v] = z;
            unsigned t = 0;
            if (j == 0) {
                if (i <= ring_a) t |= TagI0a;
                if (i >= ring_a && i <= ring_b) t |= TagIab;
                if (i >= ring_b) t |= TagIb1;
            }
            if (j == n) t |= TagIm10;
            if (i == rings - 1) t |= TagArc;
            if (i == 0) t |= TagEndCut;
            d.tags[v] = t;
        }
    }
    d.index_a = d.vertex(ring_a, 0);
    d.index_b = d.vertex(ring_b, 0);
    d.index_root = d.vertex(ring_root, 0);

    for (int i = 0; i + 1 < rings; ++i) {
        for (int j = 0; j < n; ++j) {
            int v00 = d.vertex(i, j), v10 = d.vertex(i + 1, j), v11 = d.vertex(i + 1, j + 1), v01 = d.vertex(i, j + 1);
            // shorter diagonal
            if (std::abs(d.z[v00] - d.z[v11]) <= std::abs(d.z[v10] - d.z[v01])) {
                d.tris.push_back({v00, v10, v11});
                d.tris.push_back({v00, v11, v01});
            } else {
                d.tris.push_back({v00, v10, v01});
                d.tris.push_back({v10, v11, v01});
            }
        }
    }
    auto add_edge = [&](int u, int v, unsigned tag) { d.boundary_edges[{std::min(u, v), std::max(u, v)}] = tag; };
    for (int i = 0; i + 1 < rings; ++i) {
        int u = d.vertex(i, 0), v = d.vertex(i + 1, 0);
        add_edge(u, v, i < ring_a ? TagI0a : (i < ring_b ? TagIab : TagIb1));
        add_edge(d.vertex(i, n), d.vertex(i + 1, n), TagIm10);
    }
    for (int j = 0; j < n; ++j) {
        add_edge(d.vertex(rings - 1, j), d.vertex(rings - 1, j + 1), TagArc);
        add_edge(d.vertex(0, j), d.vertex(0, j + 1), TagEndCut);
    }
    return d;
}

namespace {

// Forms of the rotated data (hat g, dh) mapped to the piece frame
// x = (-X2, -X1, X3); z = z0 + dz.
CVec3 frame_forms(const Params& p, cd z0, cd dz) {
    ProductForms pr = domain_products(p, z0, dz);
    cd c = rotation_factor(p.k, Rotation::Hat);
    cd gdh = c * pr.g_dh, dhg = pr.dh_over_g / c;
    cd phi1 = 0.5 * (dhg - gdh);
    cd phi2 = cd(0, 0.5) * (dhg + gdh);
    return CVec3(-phi2, -phi1, pr.dh);
}

struct Gk15 {
    static constexpr double xk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                                     0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                                     0.207784955007898468, 0.000000000000000000};
    static constexpr double wk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                                     0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                                     0.204432940075298892, 0.209482141084727828};
    static constexpr double wg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                                     0.417959183673469388};
};

template <class F>
CVec3 gk15_adaptive(F&& f, double lo, double hi, double abs_tol, int depth) {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    CVec3 k = f(c) * Gk15::wk[7], g = f(c) * Gk15::wg[3];
    for (int i = 0; i < 7; ++i) {
        CVec3 s = f(c - h * Gk15::xk[i]) + f(c + h * Gk15::xk[i]);
        k += s * Gk15::wk[i];
        if (i % 2 == 1) g += s * Gk15::wg[i / 2];
    }
    k *= h, g *= h;
    if ((k - g).norm() <= abs_tol || depth <= 0) return k;
    return gk15_adaptive(f, lo, c, 0.5 * abs_tol, depth - 1) + gk15_adaptive(f, c, hi, 0.5 * abs_tol, depth - 1);
}

} // namespace

Vec3 segment_increment(const Params& p, cd z0, cd z1, bool singular0, bool singular1) {
    cd dz = z1 - z0;
    CVec3 total;
    if (singular0 || singular1) {
        auto f = [&](const DeNode& nd) -> CVec3 {
            // the endpoint singularity is integrable, so underflowed nodes add nothing
            if (std::min(nd.dl, nd.dr) < 1e-280) return CVec3::Zero();
            CVec3 v = nd.dl <= nd.dr ? frame_forms(p, z0, nd.dl * dz) : frame_forms(p, z1, -nd.dr * dz);
            return v * (std::exp(nd.log_w) * dz);
        };
        auto r = tanh_sinh<CVec3>(0.0, 1.0, f, 1e-13, 12, [](const CVec3& v) { return v.norm(); }, CVec3::Zero());
        total = r.value;
    } else {
        auto f = [&](double t) -> CVec3 { return frame_forms(p, z0, t * dz) * dz; };
        CVec3 mid = f(0.5);
        total = gk15_adaptive(f, 0.0, 1.0, 1e-14 * std::max(1.0, mid.norm()), 20);
    }
    return total.real();
}

Piece immerse(const Params& p, const Domain2& dom, const ImmerseOptions& opt) {
    if (p.family != Family::CaseVIII) throw Error(Errc::WrongFamily, "the piece is built for CaseVIII");
    const int nv = static_cast<int>(dom.z.size());
    auto singular = [&](int v) { return v == dom.index_a || v == dom.index_b; };

    std::set<std::pair<int, int>> edge_set;
    for (const Tri& t : dom.tris)
        for (int e = 0; e < 3; ++e) {
            int u = t[e], v = t[(e + 1) % 3];
            edge_set.insert({std::min(u, v), std::max(u, v)});
        }
    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    std::vector<std::vector<std::pair<int, int>>> adj(nv); // (neighbor, edge)
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        adj[edges[e].first].push_back({edges[e].second, e});
        adj[edges[e].second].push_back({edges[e].first, e});
    }

    // Increments oriented from first to second.
    std::vector<Vec3> inc(edges.size());
    parallel_for(edges.size(), [&](size_t e) {
        auto [u, v] = edges[e];
        inc[e] = segment_increment(p, dom.z[u], dom.z[v], singular(u), singular(v));
    });

    Piece out;
    Mesh3& m = out.mesh;
    m.pos.assign(nv, Vec3::Zero());
    std::vector<char> seen(nv, 0), tree_edge(edges.size(), 0);
    std::vector<int> parent(nv, -1);
    int root = dom.index_root;
    m.pos[root] = segment_increment(p, dom.z[dom.index_a], dom.z[root], true, false);
    seen[root] = 1;
    std::queue<int> bfs;
    bfs.push(root);
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (auto [v, e] : adj[u]) {
            if (seen[v]) continue;
            seen[v] = 1;
            tree_edge[e] = 1;
            parent[v] = u;
            m.pos[v] = m.pos[u] + (edges[e].first == u ? inc[e] : Vec3(-inc[e]));
            bfs.push(v);
        }
    }
    Vec3 lo = m.pos[0], hi = m.pos[0];
    for (const Vec3& x : m.pos) lo = lo.cwiseMin(x), hi = hi.cwiseMax(x);
    out.diameter = (hi - lo).norm();
    for (size_t e = 0; e < edges.size(); ++e) {
        if (tree_edge[e]) continue;
        auto [u, v] = edges[e];
        out.loop_residual_max = std::max(out.loop_residual_max, (m.pos[v] - m.pos[u] - inc[e]).norm());
    }

    // Attributes; a and b are nudged into D, where u is 0 or infinite.
    m.gauss.resize(nv);
    m.curvature.resize(nv);
    std::vector<double> conf(nv, 0);
    const cd c = rotation_factor(p.k, Rotation::Hat);
    const double nudge = 1e-9;
    parallel_for(nv, [&](size_t v) {
        cd z = dom.z[v];
        if (singular(static_cast<int>(v))) z += cd(0, nudge);
        cd u = upper_branch_u(p, z);
        cd ghat = c * z / std::pow(u, p.k);
        m.gauss[v] = cd(0, -1) * std::conj(ghat);
        m.curvature[v] = domain_curvature(p, z);
        CVec3 f = frame_forms(p, z, 0.0);
        conf[v] = std::abs(f.cwiseProduct(f).sum()) / f.squaredNorm();
    });
    for (double x : conf) out.conformality_max = std::max(out.conformality_max, x);
    // The frame map is improper, so z-counterclockwise triangles are flipped
    // to keep their normals on the side of g.
    m.tris = dom.tris;
    for (Tri& t : m.tris) std::swap(t[1], t[2]);
    m.tags = dom.tags;
    m.copy_of.assign(m.tris.size(), 0);

    // Branch audit: continue u along sampled tree edges and compare with the
    // closed form at the far end.
    for (int v = 0; v < nv; v += std::max(1, opt.branch_audit_stride)) {
        int u = parent[v];
        if (u < 0 || singular(u) || singular(v)) continue;
        PathSpec ps;
        ps.vertices = {{dom.z[u]}, {dom.z[v]}};
        ps.u_start = upper_branch_u(p, dom.z[u]);
        ps.max_step = 0.25 * std::abs(dom.z[v] - dom.z[u]) + 1e-12;
        cd cont = continue_u(p, ps);
        cd closed = upper_branch_u(p, dom.z[v]);
        out.branch_audit_max = std::max(out.branch_audit_max, std::abs(cont - closed) / std::abs(closed));
        ++out.branch_audit_edges;
    }

    if (opt.throw_on_loop && out.loop_residual_max > opt.loop_tol * out.diameter)
        throw Error(Errc::LoopResidualExceeded,
                    "loop residual " + std::to_string(out.loop_residual_max) + " exceeds tolerance");
    return out;
}

const char* isometry_kind_name(IsometryKind k) {
    switch (k) {
    case IsometryKind::Identity: return "Identity";
    case IsometryKind::RotationReflectionJ: return "RotationReflectionJ";
    case IsometryKind::Sigma0: return "Sigma0";
    case IsometryKind::Sigma1: return "Sigma1";
    case IsometryKind::Sigma2Screw: return "Sigma2Screw";
    case IsometryKind::TranslationTau: return "TranslationTau";
    case IsometryKind::PlaneReflection: return "PlaneReflection";
    }
    return "?";
}

namespace {

bool near_int(double x) { return std::abs(x - std::round(x)) < 1e-9; }

// Normal flip of a copy relative to L n: -1 for the pi-rotation about the
// (0,a) line, which reverses the normal along that line.
int normal_sign(const IsometryElement& e) { return e.label.find("R_l") != std::string::npos ? -1 : 1; }

} // namespace

IsometryKind classify(const Eigen::Matrix3d& L, const Vec3& t) {
    double det = L.determinant(), l33 = L(2, 2);
    bool horiz_id = (L.topLeftCorner<2, 2>() - Eigen::Matrix2d::Identity()).norm() < 1e-9;
    bool moves = std::abs(t(2)) > 1e-9;
    if (det > 0 && l33 > 0) {
        if (horiz_id) return moves ? IsometryKind::TranslationTau : IsometryKind::Identity;
        return moves ? IsometryKind::Sigma2Screw : IsometryKind::RotationReflectionJ;
    }
    if (det > 0) // pi-rotation about a horizontal line at height t3/2
        return near_int(t(2) / 2) ? IsometryKind::Sigma1 : IsometryKind::Sigma0;
    if (l33 > 0) return moves ? IsometryKind::Sigma2Screw : IsometryKind::PlaneReflection;
    return horiz_id ? IsometryKind::PlaneReflection : IsometryKind::RotationReflectionJ;
}

IsometryElement compose(const IsometryElement& f, const IsometryElement& g) {
    IsometryElement h;
    h.L = f.L * g.L;
    h.t = f.L * g.t + f.t;
    h.kind = classify(h.L, h.t);
    h.label = f.label == "I" ? g.label : (g.label == "I" ? f.label : f.label + "*" + g.label);
    return h;
}

const IsometryElement& SymmetryGroup::fixing(BoundaryStretch s) const {
    switch (s) {
    case BoundaryStretch::I_ab: return s_a;
    case BoundaryStretch::I_b1:
    case BoundaryStretch::I_m10: return s_b;
    case BoundaryStretch::I_0a: return r_l;
    case BoundaryStretch::Arc: return s_c;
    }
    return s_a;
}

SymmetryGroup symmetry_group(int k) {
    if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1");
    SymmetryGroup G;
    G.k = k;
    const double th = pi / (k + 1);
    auto make = [](Eigen::Matrix3d L, Vec3 t, std::string label) {
        IsometryElement e;
        e.L = L, e.t = t, e.label = std::move(label);
        e.kind = classify(L, t);
        return e;
    };
    Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
    G.s_a = make(Eigen::Vector3d(-1, 1, 1).asDiagonal(), Vec3::Zero(), "S_a");
    Vec3 nb(std::cos(th), -std::sin(th), 0); // normal of the plane through (sin th, cos th, 0)
    G.s_b = make(I - 2 * nb * nb.transpose(), Vec3::Zero(), "S_b");
    G.s_c = make(Eigen::Vector3d(1, 1, -1).asDiagonal(), Vec3(0, 0, 1), "S_c");
    double phi = pi / 2 - th / 2;
    Vec3 l(std::cos(phi), std::sin(phi), 0);
    G.r_l = make(2 * l * l.transpose() - I, Vec3::Zero(), "R_l");
    G.tau = make(I, Vec3(0, 0, 2), "tau");
    IsometryElement id = make(I, Vec3::Zero(), "I");
    IsometryElement tau_inv = make(I, Vec3(0, 0, -2), "tau^-1");

    std::vector<IsometryElement> dihedral;
    IsometryElement rot = compose(G.s_a, G.s_b); // rotation by 2 th about x3 (up to sense)
    IsometryElement r = id;
    for (int j = 0; j <= k; ++j) {
        IsometryElement rj = r;
        rj.label = j == 0 ? "I" : "Rot^" + std::to_string(j);
        IsometryElement rs = compose(rj, G.s_a);
        dihedral.push_back(rj);
        dihedral.push_back(rs);
        r = compose(rot, r);
    }
    IsometryElement layer3 = compose(tau_inv, compose(G.s_c, G.r_l));
    const IsometryElement layers[] = {id, G.s_c, G.r_l, layer3};
    for (const IsometryElement& ly : layers)
        for (const IsometryElement& d : dihedral) G.copies.push_back(compose(d, ly));
    return G;
}

namespace {

struct CellKey {
    long long x, y, z;
    bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};
struct CellHash {
    size_t operator()(const CellKey& c) const {
        size_t h = static_cast<size_t>(c.x) * 73856093u;
        h ^= static_cast<size_t>(c.y) * 19349663u + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= static_cast<size_t>(c.z) * 83492791u + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }
};

cd gauss_from_normal(const Vec3& n) {
    double d = 1 - n(2);
    if (std::abs(d) < 1e-300) return cd(std::numeric_limits<double>::infinity(), 0);
    return cd(n(0), n(1)) / d;
}

Vec3 normal_from_gauss(cd g) {
    if (!std::isfinite(std::abs(g))) return Vec3(0, 0, 1);
    double m = std::norm(g);
    return Vec3(2 * g.real(), 2 * g.imag(), m - 1) / (m + 1);
}

} // namespace

Assembly assemble(const Piece& piece, const SymmetryGroup& group, int slabs, const AssembleOptions& opt) {
    if (slabs < 1) throw Error(Errc::RangeViolation, "slabs must be >= 1");
    const Mesh3& pm = piece.mesh;
    Assembly out;

    // Seams: every stretch vertex must be fixed by its generator.
    const BoundaryStretch all[] = {BoundaryStretch::I_0a, BoundaryStretch::I_ab, BoundaryStretch::I_b1,
                                   BoundaryStretch::Arc, BoundaryStretch::I_m10};
    for (size_t v = 0; v < pm.pos.size(); ++v)
        for (BoundaryStretch s : all)
            if (pm.tags[v] & stretch_tag(s)) {
                const IsometryElement& G = group.fixing(s);
                out.seam_max = std::max(out.seam_max, (G.apply(pm.pos[v]) - pm.pos[v]).norm());
            }
    if (out.seam_max > opt.weld_tol)
        throw Error(Errc::SeamMismatch, "boundary stretch moved by " + std::to_string(out.seam_max) +
                                            " under its reflection");

    Mesh3& m = out.mesh;
    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    const double h = opt.weld_tol;
    auto key = [&](const Vec3& x) {
        return CellKey{static_cast<long long>(std::floor(x(0) / h)), static_cast<long long>(std::floor(x(1) / h)),
                       static_cast<long long>(std::floor(x(2) / h))};
    };
    auto find_or_add = [&](const Vec3& x, cd g, double K) {
        CellKey c = key(x);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy)
                for (long long dz = -1; dz <= 1; ++dz) {
                    auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
                    if (it == grid.end()) continue;
                    for (int i : it->second)
                        if ((m.pos[i] - x).norm() <= h) {
                            ++out.welded;
                            return i;
                        }
                }
        int id = static_cast<int>(m.pos.size());
        m.pos.push_back(x);
        m.gauss.push_back(g);
        m.curvature.push_back(K);
        grid[c].push_back(id);
        return id;
    };

    const int ncopy = static_cast<int>(group.copies.size());
    std::vector<int> map(pm.pos.size());
    for (int s = 0; s < slabs; ++s)
        for (int c = 0; c < ncopy; ++c) {
            const IsometryElement& e = group.copies[c];
            int sign = normal_sign(e);
            Vec3 shift(0, 0, 2.0 * s);
            for (size_t v = 0; v < pm.pos.size(); ++v) {
                Vec3 n = sign * (e.L * normal_from_gauss(pm.gauss[v]));
                map[v] = find_or_add(e.apply(pm.pos[v]) + shift, gauss_from_normal(n), pm.curvature[v]);
            }
            bool flip = e.L.determinant() * sign < 0;
            for (const Tri& t : pm.tris) {
                Tri u{map[t[0]], map[t[1]], map[t[2]]};
                if (flip) std::swap(u[1], u[2]);
                m.tris.push_back(u);
                m.copy_of.push_back(s * ncopy + c);
            }
        }
    out.z_min = INFINITY, out.z_max = -INFINITY;
    for (const Vec3& x : m.pos) out.z_min = std::min(out.z_min, x(2)), out.z_max = std::max(out.z_max, x(2));
    return out;
}

int orientation_conflicts(const Mesh3& m) {
    std::map<std::pair<int, int>, int> directed;
    for (const Tri& t : m.tris)
        for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
    int bad = 0;
    for (auto& [e, n] : directed)
        if (n > 1) bad += n - 1;
    return bad;
}

std::vector<PathSpec> default_cycles(const Params& p, int vertices) {
    const double a = p.a, b = p.b;
    struct Circle {
        cd center;
        double radius;
    };
    double d = 0.3 * (b - a);
    double lo3 = b - d, hi3 = 1 / (b - d);
    const Circle circles[] = {
        {cd(0.5 * b, 0), 0.5 * b + 0.3 * (1 / b - b)},
        {cd(0.5 * (a + 1 / a), 0), 0.5 * (1 / a - a) + 0.3 * a},
        {cd(0.5 * (lo3 + hi3), 0), 0.5 * (hi3 - lo3)},
    };
    std::vector<PathSpec> out;
    for (const Circle& c : circles) {
        std::vector<PathVertex> vs;
        for (int i = 0; i <= vertices; ++i)
            vs.push_back({c.center + std::polar(c.radius, 2 * pi * (i % vertices) / vertices)});
        std::vector<cd> sheets = sheet_values(p, vs.front().coord);
        for (cd u0 : sheets) {
            PathSpec ps;
            ps.vertices = vs;
            ps.u_start = u0;
            ps.max_step = 0.02;
            out.push_back(ps);
        }
    }
    return out;
}

std::vector<CycleResidual> closure_check(const Params& p, const std::vector<PathSpec>& cycles) {
    std::vector<CycleResidual> out(cycles.size());
    parallel_for(cycles.size(), [&](size_t i) {
        TrackedPath tp = track_path(p, cycles[i]);
        CycleResidual r;
        r.label = "cycle " + std::to_string(i);
        for (const PathNode& nd : tp.nodes) {
            FormsValue f = phi_forms(p, nd.pt);
            r.int_dh += f.dh_coeff * nd.dz;
            r.int_g_dh += f.g * f.dh_coeff * nd.dz;
            r.int_dh_over_g += f.dh_coeff / f.g * nd.dz;
        }
        r.horizontal = std::abs(r.int_dh_over_g - std::conj(r.int_g_dh));
        double x = r.int_dh.real();
        r.vertical = std::abs(x - 2 * std::round(x / 2));
        out[i] = r;
    });
    return out;
}

double curvature_integral(const Mesh3& m) {
    double s = 0;
    for (const Tri& t : m.tris) {
        double area = 0.5 * (m.pos[t[1]] - m.pos[t[0]]).cross(m.pos[t[2]] - m.pos[t[0]]).norm();
        s += area * (m.curvature[t[0]] + m.curvature[t[1]] + m.curvature[t[2]]) / 3;
    }
    return s;
}

double total_curvature_target(int k) { return -pi * (2 * k + 1) / (k + 1); }

EndHeights end_heights(const Domain2& dom, const Mesh3& piece) {
    EndHeights out;
    const int n = dom.resolution;
    for (int i = 0; i < dom.ring_count() && dom.radii[i] <= 16 * dom.cutoff; ++i) {
        // trapezoid mean in the angle
        double sum = 0, sq = 0, w = 0;
        for (int j = 0; j <= n; ++j) {
            double wj = (j == 0 || j == n) ? 0.5 : 1.0;
            double x = piece.pos[dom.vertex(i, j)](2);
            sum += wj * x, sq += wj * x * x, w += wj;
        }
        double mean = sum / w;
        out.radii.push_back(dom.radii[i]);
        out.means.push_back(mean);
        out.spreads.push_back(std::sqrt(std::max(0.0, sq / w - mean * mean)));
    }
    // x3 mean ~ h + A r^{1/2} + B r
    const int m = static_cast<int>(out.radii.size());
    if (m >= 3) {
        Eigen::MatrixXd A(m, 3);
        Eigen::VectorXd y(m);
        for (int i = 0; i < m; ++i) {
            double r = out.radii[i] / dom.cutoff;
            A(i, 0) = 1, A(i, 1) = std::sqrt(r), A(i, 2) = r;
            y(i) = out.means[i];
        }
        out.extrapolated = A.colPivHouseholderQr().solve(y)(0);
    } else if (m == 2) {
        double s0 = std::sqrt(out.radii[0]), s1 = std::sqrt(out.radii[1]);
        out.extrapolated = (out.means[0] * s1 - out.means[1] * s0) / (s1 - s0);
    } else if (m == 1) {
        out.extrapolated = out.means[0];
    }
    return out;
}

Vec3 projection_axis(int k) {
    double c = -pi * (k - 1) / (2.0 * k + 2);
    return Vec3(-std::sin(c), -std::cos(c), 0);
}

EmbeddednessReport embeddedness_report(const Params& p, const Domain2& dom, const Piece& piece, int samples,
                                       const Mesh3* assembled, double delta) {
    EmbeddednessReport rep;
    rep.axis = projection_axis(p.k);
    const Vec3 e3(0, 0, 1);
    const Vec3 t1 = e3.cross(rep.axis); // (t1, e3, axis) right handed
    const Mesh3& m = piece.mesh;
    auto proj = [&](const Vec3& x) { return Vec2(x.dot(t1), x(2)); };

    // 𝒞: along the real axis outward, around the arc, back along [-1, 0].
    const int n = dom.resolution, R = dom.ring_count();
    std::vector<int> path;
    std::vector<BoundaryStretch> seg_stretch;
    for (int i = 0; i < R; ++i) path.push_back(dom.vertex(i, 0));
    for (int j = 1; j <= n; ++j) path.push_back(dom.vertex(R - 1, j));
    for (int i = R - 2; i >= 0; --i) path.push_back(dom.vertex(i, n));
    for (size_t s = 0; s + 1 < path.size(); ++s) {
        unsigned common = dom.tags[path[s]] & dom.tags[path[s + 1]];
        BoundaryStretch st = BoundaryStretch::Arc;
        for (BoundaryStretch c : {BoundaryStretch::I_0a, BoundaryStretch::I_ab, BoundaryStretch::I_b1,
                                  BoundaryStretch::Arc, BoundaryStretch::I_m10})
            if (common & stretch_tag(c)) st = c;
        seg_stretch.push_back(st);
    }
    std::vector<Vec2> c2;
    for (int v : path) c2.push_back(proj(m.pos[v]));
    const size_t ns = c2.size() - 1;
    for (size_t i = 0; i < ns; ++i)
        for (size_t j = i + 2; j < ns; ++j)
            if (segments_intersect(c2[i], c2[i + 1], c2[j], c2[j + 1])) ++rep.boundary_crossings;
    rep.boundary_simple = rep.boundary_crossings == 0;
    for (BoundaryStretch st : {BoundaryStretch::I_0a, BoundaryStretch::I_ab, BoundaryStretch::I_b1,
                               BoundaryStretch::Arc, BoundaryStretch::I_m10}) {
        int pos = 0, neg = 0;
        for (size_t i = 0; i + 1 < ns; ++i) {
            if (seg_stretch[i] != st || seg_stretch[i + 1] != st) continue;
            Vec2 d0 = c2[i + 1] - c2[i], d1 = c2[i + 2] - c2[i + 1];
            double cr = d0.x() * d1.y() - d0.y() * d1.x();
            if (std::abs(cr) <= 1e-9 * d0.norm() * d1.norm()) continue;
            (cr > 0 ? pos : neg)++;
        }
        rep.stretch_monotone.push_back({st, pos == 0 || neg == 0});
    }
    for (size_t i = 0; i < dom.tags.size(); ++i)
        if (dom.tags[i] & TagIab) rep.axis_deviation = std::max(rep.axis_deviation, std::abs(proj(m.pos[i]).x()));

    for (const Tri& t : m.tris) {
        Vec2 a = proj(m.pos[t[0]]), b = proj(m.pos[t[1]]), c = proj(m.pos[t[2]]);
        Vec2 u = b - a, v = c - a;
        double ar = u.x() * v.y() - u.y() * v.x();
        if (std::abs(ar) <= 1e-14 * u.squaredNorm() + 1e-14 * v.squaredNorm()) ++rep.orientation_degenerate;
        else if (ar > 0) ++rep.orientation_positive;
        else ++rep.orientation_negative;
    }

    std::vector<int> interior;
    for (size_t i = 0; i < dom.tags.size(); ++i)
        if (dom.tags[i] == 0) interior.push_back(static_cast<int>(i));
    std::mt19937_64 rng(20240501);
    if (interior.size() >= 2) {
        std::uniform_int_distribution<size_t> pick(0, interior.size() - 1);
        for (int s = 0; s < samples; ++s) {
            int i = interior[pick(rng)], j = interior[pick(rng)];
            if (i == j) continue;
            ++rep.sample_pairs;
            double d2 = (proj(m.pos[i]) - proj(m.pos[j])).norm();
            double d3 = (m.pos[i] - m.pos[j]).norm();
            if (d2 <= 1e-12 * piece.diameter && d3 > 1e-9 * piece.diameter) ++rep.sample_collisions;
        }
    }

    if (assembled) {
        FaceDistance fd = min_nonadjacent_distance(assembled->pos, assembled->tris, delta);
        rep.min_face_distance = fd.distance;
        rep.candidate_pairs = fd.candidate_pairs;
        rep.search_radius = delta;
    }
    return rep;
}

const char* divisor_site_name(DivisorSite s) {
    switch (s) {
    case DivisorSite::End0: return "End0";
    case DivisorSite::EndInf: return "EndInf";
    case DivisorSite::QPoint: return "QPoint";
    case DivisorSite::RPoint: return "RPoint";
    }
    return "?";
}

const char* divisor_function_name(DivisorFunction f) {
    switch (f) {
    case DivisorFunction::GaussMap: return "GaussMap";
    case DivisorFunction::HeightForm: return "HeightForm";
    case DivisorFunction::GaussDifferential: return "DGauss";
    }
    return "?";
}

DivisorOrder divisor_order(const Params& p, DivisorSite site, DivisorFunction fn) {
    const int k = p.k, N = 2 * k + 2;
    int g_order = 0, dh_order = k;
    double c = 0;
    switch (site) {
    case DivisorSite::End0: g_order = k + 2; c = 0; break;
    case DivisorSite::EndInf: g_order = -(k + 2); break;
    case DivisorSite::QPoint: g_order = -k; c = p.a; break;
    case DivisorSite::RPoint: g_order = k; c = p.b; break;
    }
    DivisorOrder out{site, fn, 0, 0, 0};
    out.expected = fn == DivisorFunction::GaussMap ? g_order : fn == DivisorFunction::HeightForm ? dh_order : g_order - 1;

    const int npts = 16;
    std::vector<double> xs, ys;
    for (int i = 0; i < npts; ++i) {
        double r = std::pow(10.0, -8 + 3.0 * i / (npts - 1)); // |z - c|, or 1/|z| at infinity
        cd z0, dz;
        double zeta, dz_dzeta;
        switch (site) {
        case DivisorSite::EndInf:
            z0 = cd(0, 1 / r), dz = 0;
            zeta = std::pow(r, 1.0 / N);
            dz_dzeta = N * std::pow(zeta, -N - 1);
            break;
        case DivisorSite::RPoint:
            z0 = c, dz = cd(0, r);
            zeta = std::pow(r, 1.0 / (k + 1));
            dz_dzeta = (k + 1) * std::pow(zeta, k);
            break;
        default:
            z0 = c, dz = cd(0, r);
            zeta = std::pow(r, 1.0 / N);
            dz_dzeta = N * std::pow(zeta, N - 1);
            break;
        }
        cd z = z0 + dz;
        cd u = upper_branch_u(p, z0, dz);
        cd g = z / std::pow(u, k);
        double val = 0;
        switch (fn) {
        case DivisorFunction::GaussMap: val = std::abs(g); break;
        case DivisorFunction::HeightForm: val = std::abs(domain_products(p, z0, dz).dh) * dz_dzeta; break;
        case DivisorFunction::GaussDifferential: {
            // dg/g = dz/z - k du/u, with z - c kept exact
            CoverShape s = cover_shape(p);
            cd lg = 1.0 / z;
            for (const Factor& f : s.r) {
                cd d = (f.c == std::real(z0) && z0.imag() == 0) ? dz : z - f.c;
                lg -= double(k) * f.e / N / d;
            }
            val = std::abs(g * lg) * dz_dzeta;
            break;
        }
        }
        xs.push_back(std::log(zeta));
        ys.push_back(std::log(val));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < npts; ++i) mx += xs[i], my += ys[i];
    mx /= npts, my /= npts;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < npts; ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    out.slope = sxy / sxx;
    for (int i = 0; i < npts; ++i)
        out.fit_error = std::max(out.fit_error, std::abs(ys[i] - (my + out.slope * (xs[i] - mx))));
    if (!std::isfinite(out.slope) || out.fit_error > 0.05)
        throw Error(Errc::FitFailure, std::string("log-log fit is not linear at ") + divisor_site_name(site));
    return out;
}

std::vector<DivisorOrder> divisor_order_check(const Params& p) {
    std::vector<DivisorOrder> out;
    for (DivisorSite s : {DivisorSite::End0, DivisorSite::EndInf, DivisorSite::QPoint, DivisorSite::RPoint})
        for (DivisorFunction f :
             {DivisorFunction::GaussMap, DivisorFunction::HeightForm, DivisorFunction::GaussDifferential})
            out.push_back(divisor_order(p, s, f));
    return out;
}

} // namespace pforge

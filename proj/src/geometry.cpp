#include "pforge/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pforge {

// Closest point on triangle by Voronoi regions (Ericson, RTCD 5.1.5).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return (p - a).norm();
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return (p - b).norm();
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return (p - c).norm();
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return (p - (b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))))).norm();
    double den = va + vb + vc;
    if (!(std::abs(den) > 0)) // degenerate triangle
        return std::min({(p - a).norm(), (p - b).norm(), (p - c).norm()});
    double v = vb / den, w = vc / den;
    return (p - (a + ab * v + ac * w)).norm();
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0, t = 0;
    const double eps = 1e-300;
    if (a <= eps && e <= eps) return r.norm();
    if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = d1.dot(d2);
            double den = a * e - b * b;
            s = den > 0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p0 + d1 * s) - (q0 + d2 * t)).norm();
}

bool segment_hits_triangle(const Vec3& p0, const Vec3& p1, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 d = p1 - p0, e1 = b - a, e2 = c - a;
    Vec3 h = d.cross(e2);
    double det = e1.dot(h);
    double scale = e1.norm() * e2.norm() * d.norm();
    if (std::abs(det) <= 1e-14 * scale) return false; // parallel; handled by edge distances
    double inv = 1.0 / det;
    Vec3 s = p0 - a;
    double u = inv * s.dot(h);
    if (u < 0 || u > 1) return false;
    Vec3 q = s.cross(e1);
    double v = inv * d.dot(q);
    if (v < 0 || u + v > 1) return false;
    double t = inv * e2.dot(q);
    return t >= 0 && t <= 1;
}

double triangle_distance(const std::array<Vec3, 3>& t, const std::array<Vec3, 3>& s) {
    for (int i = 0; i < 3; ++i) {
        if (segment_hits_triangle(t[i], t[(i + 1) % 3], s[0], s[1], s[2])) return 0.0;
        if (segment_hits_triangle(s[i], s[(i + 1) % 3], t[0], t[1], t[2])) return 0.0;
    }
    double best = INFINITY;
    for (int i = 0; i < 3; ++i) {
        best = std::min(best, point_triangle_distance(t[i], s[0], s[1], s[2]));
        best = std::min(best, point_triangle_distance(s[i], t[0], t[1], t[2]));
        for (int j = 0; j < 3; ++j)
            best = std::min(best, segment_segment_distance(t[i], t[(i + 1) % 3], s[j], s[(j + 1) % 3]));
    }
    return best;
}

static double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

static bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) && std::min(p.y(), q.y()) <= r.y() &&
           r.y() <= std::max(p.y(), q.y());
}

bool segments_intersect(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
    double d1 = cross2(q1 - q0, p0 - q0), d2 = cross2(q1 - q0, p1 - q0);
    double d3 = cross2(p1 - p0, q0 - p0), d4 = cross2(p1 - p0, q1 - p0);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    if (d1 == 0 && on_segment(q0, q1, p0)) return true;
    if (d2 == 0 && on_segment(q0, q1, p1)) return true;
    if (d3 == 0 && on_segment(p0, p1, q0)) return true;
    if (d4 == 0 && on_segment(p0, p1, q1)) return true;
    return false;
}

namespace {

struct Box {
    Vec3 lo = Vec3::Constant(INFINITY), hi = Vec3::Constant(-INFINITY);
    void add(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void add(const Box& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    double gap(const Box& b) const {
        Vec3 d = (b.lo - hi).cwiseMax(lo - b.hi).cwiseMax(Vec3::Zero());
        return d.norm();
    }
};

struct Node {
    Box box;
    int left = -1, right = -1;
    int begin = 0, end = 0; // leaf range into order
};

struct Tree {
    std::vector<Node> nodes;
    std::vector<int> order;
    const std::vector<Box>* boxes;
    std::vector<Vec3> centers;

    int build(int begin, int end) {
        Node n;
        n.begin = begin;
        n.end = end;
        for (int i = begin; i < end; ++i) n.box.add((*boxes)[order[i]]);
        int id = static_cast<int>(nodes.size());
        nodes.push_back(n);
        if (end - begin <= 4) return id;
        Box cb;
        for (int i = begin; i < end; ++i) cb.add(centers[order[i]]);
        int axis;
        (cb.hi - cb.lo).maxCoeff(&axis);
        int mid = (begin + end) / 2;
        std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                         [&](int x, int y) { return centers[x][axis] < centers[y][axis]; });
        int l = build(begin, mid);
        int r = build(mid, end);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }
};

} // namespace

FaceDistance min_nonadjacent_distance(const std::vector<Vec3>& pos, const std::vector<Tri>& tris, double delta) {
    FaceDistance out{delta, 0};
    if (tris.size() < 2) return out;
    std::vector<Box> boxes(tris.size());
    Tree tree;
    tree.boxes = &boxes;
    tree.centers.resize(tris.size());
    for (size_t i = 0; i < tris.size(); ++i) {
        for (int v : tris[i]) boxes[i].add(pos[v]);
        tree.centers[i] = 0.5 * (boxes[i].lo + boxes[i].hi);
    }
    tree.order.resize(tris.size());
    std::iota(tree.order.begin(), tree.order.end(), 0);
    tree.nodes.reserve(2 * tris.size() / 2 + 8);
    tree.build(0, static_cast<int>(tris.size()));

    double best = delta;
    std::vector<int> stack;
    for (size_t i = 0; i < tris.size(); ++i) {
        const Tri& ti = tris[i];
        std::array<Vec3, 3> ta{pos[ti[0]], pos[ti[1]], pos[ti[2]]};
        stack.assign(1, 0);
        while (!stack.empty()) {
            const Node& n = tree.nodes[stack.back()];
            stack.pop_back();
            if (n.box.gap(boxes[i]) >= best) continue;
            if (n.left >= 0) {
                stack.push_back(n.left);
                stack.push_back(n.right);
                continue;
            }
            for (int q = n.begin; q < n.end; ++q) {
                int j = tree.order[q];
                if (j <= static_cast<int>(i)) continue;
                const Tri& tj = tris[j];
                bool shared = false;
                for (int x : ti)
                    for (int y : tj) shared |= (x == y);
                if (shared) continue;
                if (boxes[j].gap(boxes[i]) >= best) continue;
                ++out.candidate_pairs;
                double d = triangle_distance(ta, {pos[tj[0]], pos[tj[1]], pos[tj[2]]});
                if (d < best) {
                    best = d;
                    out.tri_i = static_cast<int>(i);
                    out.tri_j = j;
                }
            }
        }
    }
    out.distance = best;
    return out;
}

} // namespace pforge

#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace pforge {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Tri = std::array<int, 3>;

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
bool segment_hits_triangle(const Vec3& p0, const Vec3& p1, const Vec3& a, const Vec3& b, const Vec3& c);
// Exact Euclidean distance between two triangles; 0 when they intersect.
double triangle_distance(const std::array<Vec3, 3>& t, const std::array<Vec3, 3>& s);

// Proper or touching intersection of closed 2D segments.
bool segments_intersect(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1);

struct FaceDistance {
    double distance; // min over candidate pairs, capped at the search radius
    long candidate_pairs;
    int tri_i = -1, tri_j = -1;
};

// Minimum distance over triangle pairs that share no vertex, searched up to
// delta; pairs farther apart than delta are not examined.
FaceDistance min_nonadjacent_distance(const std::vector<Vec3>& pos, const std::vector<Tri>& tris, double delta);

} // namespace pforge

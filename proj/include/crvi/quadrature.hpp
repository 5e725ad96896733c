// Fixed quadrature rules on triangles and edges.
//
// The 3-point edge-midpoint rule is exact for quadratics and is the rule the
// scheme itself uses (it makes the nonconforming P1 mass matrix diagonal).
// The 7-point rule (degree 5) backs the diagnostics right-hand sides and the
// oracle integrations in the tests; all its nodes are strictly interior, which
// matters when evaluating piecewise fields of a coarser nested mesh.

#pragma once

#include <array>

namespace crvi::quad {

struct TrianglePoint {
  double l0, l1, l2; // barycentric coordinates
  double w;          // weight, the rule's weights sum to 1
};

// Midpoint of edge k (the edge opposite vertex k) carries barycentric
// coordinate 0 in slot k. Order matches the local edge order of a cell.
inline constexpr std::array<TrianglePoint, 3> midpoint_rule = {{
    {0.0, 0.5, 0.5, 1.0 / 3.0},
    {0.5, 0.0, 0.5, 1.0 / 3.0},
    {0.5, 0.5, 0.0, 1.0 / 3.0},
}};

// Degree-5 rule: barycenter plus two symmetric orbits.
inline constexpr double seven_a1 = 0.10128650732345634;
inline constexpr double seven_a2 = 0.47014206410511505;
inline constexpr double seven_w1 = 0.12593918054482716;
inline constexpr double seven_w2 = 0.13239415278850618;
inline constexpr double seven_b1 = 1.0 - 2.0 * seven_a1;
inline constexpr double seven_b2 = 1.0 - 2.0 * seven_a2;

inline constexpr std::array<TrianglePoint, 7> seven_point_rule = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
    {seven_b1, seven_a1, seven_a1, seven_w1},
    {seven_a1, seven_b1, seven_a1, seven_w1},
    {seven_a1, seven_a1, seven_b1, seven_w1},
    {seven_b2, seven_a2, seven_a2, seven_w2},
    {seven_a2, seven_b2, seven_a2, seven_w2},
    {seven_a2, seven_a2, seven_b2, seven_w2},
}};

// 2-point Gauss rule on a segment, parameters in (0,1), weights 1/2 each.
// Exact for cubics along the edge.
inline constexpr std::array<double, 2> edge_gauss_points = {
    0.21132486540518713, 0.78867513459481287};

} // namespace crvi::quad

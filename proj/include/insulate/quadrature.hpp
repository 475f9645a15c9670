#pragma once

#include <array>

#include "insulate/types.hpp"

namespace insulate {

// Weights sum to 1 (multiply by the area or the length).
struct TriangleRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weight;
};

struct SegmentRule {
  std::array<double, 5> t;  // in [0,1]
  std::array<double, 5> weight;
};

// 7-point rule, exact up to degree 5.
const TriangleRule& triangle_rule();
// 5-point Gauss-Legendre, exact up to degree 9.
const SegmentRule& segment_rule();

double integrate_triangle(const ScalarFn& f, Vec2 a, Vec2 b, Vec2 c);
double integrate_segment(const ScalarFn& f, Vec2 a, Vec2 b);
// Composite version: the segment is cut into `pieces` equal parts.
double integrate_segment(const ScalarFn& f, Vec2 a, Vec2 b, int pieces);
// Composite version on `4^depth` congruent subtriangles.
double integrate_triangle(const ScalarFn& f, Vec2 a, Vec2 b, Vec2 c, int depth);

}  // namespace insulate

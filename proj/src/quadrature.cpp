#include "insulate/quadrature.hpp"

#include <cmath>

namespace insulate {

const TriangleRule& triangle_rule() {
  static const TriangleRule r = [] {
    TriangleRule q{};
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = 1.0 - 2.0 * a1;
    const double a2 = (6.0 + s15) / 21.0, b2 = 1.0 - 2.0 * a2;
    const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
    q.bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    q.weight[0] = 9.0 / 40.0;
    q.bary[1] = {a1, a1, b1};
    q.bary[2] = {a1, b1, a1};
    q.bary[3] = {b1, a1, a1};
    q.bary[4] = {a2, a2, b2};
    q.bary[5] = {a2, b2, a2};
    q.bary[6] = {b2, a2, a2};
    for (int i = 1; i <= 3; ++i) q.weight[i] = w1;
    for (int i = 4; i <= 6; ++i) q.weight[i] = w2;
    return q;
  }();
  return r;
}

const SegmentRule& segment_rule() {
  static const SegmentRule r = [] {
    SegmentRule q{};
    const double s = 2.0 * std::sqrt(10.0 / 7.0);
    const double x1 = std::sqrt(5.0 - s) / 3.0, x2 = std::sqrt(5.0 + s) / 3.0;
    const double r70 = 13.0 * std::sqrt(70.0);
    const double xs[5] = {-x2, -x1, 0.0, x1, x2};
    const double ws[5] = {(322.0 - r70) / 900.0, (322.0 + r70) / 900.0, 128.0 / 225.0,
                          (322.0 + r70) / 900.0, (322.0 - r70) / 900.0};
    for (int i = 0; i < 5; ++i) {
      q.t[i] = 0.5 * (1.0 + xs[i]);
      q.weight[i] = 0.5 * ws[i];
    }
    return q;
  }();
  return r;
}

double integrate_triangle(const ScalarFn& f, Vec2 a, Vec2 b, Vec2 c) {
  const TriangleRule& q = triangle_rule();
  const double area = 0.5 * std::abs(cross(b - a, c - a));
  double s = 0.0;
  for (int i = 0; i < 7; ++i) {
    const auto& l = q.bary[i];
    s += q.weight[i] * f(l[0] * a + l[1] * b + l[2] * c);
  }
  return area * s;
}

double integrate_triangle(const ScalarFn& f, Vec2 a, Vec2 b, Vec2 c, int depth) {
  if (depth <= 0) return integrate_triangle(f, a, b, c);
  const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return integrate_triangle(f, a, ab, ca, depth - 1) + integrate_triangle(f, ab, b, bc, depth - 1) +
         integrate_triangle(f, ca, bc, c, depth - 1) + integrate_triangle(f, bc, ca, ab, depth - 1);
}

double integrate_segment(const ScalarFn& f, Vec2 a, Vec2 b) {
  const SegmentRule& q = segment_rule();
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += q.weight[i] * f(a + q.t[i] * (b - a));
  return norm(b - a) * s;
}

double integrate_segment(const ScalarFn& f, Vec2 a, Vec2 b, int pieces) {
  double s = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const Vec2 p = a + (double(k) / pieces) * (b - a);
    const Vec2 q = a + (double(k + 1) / pieces) * (b - a);
    s += integrate_segment(f, p, q);
  }
  return s;
}

}  // namespace insulate

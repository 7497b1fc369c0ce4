#pragma once

#include <algorithm>
#include <cmath>

#include "shm/core_model.hpp"

namespace shm {

/// Line-of-sight geometry of one subject/object pair at one instant.
struct PairGeometry {
  double d_sep = 0.0;          // m
  Vec2 u;                      // unit vector subject -> object, zero when co-located
  double s_subject = 0.0;      // m/s, subject velocity projected on u
  double s_object = 0.0;       // m/s, object velocity projected on u
  double closing_speed = 0.0;  // m/s, positive while the gap shrinks
  double s_abs = 0.0;          // m/s, subject speed

  bool operator==(const PairGeometry&) const = default;
};

inline double separation_distance(const Vec2& p_v, const Vec2& p_o) { return (p_o - p_v).norm(); }

/// Gap between two axis-aligned boxes centered at `p_v` and `p_o`; 0 when they overlap.
inline double box_separation(const Vec2& p_v, const Vec2& half_v, const Vec2& p_o,
                             const Vec2& half_o) {
  const Vec2 d = p_o - p_v;
  const double gx = std::max(0.0, std::abs(d.x) - (half_v.x + half_o.x));
  const double gy = std::max(0.0, std::abs(d.y) - (half_v.y + half_o.y));
  return std::hypot(gx, gy);
}

inline PairGeometry pair_geometry(const ObjectState& subject, const ObjectState& object) {
  PairGeometry g;
  const Vec2 delta = object.position - subject.position;
  const double centers = delta.norm();
  g.s_abs = subject.velocity.norm();
  g.d_sep = (subject.half_extent && object.half_extent)
                ? box_separation(subject.position, *subject.half_extent, object.position,
                                 *object.half_extent)
                : centers;
  if (centers == 0.0) return g;

  g.u = delta * (1.0 / centers);
  g.s_subject = subject.velocity.dot(g.u);
  g.s_object = object.velocity.dot(g.u);
  g.closing_speed = g.s_subject - g.s_object;
  return g;
}

/// Non-negative relative speed fed to the hazard measures.
inline double relative_speed_magnitude(const PairGeometry& g) { return std::abs(g.closing_speed); }

}  // namespace shm

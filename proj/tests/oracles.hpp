#pragma once

// Reference computations used by the tests. These take a different
// algebraic route from the library so agreement means something.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "shm/core_model.hpp"

namespace shm::oracle {

/// -d/dt |r| for r = p_o - p_v, evaluated as -(r . w) / |r| with w = v_o - v_v.
inline double closing_speed(const ObjectState& subject, const ObjectState& object) {
  const double rx = object.position.x - subject.position.x;
  const double ry = object.position.y - subject.position.y;
  const double wx = object.velocity.x - subject.velocity.x;
  const double wy = object.velocity.y - subject.velocity.y;
  const double r = std::sqrt(rx * rx + ry * ry);
  return r == 0.0 ? 0.0 : -(rx * wx + ry * wy) / r;
}

/// Separation at time t along constant-velocity tracks starting at the given states.
inline double separation_at(const ObjectState& a, const ObjectState& b, double t) {
  const double dx = (b.position.x + b.velocity.x * t) - (a.position.x + a.velocity.x * t);
  const double dy = (b.position.y + b.velocity.y * t) - (a.position.y + a.velocity.y * t);
  return std::sqrt(dx * dx + dy * dy);
}

/// Forward finite difference of the separation, negated.
inline double fd_closing_speed(const ObjectState& a, const ObjectState& b, double dt) {
  return -(separation_at(a, b, dt) - separation_at(a, b, 0.0)) / dt;
}

/// Closest approach of two constant-velocity tracks over t in [0, inf): (distance, time).
inline std::pair<double, double> closest_approach(const ObjectState& a, const ObjectState& b) {
  const double rx = b.position.x - a.position.x;
  const double ry = b.position.y - a.position.y;
  const double wx = b.velocity.x - a.velocity.x;
  const double wy = b.velocity.y - a.velocity.y;
  const double ww = wx * wx + wy * wy;
  const double t = ww == 0.0 ? 0.0 : std::max(0.0, -(rx * wx + ry * wy) / ww);
  return {separation_at(a, b, t), t};
}

/// Deterministic uniform doubles for hand-rolled property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  bool coin() { return (gen_() & 1u) != 0; }

 private:
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 gen_;
};

inline ObjectState random_state(Rng& rng, std::string id, double extent = 200.0, double speed = 40.0) {
  return {std::move(id), ObjectKind::car,
          {rng.uniform(-extent, extent), rng.uniform(-extent, extent)},
          {rng.uniform(-speed, speed), rng.uniform(-speed, speed)},
          {}};
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace shm::oracle

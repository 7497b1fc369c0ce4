#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shm/core_model.hpp"
#include "shm/hazard_measure.hpp"
#include "shm/kinematics.hpp"

namespace shm {

struct TtcSample {
  double t = 0.0;
  std::string object_id;
  std::optional<double> ttc;  // empty when not converging

  bool operator==(const TtcSample&) const = default;
};

/// Constant-velocity closure time along the line of sight.
inline std::optional<double> ttc(double d_sep, double closing_speed) {
  if (!(closing_speed > 0.0)) return std::nullopt;
  return d_sep / closing_speed;
}

inline std::optional<double> ttc(const PairGeometry& g) { return ttc(g.d_sep, g.closing_speed); }

inline std::vector<TtcSample> ttc_frame(const FrameSnapshot& f) {
  std::vector<TtcSample> out;
  out.reserve(f.objects.size());
  for (const auto& o : f.objects) out.push_back({f.t, o.id, ttc(pair_geometry(f.subject, o))});
  return out;
}

/// One head-on encounter scored by both TTC and the hazard measure.
struct Encounter {
  std::string name;
  double d_sep = 0.0;
  double closing_speed = 0.0;
  double ttc = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};

struct WitnessReport {
  Encounter a;
  Encounter b;
  bool ttc_ranks_b_more_urgent = false;
  bool m2_ranks_a_more_hazardous = false;

  [[nodiscard]] bool inverted() const { return ttc_ranks_b_more_urgent && m2_ranks_a_more_hazardous; }
};

namespace detail {

inline Encounter head_on(std::string name, double gap, double closing) {
  const ObjectState subject{"subject", ObjectKind::car, {0.0, 0.0}, {closing, 0.0}, {}};
  const ObjectState object{name, ObjectKind::car, {gap, 0.0}, {0.0, 0.0}, {}};
  const PairGeometry g = pair_geometry(subject, object);
  const PairSample s = evaluate_pair(subject, object, 0.0, HazardThresholds{});
  return {std::move(name), g.d_sep, g.closing_speed, ttc(g).value_or(0.0), s.m2, s.m3};
}

}  // namespace detail

/// Two encounters that TTC and m2 rank in opposite order: a fast closure
/// from far away (A) and a slow creep at short range (B). TTC calls B more
/// urgent, while m2 reflects A's far larger closing energy.
inline WitnessReport non_monotonicity_witness() {
  WitnessReport r{detail::head_on("A", 70.0, 35.0), detail::head_on("B", 1.5, 1.0)};
  r.ttc_ranks_b_more_urgent = r.b.ttc < r.a.ttc;
  r.m2_ranks_a_more_hazardous = r.a.m2 > r.b.m2;
  return r;
}

/// Per-sample comparison row: the hazard measure next to TTC.
struct ComparisonRow {
  double t = 0.0;
  std::string object_id;
  double d_sep = 0.0;
  double closing_speed = 0.0;
  std::optional<double> ttc;
  double m2 = 0.0;
  double m3 = 0.0;
  HazardClass hazard_class = HazardClass::NoHazard;
};

inline std::vector<ComparisonRow> compare_scenario(const Scenario& s,
                                                   const HazardThresholds& thresholds) {
  std::vector<ComparisonRow> rows;
  for (const auto& f : s.frames) {
    for (const auto& o : f.objects) {
      const PairGeometry g = pair_geometry(f.subject, o);
      const PairSample p = evaluate_pair(f.subject, o, f.t, thresholds);
      rows.push_back({f.t, o.id, g.d_sep, g.closing_speed, ttc(g), p.m2, p.m3, p.hazard_class});
    }
  }
  return rows;
}

}  // namespace shm

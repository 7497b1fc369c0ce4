#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shm/core_model.hpp"
#include "shm/kinematics.hpp"

namespace shm {

/// Separations below this are treated as contact; measures divide by at least this much.
inline constexpr double kDistanceFloor = 0.01;  // m

struct HazardThresholds {
  double safe_max = 10.0;        // m/s^2
  double hazardous_max = 100.0;  // m/s^2

  bool operator==(const HazardThresholds&) const = default;

  void validate() const {
    if (!(0.0 < safe_max && safe_max < hazardous_max && std::isfinite(hazardous_max)))
      throw ConfigError("thresholds must satisfy 0 < safe_max < hazardous_max");
  }
};

enum class HazardClass { NoHazard = 0, Safe = 1, Hazardous = 2, Unsafe = 3 };
inline constexpr std::size_t kHazardClassCount = 4;

inline std::string_view to_string(HazardClass c) {
  switch (c) {
    case HazardClass::NoHazard: return "NoHazard";
    case HazardClass::Safe: return "Safe";
    case HazardClass::Hazardous: return "Hazardous";
    case HazardClass::Unsafe: return "Unsafe";
  }
  return "NoHazard";
}

inline std::optional<HazardClass> parse_hazard_class(std::string_view s) {
  for (auto c : {HazardClass::NoHazard, HazardClass::Safe, HazardClass::Hazardous,
                 HazardClass::Unsafe}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct PairSample {
  double t = 0.0;
  std::string subject_id;
  std::string object_id;
  double d_sep = 0.0;  // floored at kDistanceFloor
  double closing_speed = 0.0;
  double s_rel = 0.0;
  double s_abs = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  HazardClass hazard_class = HazardClass::NoHazard;
  bool collision = false;

  bool operator==(const PairSample&) const = default;

  /// Samples that carry a hazard value (converging or in contact).
  [[nodiscard]] bool hazard_bearing() const { return hazard_class != HazardClass::NoHazard; }
};

/// Squared relative speed over separation.
inline double measure_m2(double s_rel, double d_sep) {
  return s_rel * s_rel / std::max(d_sep, kDistanceFloor);
}

/// Like m2, but the speed term is the larger of subject speed and relative speed.
inline double measure_m3(double s_abs, double s_rel, double d_sep) {
  const double s = std::max(s_abs, s_rel);
  return s * s / std::max(d_sep, kDistanceFloor);
}

/// Bands a hazard value. Boundaries are inclusive on the lower class.
inline HazardClass classify(double value, const HazardThresholds& th) {
  if (value <= th.safe_max) return HazardClass::Safe;
  if (value <= th.hazardous_max) return HazardClass::Hazardous;
  return HazardClass::Unsafe;
}

/// Scores one subject/object pair using only their current states.
inline PairSample evaluate_pair(const ObjectState& subject, const ObjectState& object, double t,
                                const HazardThresholds& thresholds) {
  const PairGeometry g = pair_geometry(subject, object);
  PairSample s;
  s.t = t;
  s.subject_id = subject.id;
  s.object_id = object.id;
  s.collision = g.d_sep < kDistanceFloor;
  s.d_sep = std::max(g.d_sep, kDistanceFloor);
  s.closing_speed = g.closing_speed;
  s.s_rel = relative_speed_magnitude(g);
  s.s_abs = g.s_abs;
  s.m2 = measure_m2(s.s_rel, s.d_sep);
  s.m3 = measure_m3(s.s_abs, s.s_rel, s.d_sep);
  s.hazard_class = (s.closing_speed <= 0.0 && !s.collision) ? HazardClass::NoHazard
                                                            : classify(s.m3, thresholds);
  return s;
}

struct FrameResult {
  double t = 0.0;
  std::vector<PairSample> samples;  // one per traffic object, input order
  double max_m3 = 0.0;              // over hazard-bearing samples, 0 if none
  std::optional<std::size_t> max_index;
  double running_max_m3 = 0.0;  // filled in by scenario-level evaluation

  bool operator==(const FrameResult&) const = default;

  [[nodiscard]] HazardClass max_class() const {
    return max_index ? samples[*max_index].hazard_class : HazardClass::NoHazard;
  }
};

inline FrameResult evaluate_frame(const FrameSnapshot& f, const HazardThresholds& thresholds) {
  FrameResult r;
  r.t = f.t;
  r.samples.reserve(f.objects.size());
  for (const auto& o : f.objects) {
    r.samples.push_back(evaluate_pair(f.subject, o, f.t, thresholds));
    const auto& s = r.samples.back();
    if (s.hazard_bearing() && (!r.max_index || s.m3 > r.max_m3)) {
      r.max_m3 = s.m3;
      r.max_index = r.samples.size() - 1;
    }
  }
  r.running_max_m3 = r.max_m3;
  return r;
}

}  // namespace shm

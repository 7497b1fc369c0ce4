#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace shm {

/// Planar vector. Used for positions (m) and velocities (m/s).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2&) const = default;

  [[nodiscard]] constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

enum class ObjectKind { car, bus, bicycle, pedestrian, stationary, other };

inline std::string_view to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::car: return "car";
    case ObjectKind::bus: return "bus";
    case ObjectKind::bicycle: return "bicycle";
    case ObjectKind::pedestrian: return "pedestrian";
    case ObjectKind::stationary: return "stationary";
    case ObjectKind::other: break;
  }
  return "other";
}

/// Unknown names map to `other`.
inline ObjectKind parse_object_kind(std::string_view s) {
  for (auto k : {ObjectKind::car, ObjectKind::bus, ObjectKind::bicycle, ObjectKind::pedestrian,
                 ObjectKind::stationary}) {
    if (to_string(k) == s) return k;
  }
  return ObjectKind::other;
}

/// State of one traffic participant at one instant.
///
/// `half_extent` is an optional axis-aligned bounding half-size. When both
/// members of a pair carry one, separation is measured between the closest
/// points of the two boxes instead of between the centers.
struct ObjectState {
  std::string id;
  ObjectKind kind = ObjectKind::other;
  Vec2 position;
  Vec2 velocity;
  std::optional<Vec2> half_extent;

  bool operator==(const ObjectState&) const = default;
};

struct FrameSnapshot {
  double t = 0.0;
  ObjectState subject;
  std::vector<ObjectState> objects;

  bool operator==(const FrameSnapshot&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<FrameSnapshot> frames;
  std::map<std::string, std::string> metadata;

  bool operator==(const Scenario&) const = default;
};

enum class ViolationKind {
  EmptyId,
  NonFinite,
  NegativeExtent,
  DuplicateId,
  SubjectInObjects,
  SubjectIdChanged,
  NonMonotoneTime,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::EmptyId: return "EmptyId";
    case ViolationKind::NonFinite: return "NonFinite";
    case ViolationKind::NegativeExtent: return "NegativeExtent";
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::SubjectInObjects: return "SubjectInObjects";
    case ViolationKind::SubjectIdChanged: return "SubjectIdChanged";
    case ViolationKind::NonMonotoneTime: return "NonMonotoneTime";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  std::size_t frame = 0;
  std::string object_id;  // empty for frame-level rules

  bool operator==(const Violation&) const = default;
};

inline std::string describe(const Violation& v) {
  std::string out = "frame " + std::to_string(v.frame) + ": " + std::string(to_string(v.kind));
  if (!v.object_id.empty()) out += " (id \"" + v.object_id + "\")";
  return out;
}

namespace detail {

inline void check_state(const ObjectState& s, std::size_t frame, std::vector<Violation>& out) {
  if (s.id.empty()) out.push_back({ViolationKind::EmptyId, frame, {}});
  if (!s.position.finite() || !s.velocity.finite() || (s.half_extent && !s.half_extent->finite()))
    out.push_back({ViolationKind::NonFinite, frame, s.id});
  if (s.half_extent && (s.half_extent->x < 0.0 || s.half_extent->y < 0.0))
    out.push_back({ViolationKind::NegativeExtent, frame, s.id});
}

}  // namespace detail

/// Checks every structural invariant of a scenario. An empty result means
/// the scenario can be fed to any downstream stage.
inline std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    const auto& f = s.frames[i];
    if (!std::isfinite(f.t)) out.push_back({ViolationKind::NonFinite, i, {}});
    if (i > 0 && !(f.t > s.frames[i - 1].t)) out.push_back({ViolationKind::NonMonotoneTime, i, {}});
    if (i > 0 && f.subject.id != s.frames.front().subject.id)
      out.push_back({ViolationKind::SubjectIdChanged, i, f.subject.id});

    detail::check_state(f.subject, i, out);
    std::unordered_set<std::string_view> seen;
    for (const auto& o : f.objects) {
      detail::check_state(o, i, out);
      if (!o.id.empty() && o.id == f.subject.id)
        out.push_back({ViolationKind::SubjectInObjects, i, o.id});
      if (!seen.insert(o.id).second) out.push_back({ViolationKind::DuplicateId, i, o.id});
    }
  }
  return out;
}

/// Thrown for malformed configuration (thresholds, bins, generator specs).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a scenario fails validation at an ingestion boundary.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

  [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string msg = std::to_string(vs.size()) + " scenario violation(s)";
    if (!vs.empty()) msg += "; first: " + describe(vs.front());
    return msg;
  }

  std::vector<Violation> violations_;
};

}  // namespace shm

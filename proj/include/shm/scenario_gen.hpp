#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "shm/core_model.hpp"

namespace shm {

enum class Template { intersection_crossing, pass_by, car_following, diverging_control };

inline std::string_view to_string(Template t) {
  switch (t) {
    case Template::intersection_crossing: return "intersection_crossing";
    case Template::pass_by: return "pass_by";
    case Template::car_following: return "car_following";
    case Template::diverging_control: return "diverging_control";
  }
  return "pass_by";
}

inline Template parse_template(std::string_view s) {
  for (auto t : {Template::intersection_crossing, Template::pass_by, Template::car_following,
                 Template::diverging_control}) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("unknown scenario template \"" + std::string(s) + "\"");
}

/// Parameters for the synthetic scenario templates.
///
/// All templates place the subject on the x axis heading east (+x). Timing
/// is arranged so the featured encounter peaks at `duration / 2`.
///
/// - pass_by: a stationary pedestrian `offset` m to the side of the
///   subject's path. Closest approach is exactly `offset`.
/// - intersection_crossing: a car heading north crosses the subject's path
///   `offset` m ahead of the subject. Closest approach is
///   offset * object_speed / |relative velocity|.
/// - car_following: a lead car `gap` m ahead in the same lane at
///   `object_speed`.
/// - diverging_control: `object_count` objects spaced around the subject,
///   each receding radially at `object_speed` relative to it.
///
/// `background_objects` adds seeded traffic on parallel lanes (never on
/// the subject's lane) to every template except diverging_control.
struct GeneratorSpec {
  Template scenario_template = Template::pass_by;
  double subject_speed = 10.0;  // m/s
  double object_speed = 10.0;   // m/s
  double offset = 2.0;          // m
  double gap = 30.0;            // m
  double frame_rate = 20.0;     // Hz
  double duration = 10.0;       // s
  int object_count = 4;
  int background_objects = 0;
  double jitter = 0.0;  // m, std-dev-like spread on background start positions
  std::uint64_t seed = 0;

  bool operator==(const GeneratorSpec&) const = default;

  void validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!(std::isfinite(frame_rate) && frame_rate > 0.0)) throw ConfigError("frame_rate must be > 0");
    if (!(std::isfinite(duration) && duration > 0.0)) throw ConfigError("duration must be > 0");
    if (!finite_nonneg(subject_speed) || !finite_nonneg(object_speed))
      throw ConfigError("speeds must be finite and non-negative");
    if (!finite_nonneg(jitter)) throw ConfigError("jitter must be finite and non-negative");
    if (!(std::isfinite(offset) && offset > 0.0)) throw ConfigError("offset must be > 0");
    if (!(std::isfinite(gap) && gap > 0.0)) throw ConfigError("gap must be > 0");
    if (object_count < 1 || object_count > 1000) throw ConfigError("object_count must be in [1, 1000]");
    if (background_objects < 0 || background_objects > 1000)
      throw ConfigError("background_objects must be in [0, 1000]");
    if (duration * frame_rate > 1e7) throw ConfigError("too many frames requested");
    if (scenario_template == Template::intersection_crossing && !(object_speed > 0.0))
      throw ConfigError("intersection_crossing needs object_speed > 0");
  }

  [[nodiscard]] std::size_t frame_count() const {
    return static_cast<std::size_t>(std::llround(duration * frame_rate)) + 1;
  }
};

namespace detail {

struct Track {
  std::string id;
  ObjectKind kind;
  Vec2 p0;
  Vec2 v;
};

// Portable uniform [0, 1): mt19937_64 output is fixed by the standard, the
// distribution classes are not.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void add_background(const GeneratorSpec& spec, double t_mid, std::vector<Track>& tracks) {
  std::mt19937_64 rng(spec.seed);
  constexpr double kLaneWidth = 3.5;
  constexpr double kFirstLane = 4.0;
  for (int k = 0; k < spec.background_objects; ++k) {
    const double side = (k % 2 == 0) ? 1.0 : -1.0;
    const double y = side * (kFirstLane + kLaneWidth * (k / 2));
    const double speed = (2.0 + 18.0 * unit_uniform(rng)) * (unit_uniform(rng) < 0.5 ? -1.0 : 1.0);
    const double along = (unit_uniform(rng) - 0.5) * (40.0 + 2.0 * spec.jitter);
    // The subject is at the origin at t_mid; each background object is `along` m from it then.
    const auto kind = (k % 3 == 2) ? ObjectKind::bicycle : ObjectKind::car;
    tracks.push_back({"bg" + std::to_string(k), kind, {along - speed * t_mid, y}, {speed, 0.0}});
  }
}

}  // namespace detail

inline constexpr double kMinStartSpacing = 1e-6;  // m

/// Deterministic constant-velocity scenario for `spec`.
inline Scenario generate(const GeneratorSpec& spec) {
  spec.validate();
  const double t_mid = spec.duration / 2.0;
  const Vec2 subject_v{spec.subject_speed, 0.0};
  // Subject passes the origin at t_mid.
  const Vec2 subject_p0{-spec.subject_speed * t_mid, 0.0};

  std::vector<detail::Track> tracks;
  switch (spec.scenario_template) {
    case Template::pass_by:
      tracks.push_back({"ped0", ObjectKind::pedestrian, {0.0, spec.offset}, {0.0, 0.0}});
      break;
    case Template::intersection_crossing: {
      // Crossing object reaches the conflict point (offset, 0) at t_mid.
      const Vec2 v{0.0, spec.object_speed};
      tracks.push_back({"cross0", ObjectKind::car, Vec2{spec.offset, 0.0} - v * t_mid, v});
      break;
    }
    case Template::car_following:
      tracks.push_back(
          {"lead0", ObjectKind::car, {subject_p0.x + spec.gap, 0.0}, {spec.object_speed, 0.0}});
      break;
    case Template::diverging_control:
      for (int k = 0; k < spec.object_count; ++k) {
        const double a = 2.0 * std::numbers::pi * k / spec.object_count;
        const Vec2 dir{std::cos(a), std::sin(a)};
        tracks.push_back({"div" + std::to_string(k), ObjectKind::car,
                          subject_p0 + dir * (5.0 + spec.offset),
                          subject_v + dir * std::max(spec.object_speed, 0.1)});
      }
      break;
  }
  if (spec.scenario_template != Template::diverging_control) detail::add_background(spec, t_mid, tracks);

  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if ((tracks[i].p0 - subject_p0).norm() < kMinStartSpacing)
      throw ConfigError("object " + tracks[i].id + " starts on top of the subject");
    for (std::size_t j = 0; j < i; ++j) {
      if ((tracks[i].p0 - tracks[j].p0).norm() < kMinStartSpacing)
        throw ConfigError("objects " + tracks[j].id + " and " + tracks[i].id + " start co-located");
    }
  }

  Scenario s;
  s.name = std::string(to_string(spec.scenario_template));
  s.metadata["generator.template"] = s.name;
  s.metadata["generator.seed"] = std::to_string(spec.seed);

  const std::size_t n = spec.frame_count();
  s.frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.frame_rate;
    FrameSnapshot f;
    f.t = t;
    f.subject = {"ego", ObjectKind::car, subject_p0 + subject_v * t, subject_v, {}};
    f.objects.reserve(tracks.size());
    for (const auto& tr : tracks) f.objects.push_back({tr.id, tr.kind, tr.p0 + tr.v * t, tr.v, {}});
    s.frames.push_back(std::move(f));
  }
  return s;
}

/// Closest approach distance of the template's featured encounter, in closed form.
inline double closed_form_min_separation(const GeneratorSpec& spec) {
  switch (spec.scenario_template) {
    case Template::pass_by: return spec.offset;
    case Template::intersection_crossing: {
      const double w = std::hypot(spec.subject_speed, spec.object_speed);
      return w == 0.0 ? spec.offset : spec.offset * spec.object_speed / w;
    }
    case Template::car_following: {
      const double closing = spec.subject_speed - spec.object_speed;
      return closing <= 0.0 ? spec.gap : std::max(0.0, spec.gap - closing * spec.duration);
    }
    case Template::diverging_control: return 5.0 + spec.offset;
  }
  return spec.offset;
}

}  // namespace shm

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "shm/aggregation.hpp"
#include "shm/core_model.hpp"
#include "shm/hazard_measure.hpp"
#include "shm/scenario_gen.hpp"

namespace shm {

/// Malformed input. `line` and `column` are 1-based; 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(format(line, column, what)), line_(line), column_(column) {}

  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& what) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::size_t line_;
  std::size_t column_;
};

namespace io_detail {

using Json = nlohmann::ordered_json;

// Shortest representation that parses back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last) return std::nullopt;
  return v;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_lines(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < bytes.size()) lines.push_back(bytes.substr(pos));
      break;
    }
    lines.push_back(bytes.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

inline Json state_to_json(const ObjectState& s) {
  Json j;
  j["id"] = s.id;
  j["kind"] = std::string(to_string(s.kind));
  j["x"] = s.position.x;
  j["y"] = s.position.y;
  j["vx"] = s.velocity.x;
  j["vy"] = s.velocity.y;
  if (s.half_extent) {
    j["hx"] = s.half_extent->x;
    j["hy"] = s.half_extent->y;
  }
  return j;
}

struct StateReader {
  std::size_t line;
  bool missing_velocity = false;
  bool has_velocity = false;

  double number(const Json& j, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(line, 0, std::string("missing field \"") + key + "\"");
    if (!it->is_number()) throw ParseError(line, 0, std::string("field \"") + key + "\" is not a number");
    return it->get<double>();
  }

  ObjectState read(const Json& j) {
    if (!j.is_object()) throw ParseError(line, 0, "object state must be a JSON object");
    ObjectState s;
    const auto id = j.find("id");
    if (id == j.end() || !id->is_string()) throw ParseError(line, 0, "missing string field \"id\"");
    s.id = id->get<std::string>();
    if (const auto k = j.find("kind"); k != j.end() && k->is_string())
      s.kind = parse_object_kind(k->get_ref<const std::string&>());
    s.position = {number(j, "x"), number(j, "y")};
    const bool vx = j.contains("vx");
    const bool vy = j.contains("vy");
    if (vx || vy) {
      s.velocity = {number(j, "vx"), number(j, "vy")};
      has_velocity = true;
    } else {
      missing_velocity = true;
    }
    if (j.contains("hx") || j.contains("hy")) s.half_extent = Vec2{number(j, "hx"), number(j, "hy")};
    return s;
  }
};

// Fills velocities by finite differences over frames sharing the same id:
// central where both neighbours exist, one-sided at the ends, zero for
// states seen in a single frame.
inline void backfill_velocities(Scenario& s) {
  std::map<std::string, std::vector<std::pair<std::size_t, ObjectState*>>, std::less<>> tracks;
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    auto& f = s.frames[i];
    tracks[f.subject.id].emplace_back(i, &f.subject);
    for (auto& o : f.objects) tracks[o.id].emplace_back(i, &o);
  }
  for (auto& [id, track] : tracks) {
    for (std::size_t k = 0; k < track.size(); ++k) {
      const std::size_t lo = k > 0 ? k - 1 : k;
      const std::size_t hi = k + 1 < track.size() ? k + 1 : k;
      if (lo == hi) continue;
      const double dt = s.frames[track[hi].first].t - s.frames[track[lo].first].t;
      track[k].second->velocity =
          (track[hi].second->position - track[lo].second->position) * (1.0 / dt);
    }
  }
  s.metadata["velocity_source"] = "finite_difference";
}

}  // namespace io_detail

struct ParseOptions {
  /// Derive missing velocities from positions. Only applies when no state
  /// in the file carries a velocity.
  bool backfill_velocity = false;
  /// Reject scenarios that break a structural invariant. When off, the
  /// caller is expected to run validate_scenario() itself.
  bool validate = true;
};

/// Serializes a scenario as JSON lines: an optional header line carrying the
/// name and metadata, then one frame per line.
inline std::string write_scenario(const Scenario& s) {
  std::string out;
  io_detail::Json header;
  header["scenario"]["name"] = s.name;
  header["scenario"]["metadata"] = io_detail::Json::object();
  for (const auto& [k, v] : s.metadata) header["scenario"]["metadata"][k] = v;
  out += header.dump();
  out += '\n';
  for (const auto& f : s.frames) {
    io_detail::Json j;
    j["t"] = f.t;
    j["subject"] = io_detail::state_to_json(f.subject);
    j["objects"] = io_detail::Json::array();
    for (const auto& o : f.objects) j["objects"].push_back(io_detail::state_to_json(o));
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline Scenario parse_scenario(std::string_view bytes, const ParseOptions& opts = {}) {
  using io_detail::Json;
  Scenario s;
  std::optional<std::size_t> first_missing_velocity_line;
  bool any_velocity = false;

  const auto lines = io_detail::split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto text = io_detail::trim(lines[i]);
    if (text.empty()) continue;

    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(line_no, e.byte, "malformed JSON");
    }
    if (!j.is_object()) throw ParseError(line_no, 1, "expected a JSON object");

    if (const auto h = j.find("scenario"); h != j.end()) {
      if (!s.frames.empty()) throw ParseError(line_no, 0, "scenario header must precede frames");
      if (const auto n = h->find("name"); n != h->end() && n->is_string()) s.name = n->get<std::string>();
      if (const auto m = h->find("metadata"); m != h->end() && m->is_object()) {
        for (const auto& [k, v] : m->items())
          s.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      continue;
    }

    io_detail::StateReader reader{line_no};
    FrameSnapshot f;
    f.t = reader.number(j, "t");
    const auto subj = j.find("subject");
    if (subj == j.end()) throw ParseError(line_no, 0, "missing field \"subject\"");
    f.subject = reader.read(*subj);
    if (const auto objs = j.find("objects"); objs != j.end()) {
      if (!objs->is_array()) throw ParseError(line_no, 0, "field \"objects\" must be an array");
      for (const auto& o : *objs) f.objects.push_back(reader.read(o));
    }
    if (reader.missing_velocity && !first_missing_velocity_line) first_missing_velocity_line = line_no;
    any_velocity = any_velocity || reader.has_velocity;
    s.frames.push_back(std::move(f));
  }

  // Backfill only applies when velocity is absent from every state.
  if (first_missing_velocity_line && (!opts.backfill_velocity || any_velocity))
    throw ParseError(*first_missing_velocity_line, 0, "missing field \"vx\"/\"vy\" (velocities required)");

  auto violations = validate_scenario(s);
  if (!violations.empty() && opts.validate) throw ValidationError(std::move(violations));
  if (first_missing_velocity_line && violations.empty()) io_detail::backfill_velocities(s);
  return s;
}

/// Fixed-notation decimal with at least seven significant digits, never
/// exponent notation.
inline std::string format_fixed(double v) {
  constexpr int kSignificant = 7;
  int decimals = kSignificant - 1;
  if (v != 0.0 && std::isfinite(v)) {
    const int e = static_cast<int>(std::floor(std::log10(std::abs(v))));
    decimals = std::max(0, kSignificant - 1 - e);
  }
  char buf[512];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return {buf, r.ptr};
}

inline constexpr std::string_view kSamplesCsvHeader =
    "t,subject_id,object_id,d_sep,closing_speed,s_rel,s_abs,m2,m3,class,collision";

inline std::string write_samples_csv(std::span<const PairSample> samples) {
  std::string out(kSamplesCsvHeader);
  out += '\n';
  for (const auto& s : samples) {
    out += format_fixed(s.t) + ',' + s.subject_id + ',' + s.object_id + ',' + format_fixed(s.d_sep) +
           ',' + format_fixed(s.closing_speed) + ',' + format_fixed(s.s_rel) + ',' +
           format_fixed(s.s_abs) + ',' + format_fixed(s.m2) + ',' + format_fixed(s.m3) + ',' +
           std::string(to_string(s.hazard_class)) + ',' + (s.collision ? "1" : "0") + '\n';
  }
  return out;
}

inline std::vector<PairSample> read_samples_csv(std::string_view bytes) {
  const auto lines = io_detail::split_lines(bytes);
  if (lines.empty() || io_detail::trim(lines[0]) != kSamplesCsvHeader)
    throw ParseError(1, 1, "missing or unexpected samples CSV header");

  std::vector<PairSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto text = io_detail::trim(lines[i]);
    if (text.empty()) continue;

    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
      const auto comma = text.find(',', pos);
      cells.push_back(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != 11) throw ParseError(line_no, 0, "expected 11 columns");

    auto num = [&](std::size_t c) {
      const auto v = io_detail::parse_double(cells[c]);
      if (!v) throw ParseError(line_no, c + 1, "bad number \"" + std::string(cells[c]) + "\"");
      return *v;
    };
    PairSample s;
    s.t = num(0);
    s.subject_id = std::string(cells[1]);
    s.object_id = std::string(cells[2]);
    s.d_sep = num(3);
    s.closing_speed = num(4);
    s.s_rel = num(5);
    s.s_abs = num(6);
    s.m2 = num(7);
    s.m3 = num(8);
    const auto cls = parse_hazard_class(cells[9]);
    if (!cls) throw ParseError(line_no, 10, "unknown hazard class \"" + std::string(cells[9]) + "\"");
    s.hazard_class = *cls;
    if (cells[10] != "0" && cells[10] != "1") throw ParseError(line_no, 11, "collision must be 0 or 1");
    s.collision = cells[10] == "1";
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string write_histogram_json(const HazardHistogram& h) {
  io_detail::Json j;
  j["measure"] = std::string(to_string(h.measure()));
  j["edges"] = h.edges();
  j["counts"] = h.counts();
  j["underflow"] = h.underflow();
  j["overflow"] = h.overflow();
  j["total_samples"] = h.total_samples();
  return j.dump(2) + '\n';
}

inline HazardHistogram parse_histogram_json(std::string_view bytes) {
  using io_detail::Json;
  try {
    const Json j = Json::parse(bytes);
    return HazardHistogram::from_parts(
        j.at("edges").get<std::vector<double>>(), j.at("counts").get<std::vector<std::uint64_t>>(),
        j.at("underflow").get<std::uint64_t>(), j.at("overflow").get<std::uint64_t>(),
        j.at("total_samples").get<std::uint64_t>(),
        parse_histogram_measure(j.value("measure", std::string("m3"))));
  } catch (const Json::parse_error& e) {
    throw ParseError(0, e.byte, "malformed histogram JSON");
  } catch (const Json::exception& e) {
    throw ParseError(0, 0, std::string("histogram JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(0, 0, std::string("histogram JSON: ") + e.what());
  }
}

inline std::string write_summary_json(const ScenarioSummary& s) {
  using io_detail::Json;
  Json j;
  j["total_samples"] = s.total_samples;
  j["converging_samples"] = s.converging_samples;
  j["converging_fraction"] = s.converging_fraction;
  j["class_counts"] = Json::object();
  for (std::size_t c = 0; c < kHazardClassCount; ++c)
    j["class_counts"][std::string(to_string(static_cast<HazardClass>(c)))] = s.class_counts[c];
  j["max_m3"] = s.max_m3;
  j["max_at"] = s.max_at ? Json{{"t", s.max_at->t}, {"object_id", s.max_at->object_id}} : Json(nullptr);
  j["min_d_sep"] = s.min_d_sep ? Json(*s.min_d_sep) : Json(nullptr);
  j["collision_count"] = s.collision_count;
  return j.dump(2) + '\n';
}

inline ScenarioSummary parse_summary_json(std::string_view bytes) {
  using io_detail::Json;
  try {
    const Json j = Json::parse(bytes);
    ScenarioSummary s;
    s.total_samples = j.at("total_samples").get<std::uint64_t>();
    s.converging_samples = j.at("converging_samples").get<std::uint64_t>();
    s.converging_fraction = j.at("converging_fraction").get<double>();
    for (std::size_t c = 0; c < kHazardClassCount; ++c)
      s.class_counts[c] =
          j.at("class_counts").at(std::string(to_string(static_cast<HazardClass>(c)))).get<std::uint64_t>();
    s.max_m3 = j.at("max_m3").get<double>();
    if (const auto& m = j.at("max_at"); !m.is_null())
      s.max_at = MaxLocation{m.at("t").get<double>(), m.at("object_id").get<std::string>()};
    if (const auto& d = j.at("min_d_sep"); !d.is_null()) s.min_d_sep = d.get<double>();
    s.collision_count = j.at("collision_count").get<std::uint64_t>();
    return s;
  } catch (const Json::parse_error& e) {
    throw ParseError(0, e.byte, "malformed summary JSON");
  } catch (const Json::exception& e) {
    throw ParseError(0, 0, std::string("summary JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Config file
//
//   # comment
//   [section]
//   key = value        value: number, "quoted string", or bare word
//
// Sections: [thresholds], [histogram], [generator], and the reserved
// [vehicle] (grip, braking_grip, lateral_grip, min_turn_radius,
// lateral_accel), which is accepted and carried through but not used.

struct Config {
  HazardThresholds thresholds;
  BinConfig bins;
  GeneratorSpec generator;
  std::map<std::string, double> vehicle;  // reserved keys

  bool operator==(const Config&) const = default;
};

namespace io_detail {

inline constexpr std::string_view kReservedVehicleKeys[] = {
    "grip", "braking_grip", "lateral_grip", "min_turn_radius", "lateral_accel"};

struct ConfigValue {
  std::string text;
  bool quoted = false;
};

inline double config_number(const ConfigValue& v, std::size_t line, std::string_view key) {
  const auto d = v.quoted ? std::nullopt : parse_double(v.text);
  if (!d || !std::isfinite(*d))
    throw ParseError(line, 0, "\"" + std::string(key) + "\" expects a number, got \"" + v.text + "\"");
  return *d;
}

template <class Int>
Int config_int(const ConfigValue& v, std::size_t line, std::string_view key) {
  Int out{};
  const auto r = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (v.quoted || r.ec != std::errc() || r.ptr != v.text.data() + v.text.size())
    throw ParseError(line, 0, "\"" + std::string(key) + "\" expects an integer, got \"" + v.text + "\"");
  return out;
}

inline ConfigValue config_value(std::string_view raw, std::size_t line) {
  if (!raw.empty() && raw.front() == '"') {
    std::string out;
    for (std::size_t i = 1; i < raw.size(); ++i) {
      const char c = raw[i];
      if (c == '\\' && i + 1 < raw.size()) {
        out += raw[++i];
      } else if (c == '"') {
        if (!trim(raw.substr(i + 1)).empty()) throw ParseError(line, i + 2, "trailing characters after string");
        return {out, true};
      } else {
        out += c;
      }
    }
    throw ParseError(line, 0, "unterminated string");
  }
  if (raw.empty()) throw ParseError(line, 0, "missing value");
  return {std::string(raw), false};
}

inline std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace io_detail

inline Config parse_config(std::string_view bytes) {
  using namespace io_detail;
  Config cfg;
  std::string section;
  const auto lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    const auto text = trim(strip_comment(lines[i]));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError(ln, 1, "unterminated section header");
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (section != "thresholds" && section != "histogram" && section != "generator" && section != "vehicle")
        throw ParseError(ln, 2, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(ln, 1, "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const ConfigValue v = config_value(trim(text.substr(eq + 1)), ln);
    auto unknown = [&] { return ParseError(ln, 1, "unknown key \"" + key + "\" in [" + section + "]"); };

    if (section == "thresholds") {
      if (key == "safe_max") cfg.thresholds.safe_max = config_number(v, ln, key);
      else if (key == "hazardous_max") cfg.thresholds.hazardous_max = config_number(v, ln, key);
      else throw unknown();
    } else if (section == "histogram") {
      if (key == "decade_min") cfg.bins.decade_min = config_int<int>(v, ln, key);
      else if (key == "decade_max") cfg.bins.decade_max = config_int<int>(v, ln, key);
      else if (key == "bins_per_decade") cfg.bins.bins_per_decade = config_int<int>(v, ln, key);
      else if (key == "measure") cfg.bins.measure = parse_histogram_measure(v.text);
      else throw unknown();
    } else if (section == "generator") {
      auto& g = cfg.generator;
      if (key == "template") g.scenario_template = parse_template(v.text);
      else if (key == "subject_speed") g.subject_speed = config_number(v, ln, key);
      else if (key == "object_speed") g.object_speed = config_number(v, ln, key);
      else if (key == "offset") g.offset = config_number(v, ln, key);
      else if (key == "gap") g.gap = config_number(v, ln, key);
      else if (key == "frame_rate") g.frame_rate = config_number(v, ln, key);
      else if (key == "duration") g.duration = config_number(v, ln, key);
      else if (key == "object_count") g.object_count = config_int<int>(v, ln, key);
      else if (key == "background_objects") g.background_objects = config_int<int>(v, ln, key);
      else if (key == "jitter") g.jitter = config_number(v, ln, key);
      else if (key == "seed") g.seed = config_int<std::uint64_t>(v, ln, key);
      else throw unknown();
    } else if (section == "vehicle") {
      if (std::ranges::find(kReservedVehicleKeys, key) == std::end(kReservedVehicleKeys)) throw unknown();
      cfg.vehicle[key] = config_number(v, ln, key);
    } else {
      throw ParseError(ln, 1, "key \"" + key + "\" outside of any section");
    }
  }
  cfg.thresholds.validate();
  cfg.bins.validate();
  cfg.generator.validate();
  return cfg;
}

inline std::string write_config(const Config& cfg) {
  using io_detail::shortest;
  const auto& g = cfg.generator;
  std::ostringstream o;
  o << "[thresholds]\n"
    << "safe_max = " << shortest(cfg.thresholds.safe_max) << '\n'
    << "hazardous_max = " << shortest(cfg.thresholds.hazardous_max) << "\n\n"
    << "[histogram]\n"
    << "decade_min = " << cfg.bins.decade_min << '\n'
    << "decade_max = " << cfg.bins.decade_max << '\n'
    << "bins_per_decade = " << cfg.bins.bins_per_decade << '\n'
    << "measure = \"" << to_string(cfg.bins.measure) << "\"\n\n"
    << "[generator]\n"
    << "template = \"" << to_string(g.scenario_template) << "\"\n"
    << "subject_speed = " << shortest(g.subject_speed) << '\n'
    << "object_speed = " << shortest(g.object_speed) << '\n'
    << "offset = " << shortest(g.offset) << '\n'
    << "gap = " << shortest(g.gap) << '\n'
    << "frame_rate = " << shortest(g.frame_rate) << '\n'
    << "duration = " << shortest(g.duration) << '\n'
    << "object_count = " << g.object_count << '\n'
    << "background_objects = " << g.background_objects << '\n'
    << "jitter = " << shortest(g.jitter) << '\n'
    << "seed = " << g.seed << '\n';
  if (!cfg.vehicle.empty()) {
    o << "\n[vehicle]\n";
    for (const auto& [k, v] : cfg.vehicle) o << k << " = " << shortest(v) << '\n';
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temporary file, then renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace shm

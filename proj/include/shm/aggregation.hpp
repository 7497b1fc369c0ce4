#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "shm/core_model.hpp"
#include "shm/hazard_measure.hpp"

namespace shm {

enum class HistogramMeasure { m3, m2 };

inline std::string_view to_string(HistogramMeasure m) {
  return m == HistogramMeasure::m2 ? "m2" : "m3";
}

inline HistogramMeasure parse_histogram_measure(std::string_view s) {
  if (s == "m3") return HistogramMeasure::m3;
  if (s == "m2") return HistogramMeasure::m2;
  throw ConfigError("histogram measure must be \"m2\" or \"m3\", got \"" + std::string(s) + "\"");
}

/// Log-spaced bins spanning [10^decade_min, 10^decade_max).
struct BinConfig {
  int decade_min = -2;  // 0.01 m/s^2
  int decade_max = 4;   // 10 000 m/s^2
  int bins_per_decade = 5;
  HistogramMeasure measure = HistogramMeasure::m3;

  bool operator==(const BinConfig&) const = default;

  void validate() const {
    if (bins_per_decade < 1) throw ConfigError("bins_per_decade must be >= 1");
    if (decade_max <= decade_min) throw ConfigError("decade_max must exceed decade_min");
    if (decade_min < -300 || decade_max > 300) throw ConfigError("decade range out of bounds");
  }

  [[nodiscard]] std::vector<double> edges() const {
    validate();
    const int n = (decade_max - decade_min) * bins_per_decade;
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
      // Exact powers of ten on decade boundaries; fractional exponents in between.
      e.push_back(i % bins_per_decade == 0
                      ? std::pow(10.0, decade_min + i / bins_per_decade)
                      : std::pow(10.0, decade_min + static_cast<double>(i) / bins_per_decade));
    }
    return e;
  }
};

/// Frequency-of-occurrence histogram of hazard values. Bins are left-closed,
/// right-open; values below the first edge go to underflow, values at or
/// above the last edge to overflow. Histograms with equal edges form a
/// commutative monoid under merge().
class HazardHistogram {
 public:
  HazardHistogram() = default;

  explicit HazardHistogram(std::vector<double> edges,
                           HistogramMeasure measure = HistogramMeasure::m3)
      : edges_(std::move(edges)), counts_(edges_.empty() ? 0 : edges_.size() - 1, 0),
        measure_(measure) {
    if (edges_.size() < 2) throw ConfigError("histogram needs at least two edges");
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (!(edges_[i] > edges_[i - 1])) throw ConfigError("histogram edges must strictly increase");
    }
  }

  explicit HazardHistogram(const BinConfig& cfg) : HazardHistogram(cfg.edges(), cfg.measure) {}

  /// Rebuilds a histogram from serialized parts; checks the count invariant.
  static HazardHistogram from_parts(std::vector<double> edges, std::vector<std::uint64_t> counts,
                                    std::uint64_t underflow, std::uint64_t overflow,
                                    std::uint64_t total, HistogramMeasure measure) {
    HazardHistogram h(std::move(edges), measure);
    if (counts.size() != h.counts_.size()) throw ConfigError("histogram counts/edges size mismatch");
    std::uint64_t sum = underflow + overflow;
    for (auto c : counts) sum += c;
    if (sum != total) throw ConfigError("histogram counts do not sum to total");
    h.counts_ = std::move(counts);
    h.underflow_ = underflow;
    h.overflow_ = overflow;
    h.total_ = total;
    return h;
  }

  void add_value(double v) {
    ++total_;
    if (!(v >= edges_.front())) {
      ++underflow_;
      return;
    }
    if (v >= edges_.back()) {
      ++overflow_;
      return;
    }
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), v);
    ++counts_[static_cast<std::size_t>(it - edges_.begin()) - 1];
  }

  /// Counts the sample only when it is converging.
  void add(const PairSample& s) {
    if (s.closing_speed > 0.0) add_value(measure_ == HistogramMeasure::m2 ? s.m2 : s.m3);
  }

  HazardHistogram& merge(const HazardHistogram& o) {
    if (o.edges_ != edges_ || o.measure_ != measure_)
      throw ConfigError("cannot merge histograms with different bins");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    underflow_ += o.underflow_;
    overflow_ += o.overflow_;
    total_ += o.total_;
    return *this;
  }

  [[nodiscard]] const std::vector<double>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<std::uint64_t>& counts() const { return counts_; }
  [[nodiscard]] std::uint64_t underflow() const { return underflow_; }
  [[nodiscard]] std::uint64_t overflow() const { return overflow_; }
  [[nodiscard]] std::uint64_t total_samples() const { return total_; }
  [[nodiscard]] HistogramMeasure measure() const { return measure_; }
  [[nodiscard]] std::size_t bin_count() const { return counts_.size(); }

  bool operator==(const HazardHistogram&) const = default;

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t total_ = 0;
  HistogramMeasure measure_ = HistogramMeasure::m3;
};

template <std::ranges::input_range R>
  requires std::same_as<std::ranges::range_value_t<R>, PairSample>
HazardHistogram build_histogram(const R& samples, const BinConfig& cfg) {
  HazardHistogram h(cfg);
  for (const auto& s : samples) h.add(s);
  return h;
}

struct MaxLocation {
  double t = 0.0;
  std::string object_id;

  bool operator==(const MaxLocation&) const = default;
};

struct ScenarioSummary {
  std::uint64_t total_samples = 0;
  std::uint64_t converging_samples = 0;
  std::array<std::uint64_t, kHazardClassCount> class_counts{};  // indexed by HazardClass
  double max_m3 = 0.0;
  std::optional<MaxLocation> max_at;
  double converging_fraction = 0.0;
  std::optional<double> min_d_sep;
  std::uint64_t collision_count = 0;

  bool operator==(const ScenarioSummary&) const = default;

  [[nodiscard]] std::uint64_t count(HazardClass c) const {
    return class_counts[static_cast<std::size_t>(c)];
  }
};

namespace detail {

// Higher m3 wins; ties go to the earlier time, then the smaller id.
inline bool beats(const PairSample& s, double best, const MaxLocation& at) {
  if (s.m3 != best) return s.m3 > best;
  if (s.t != at.t) return s.t < at.t;
  return s.object_id < at.object_id;
}

}  // namespace detail

template <std::ranges::input_range R>
  requires std::same_as<std::ranges::range_value_t<R>, PairSample>
ScenarioSummary summarize(const R& samples) {
  ScenarioSummary out;
  for (const PairSample& s : samples) {
    ++out.total_samples;
    ++out.class_counts[static_cast<std::size_t>(s.hazard_class)];
    if (s.closing_speed > 0.0) ++out.converging_samples;
    if (s.collision) ++out.collision_count;
    if (!out.min_d_sep || s.d_sep < *out.min_d_sep) out.min_d_sep = s.d_sep;
    if (s.hazard_bearing() && (!out.max_at || detail::beats(s, out.max_m3, *out.max_at))) {
      out.max_m3 = s.m3;
      out.max_at = MaxLocation{s.t, s.object_id};
    }
  }
  if (out.total_samples > 0)
    out.converging_fraction =
        static_cast<double>(out.converging_samples) / static_cast<double>(out.total_samples);
  return out;
}

struct SeriesPoint {
  double t = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double d_sep = 0.0;
  double closing_speed = 0.0;
  HazardClass hazard_class = HazardClass::NoHazard;

  bool operator==(const SeriesPoint&) const = default;
};

struct PairSeries {
  std::string object_id;
  std::vector<SeriesPoint> points;

  bool operator==(const PairSeries&) const = default;
};

/// Groups samples into one time series per object, in order of first appearance.
template <std::ranges::input_range R>
  requires std::same_as<std::ranges::range_value_t<R>, PairSample>
std::vector<PairSeries> series_per_object(const R& samples) {
  std::vector<PairSeries> out;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const PairSample& s : samples) {
    auto [it, inserted] = index.try_emplace(s.object_id, out.size());
    if (inserted) out.push_back({s.object_id, {}});
    out[it->second].points.push_back({s.t, s.m2, s.m3, s.d_sep, s.closing_speed, s.hazard_class});
  }
  for (auto& series : out) {
    std::ranges::stable_sort(series.points, {}, &SeriesPoint::t);
  }
  return out;
}

}  // namespace shm

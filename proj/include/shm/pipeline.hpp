#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

#include "shm/core_model.hpp"
#include "shm/hazard_measure.hpp"

namespace shm {

struct ScenarioResult {
  std::vector<FrameResult> frames;

  bool operator==(const ScenarioResult&) const = default;

  /// All samples, frame-major, object order within a frame.
  [[nodiscard]] std::vector<PairSample> samples() const {
    std::vector<PairSample> out;
    std::size_t n = 0;
    for (const auto& f : frames) n += f.samples.size();
    out.reserve(n);
    for (const auto& f : frames) out.insert(out.end(), f.samples.begin(), f.samples.end());
    return out;
  }
};

/// Evaluates every frame of a scenario. With `threads > 1` frames are split
/// into contiguous chunks evaluated concurrently; output order and values
/// are identical to the sequential path.
inline ScenarioResult evaluate_scenario(const Scenario& s, const HazardThresholds& thresholds,
                                        unsigned threads = 1) {
  thresholds.validate();
  ScenarioResult r;
  r.frames.resize(s.frames.size());

  const std::size_t n = s.frames.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) r.frames[i] = evaluate_frame(s.frames[i], thresholds);
  };

  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(run, b, std::min(n, b + chunk));
  }

  double running = 0.0;
  for (auto& f : r.frames) {
    running = std::max(running, f.max_m3);
    f.running_max_m3 = running;
  }
  return r;
}

}  // namespace shm

#pragma once

#include "concentra/repository.hpp"
#include "concentra/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace concentra {

enum class Inclusion { StartInEndEx, StartExEndIn };

struct WindowBounds {
  TimestampMs start = 0;
  TimestampMs end = 0;
  Inclusion inclusion = Inclusion::StartInEndEx;

  DurationMs span() const { return end - start; }
  bool contains(TimestampMs t) const {
    return inclusion == Inclusion::StartInEndEx ? (t >= start && t < end) : (t > start && t <= end);
  }
};

// Nominal sample rate of a stream; nullopt marks an irregular stream whose
// coverage is 1 whenever it holds at least one reading.
using NominalRate = std::optional<double>;

struct SensorWindow {
  WindowBounds bounds;
  std::vector<std::string> sources;
  Channel channel = Channel::Temperature;
  std::vector<TimestampMs> timestamps;
  Vector values;
  long expected_count = 0;
  double coverage = 0;

  Eigen::Index count() const { return values.size(); }
};

// Sliding start-inclusive-end-exclusive bounds over [t0, t1): first window at
// t0, step = size*(1-overlap), last window is the final one ending <= t1.
// Ranges shorter than one window yield an empty sequence; a step that rounds
// to 0 ms is a parameter error.
std::vector<WindowBounds> slide_windows(TimestampMs t0, TimestampMs t1, DurationMs size_ms, double overlap);

// Materializes the pooled in-bounds readings of one stream group.
SensorWindow materialize(const Repository& repo, const WindowBounds& bounds,
                         const std::vector<std::string>& sources, Channel channel, NominalRate nominal_rate);

// Coverage policy: regular-rate streams need >= 0.5, irregular streams need
// at least one reading.
bool passes_coverage(const SensorWindow& window, NominalRate nominal_rate);

}  // namespace concentra

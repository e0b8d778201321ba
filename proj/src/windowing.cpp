#include "concentra/windowing.hpp"

#include <cmath>

namespace concentra {

std::vector<WindowBounds> slide_windows(TimestampMs t0, TimestampMs t1, DurationMs size_ms, double overlap) {
  if (size_ms <= 0) throw ParameterError("slide_windows: size must be positive");
  if (overlap < 0.0 || overlap >= 1.0) throw ParameterError("slide_windows: overlap must be in [0,1)");
  const auto step = static_cast<DurationMs>(std::llround(static_cast<double>(size_ms) * (1.0 - overlap)));
  if (step <= 0) throw ParameterError("slide_windows: step rounds to 0 ms");

  std::vector<WindowBounds> out;
  if (t1 - t0 < size_ms) return out;
  for (TimestampMs start = t0; start + size_ms <= t1; start += step) {
    out.push_back({start, start + size_ms, Inclusion::StartInEndEx});
  }
  return out;
}

SensorWindow materialize(const Repository& repo, const WindowBounds& bounds,
                         const std::vector<std::string>& sources, Channel channel, NominalRate nominal_rate) {
  if (bounds.start >= bounds.end) throw ParameterError("materialize: invalid bounds");
  const auto convention = bounds.inclusion == Inclusion::StartInEndEx ? RangeConvention::StartInEndEx
                                                                      : RangeConvention::StartExEndIn;
  const auto readings = repo.query_readings(sources, channel, bounds.start, bounds.end, convention);

  SensorWindow window;
  window.bounds = bounds;
  window.sources = sources;
  window.channel = channel;
  window.timestamps.reserve(readings.size());
  window.values.resize(static_cast<Eigen::Index>(readings.size()));
  for (std::size_t i = 0; i < readings.size(); ++i) {
    window.timestamps.push_back(readings[i].ts);
    window.values(static_cast<Eigen::Index>(i)) = readings[i].value;
  }

  const auto count = static_cast<long>(readings.size());
  if (nominal_rate) {
    const double size_seconds = static_cast<double>(bounds.span()) / 1000.0;
    window.expected_count = static_cast<long>(std::floor(*nominal_rate * size_seconds));
    window.coverage = window.expected_count > 0
                          ? std::min(1.0, static_cast<double>(count) / static_cast<double>(window.expected_count))
                          : (count > 0 ? 1.0 : 0.0);
  } else {
    window.expected_count = count;
    window.coverage = count > 0 ? 1.0 : 0.0;
  }
  return window;
}

bool passes_coverage(const SensorWindow& window, NominalRate nominal_rate) {
  if (nominal_rate) return window.coverage >= 0.5;
  return window.count() > 0;
}

}  // namespace concentra

#pragma once

#include "concentra/stats.hpp"
#include "concentra/windowing.hpp"

#include <string>
#include <vector>

namespace concentra {

enum class FeatureKind { Ambient, Physical };

// Named window statistics for one stream group. Names are `<channel>_<stat>`
// plus the single `pedometer_steps` delta; values align with names.
struct FeatureVector {
  FeatureKind kind = FeatureKind::Ambient;
  TimestampMs end_timestamp = 0;
  std::vector<std::string> names;
  Vector values;
};

// A channel ready for feature extraction: raw, derived magnitude, or the
// pedometer delta.
struct ChannelWindow {
  std::string name;
  std::vector<TimestampMs> timestamps;
  Vector values;
  bool is_step_delta = false;
};

inline ChannelWindow to_channel_window(const SensorWindow& w) {
  return ChannelWindow{std::string(channel_name(w.channel)), w.timestamps, w.values, false};
}

// Magnitude channel sqrt(x^2+y^2+z^2) over timestamp-aligned triaxial
// samples; timestamps missing any axis are skipped. Inputs must share bounds.
ChannelWindow derive_magnitude(const std::string& name, const SensorWindow& x, const SensorWindow& y,
                               const SensorWindow& z);

// Per-window step delta (last - first) of a cumulative counter; a single
// reading yields delta 0.
ChannelWindow derive_step_delta(const SensorWindow& pedometer);

// Assembles one feature vector: 7 stats per regular channel, one
// `pedometer_steps` entry for a step-delta channel. Channel order is
// preserved. Throws ContractError when no channels remain.
FeatureVector window_features(const std::vector<ChannelWindow>& channels, FeatureKind kind,
                              TimestampMs end_timestamp);

}  // namespace concentra

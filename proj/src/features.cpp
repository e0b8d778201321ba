#include "concentra/features.hpp"

#include <cmath>

namespace concentra {

ChannelWindow derive_magnitude(const std::string& name, const SensorWindow& x, const SensorWindow& y,
                               const SensorWindow& z) {
  if (x.bounds.start != y.bounds.start || x.bounds.start != z.bounds.start || x.bounds.end != y.bounds.end ||
      x.bounds.end != z.bounds.end) {
    throw ContractError("derive_magnitude: axis windows must share bounds");
  }
  ChannelWindow out;
  out.name = name;
  std::size_t ix = 0, iy = 0, iz = 0;
  std::vector<double> mags;
  mags.reserve(x.timestamps.size());
  while (ix < x.timestamps.size() && iy < y.timestamps.size() && iz < z.timestamps.size()) {
    const TimestampMs tx = x.timestamps[ix];
    const TimestampMs ty = y.timestamps[iy];
    const TimestampMs tz = z.timestamps[iz];
    const TimestampMs lead = std::max(tx, std::max(ty, tz));
    if (tx < lead) {
      ++ix;
      continue;
    }
    if (ty < lead) {
      ++iy;
      continue;
    }
    if (tz < lead) {
      ++iz;
      continue;
    }
    const double vx = x.values(static_cast<Eigen::Index>(ix));
    const double vy = y.values(static_cast<Eigen::Index>(iy));
    const double vz = z.values(static_cast<Eigen::Index>(iz));
    out.timestamps.push_back(tx);
    mags.push_back(std::sqrt(vx * vx + vy * vy + vz * vz));
    ++ix;
    ++iy;
    ++iz;
  }
  out.values = Eigen::Map<const Vector>(mags.data(), static_cast<Eigen::Index>(mags.size()));
  return out;
}

ChannelWindow derive_step_delta(const SensorWindow& pedometer) {
  ChannelWindow out;
  out.name = "pedometer";
  out.is_step_delta = true;
  double delta = 0;
  if (pedometer.count() > 1) {
    delta = pedometer.values(pedometer.count() - 1) - pedometer.values(0);
  }
  if (pedometer.count() > 0) {
    out.timestamps.push_back(pedometer.timestamps.back());
    out.values.resize(1);
    out.values(0) = delta;
  }
  return out;
}

FeatureVector window_features(const std::vector<ChannelWindow>& channels, FeatureKind kind,
                              TimestampMs end_timestamp) {
  FeatureVector fv;
  fv.kind = kind;
  fv.end_timestamp = end_timestamp;

  std::vector<double> values;
  for (const auto& channel : channels) {
    if (channel.values.size() == 0) continue;
    if (channel.is_step_delta) {
      fv.names.push_back(channel.name + "_steps");
      values.push_back(channel.values(0));
      continue;
    }
    const auto s = stats::extract_stats(channel.values);
    for (int i = 0; i < stats::kStatCount; ++i) {
      fv.names.push_back(channel.name + "_" + std::string(stats::kStatNames[static_cast<std::size_t>(i)]));
      values.push_back(stats::stat_by_index(s, i));
    }
  }
  if (fv.names.empty()) throw ContractError("window_features: every channel was dropped");
  fv.values = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return fv;
}

}  // namespace concentra

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace concentra {

// Registered channel schema. Ambient channels come from floor stations except
// the magnetometer, which is phone-sourced but classified ambient; physical
// channels come from participant devices. Triaxial CSV rows expand to the
// per-axis channels at ingest.
enum class Channel : int {
  Temperature = 0,
  Humidity,
  Pressure,
  Noise,
  Co2,
  MagnetX,
  MagnetY,
  MagnetZ,
  AccelX,
  AccelY,
  AccelZ,
  GyroX,
  GyroY,
  GyroZ,
  Pedometer,
};

constexpr int kChannelCount = 15;

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "temperature", "humidity", "pressure", "noise",  "co2",
    "magnet_x",    "magnet_y", "magnet_z", "accel_x", "accel_y",
    "accel_z",     "gyro_x",   "gyro_y",   "gyro_z",  "pedometer",
};

inline std::string_view channel_name(Channel c) {
  return kChannelNames[static_cast<std::size_t>(c)];
}

inline std::optional<Channel> parse_channel(std::string_view name) {
  for (int i = 0; i < kChannelCount; ++i) {
    if (kChannelNames[static_cast<std::size_t>(i)] == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

// Channels accepted by the ambient CSV format.
inline bool is_ambient_csv_channel(Channel c) {
  return static_cast<int>(c) <= static_cast<int>(Channel::MagnetZ);
}

inline bool is_station_channel(Channel c) {
  return static_cast<int>(c) <= static_cast<int>(Channel::Co2);
}

// The five station channels pooled across a floor.
constexpr std::array<Channel, 5> kStationChannels = {
    Channel::Temperature, Channel::Humidity, Channel::Pressure, Channel::Noise, Channel::Co2,
};

constexpr std::array<Channel, 3> kMagnetAxes = {Channel::MagnetX, Channel::MagnetY, Channel::MagnetZ};
constexpr std::array<Channel, 3> kAccelAxes = {Channel::AccelX, Channel::AccelY, Channel::AccelZ};
constexpr std::array<Channel, 3> kGyroAxes = {Channel::GyroX, Channel::GyroY, Channel::GyroZ};

}  // namespace concentra

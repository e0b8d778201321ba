#include "concentra/features.hpp"

#include <doctest.h>

#include <algorithm>

using namespace concentra;

namespace {

SensorWindow make_window(Channel channel, const std::vector<std::pair<TimestampMs, double>>& samples,
                         TimestampMs start = 0, TimestampMs end = 300'000) {
  SensorWindow w;
  w.bounds = {start, end, Inclusion::StartInEndEx};
  w.channel = channel;
  w.values.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    w.timestamps.push_back(samples[i].first);
    w.values(static_cast<Eigen::Index>(i)) = samples[i].second;
  }
  return w;
}

ChannelWindow constant_channel(const std::string& name, double value, int n) {
  ChannelWindow c;
  c.name = name;
  c.values = Vector::Constant(n, value);
  for (int i = 0; i < n; ++i) c.timestamps.push_back(i);
  return c;
}

}  // namespace

TEST_CASE("derive_magnitude on a 3-4-5 triple") {
  const auto x = make_window(Channel::AccelX, {{0, 3.0}});
  const auto y = make_window(Channel::AccelY, {{0, 4.0}});
  const auto z = make_window(Channel::AccelZ, {{0, 0.0}});
  const auto mag = derive_magnitude("accel_mag", x, y, z);
  REQUIRE(mag.values.size() == 1);
  CHECK(mag.values(0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("derive_magnitude aligns by timestamp and skips incomplete samples") {
  const auto x = make_window(Channel::AccelX, {{0, 1.0}, {10, 3.0}, {20, 1.0}});
  const auto y = make_window(Channel::AccelY, {{10, 4.0}, {20, 2.0}});
  const auto z = make_window(Channel::AccelZ, {{5, 9.0}, {10, 0.0}, {20, 2.0}});
  const auto mag = derive_magnitude("accel_mag", x, y, z);
  REQUIRE(mag.values.size() == 2);  // t=10 and t=20 have all three axes
  CHECK(mag.timestamps[0] == 10);
  CHECK(mag.values(0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mag.values(1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("all-zero gyro gives an all-zero magnitude") {
  const auto x = make_window(Channel::GyroX, {{0, 0.0}, {1, 0.0}});
  const auto y = make_window(Channel::GyroY, {{0, 0.0}, {1, 0.0}});
  const auto z = make_window(Channel::GyroZ, {{0, 0.0}, {1, 0.0}});
  const auto mag = derive_magnitude("gyro_mag", x, y, z);
  REQUIRE(mag.values.size() == 2);
  CHECK(mag.values.maxCoeff() == 0.0);
}

TEST_CASE("pedometer delta is last minus first") {
  const auto ped = make_window(Channel::Pedometer, {{0, 100.0}, {60, 103.0}, {120, 110.0}});
  const auto delta = derive_step_delta(ped);
  REQUIRE(delta.values.size() == 1);
  CHECK(delta.values(0) == 10.0);
  CHECK(delta.is_step_delta);
}

TEST_CASE("single pedometer reading gives delta 0") {
  const auto ped = make_window(Channel::Pedometer, {{0, 100.0}});
  const auto delta = derive_step_delta(ped);
  REQUIRE(delta.values.size() == 1);
  CHECK(delta.values(0) == 0.0);
}

TEST_CASE("an ambient window with six channels produces 42 named features") {
  std::vector<ChannelWindow> channels;
  for (const char* name : {"temperature", "humidity", "pressure", "noise", "co2", "magnet_mag"}) {
    channels.push_back(constant_channel(name, 1.0, 5));
  }
  const auto fv = window_features(channels, FeatureKind::Ambient, 1000);
  CHECK(fv.names.size() == 42);
  CHECK(fv.values.size() == 42);
  CHECK(fv.end_timestamp == 1000);
  CHECK(std::count_if(fv.names.begin(), fv.names.end(),
                      [](const std::string& n) { return n.rfind("co2_", 0) == 0; }) == 7);
  // Unique names
  auto names = fv.names;
  std::sort(names.begin(), names.end());
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
}

TEST_CASE("a physical window with 8 channels plus pedometer produces 57 features") {
  std::vector<ChannelWindow> channels;
  for (const char* name :
       {"accel_x", "accel_y", "accel_z", "accel_mag", "gyro_x", "gyro_y", "gyro_z", "gyro_mag"}) {
    channels.push_back(constant_channel(name, 0.5, 10));
  }
  ChannelWindow ped;
  ped.name = "pedometer";
  ped.is_step_delta = true;
  ped.timestamps.push_back(0);
  ped.values = Vector::Constant(1, 12.0);
  channels.push_back(ped);
  const auto fv = window_features(channels, FeatureKind::Physical, 2000);
  CHECK(fv.names.size() == 57);
  const auto it = std::find(fv.names.begin(), fv.names.end(), "pedometer_steps");
  REQUIRE(it != fv.names.end());
  CHECK(fv.values(it - fv.names.begin()) == 12.0);
}

TEST_CASE("constant channels produce exactly zero std and iqr features") {
  std::vector<ChannelWindow> channels{constant_channel("co2", 7.25, 9)};
  const auto fv = window_features(channels, FeatureKind::Ambient, 0);
  for (std::size_t i = 0; i < fv.names.size(); ++i) {
    if (fv.names[i] == "co2_std" || fv.names[i] == "co2_iqr") {
      CHECK(fv.values(static_cast<Eigen::Index>(i)) == 0.0);
    }
  }
}

TEST_CASE("dropping every channel is an error") {
  std::vector<ChannelWindow> empty_only;
  ChannelWindow c;
  c.name = "co2";
  empty_only.push_back(c);
  CHECK_THROWS_AS(window_features(empty_only, FeatureKind::Ambient, 0), ContractError);
}

TEST_CASE("mismatched axis bounds are rejected") {
  const auto x = make_window(Channel::AccelX, {{0, 1.0}}, 0, 1000);
  const auto y = make_window(Channel::AccelY, {{0, 1.0}}, 0, 2000);
  const auto z = make_window(Channel::AccelZ, {{0, 1.0}}, 0, 1000);
  CHECK_THROWS_AS(derive_magnitude("accel_mag", x, y, z), ContractError);
}

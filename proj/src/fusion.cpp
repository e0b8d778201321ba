#include "concentra/fusion.hpp"

#include "concentra/csv.hpp"
#include "concentra/rng.hpp"

#include <algorithm>
#include <filesystem>

namespace concentra {

namespace {

constexpr std::array<std::string_view, 5> kAmbientStationOrder = {"temperature", "humidity", "pressure",
                                                                  "noise", "co2"};
constexpr std::array<std::string_view, 8> kPhysicalChannelOrder = {
    "accel_x", "accel_y", "accel_z", "accel_mag", "gyro_x", "gyro_y", "gyro_z", "gyro_mag"};

TimestampMs slot_start_ms(const Date& date, Slot slot, int utc_offset_minutes) {
  const TimestampMs midnight = local_midnight_utc_ms(date, utc_offset_minutes);
  const int start_min = slot == Slot::Morning ? kMorningStartMin : kAfternoonStartMin;
  return midnight + static_cast<TimestampMs>(start_min) * kMillisPerMinute;
}

TimestampMs slot_end_ms(const Date& date, Slot slot, int utc_offset_minutes) {
  const TimestampMs midnight = local_midnight_utc_ms(date, utc_offset_minutes);
  const int end_min = slot == Slot::Morning ? kMorningEndMin : kAfternoonEndMin;
  return midnight + static_cast<TimestampMs>(end_min) * kMillisPerMinute;
}

}  // namespace

std::vector<std::string> FeatureManifest::all() const {
  std::vector<std::string> out = ambient;
  out.insert(out.end(), physical.begin(), physical.end());
  return out;
}

std::uint64_t FeatureManifest::schema_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& name : ambient) h = fnv1a(name, fnv1a("|", h));
  h = fnv1a("/", h);
  for (const auto& name : physical) h = fnv1a(name, fnv1a("|", h));
  return h;
}

FeatureManifest canonical_manifest() {
  FeatureManifest m;
  for (const auto channel : kAmbientStationOrder) {
    for (const auto stat : stats::kStatNames) {
      m.ambient.push_back(std::string(channel) + "_" + std::string(stat));
    }
  }
  for (const auto stat : stats::kStatNames) {
    m.ambient.push_back("magnet_mag_" + std::string(stat));
  }
  for (const auto channel : kPhysicalChannelOrder) {
    for (const auto stat : stats::kStatNames) {
      m.physical.push_back(std::string(channel) + "_" + std::string(stat));
    }
  }
  m.physical.push_back("pedometer_steps");
  return m;
}

const char* to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::NoSurvey: return "no-survey";
    case SkipReason::CoverageFailPhysical: return "coverage-fail-physical";
    default: return "coverage-fail-ambient";
  }
}

std::size_t SkipAudit::count(SkipReason reason) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const SkipRecord& r) { return r.reason == reason; }));
}

std::vector<WindowBounds> base_windows(const Date& date, Slot slot, int utc_offset_minutes) {
  return slide_windows(slot_start_ms(date, slot, utc_offset_minutes), slot_end_ms(date, slot, utc_offset_minutes),
                       kBaseWindowMs, 0.0);
}

WindowBounds ambient_bounds_for(const WindowBounds& base) {
  const TimestampMs centroid = base.start + kCentroidOffsetMs;
  return WindowBounds{centroid - kAmbientWindowMs, centroid, Inclusion::StartExEndIn};
}

InstanceOrSkip build_instance(const Repository& repo, const std::string& participant, const WindowBounds& base,
                              Slot slot, const FusionConfig& config) {
  const auto& site = repo.site();
  const Date date = local_date_of(base.start, site.utc_offset_minutes);

  const SurveyReport* survey = repo.find_survey(participant, date, slot);
  if (survey == nullptr) return SkipReason::NoSurvey;

  const double rate = config.physical_rate_hz > 0 ? config.physical_rate_hz : site.physical_rate_hz;
  const NominalRate device_rate = rate > 0 ? NominalRate(rate) : NominalRate();
  const std::vector<std::string> self{participant};

  // Physical block: per-axis accel/gyro at the device rate, derived
  // magnitudes, pedometer delta.
  std::array<SensorWindow, 3> accel, gyro;
  for (int i = 0; i < 3; ++i) {
    accel[static_cast<std::size_t>(i)] = materialize(repo, base, self, kAccelAxes[static_cast<std::size_t>(i)], device_rate);
    gyro[static_cast<std::size_t>(i)] = materialize(repo, base, self, kGyroAxes[static_cast<std::size_t>(i)], device_rate);
    if (!passes_coverage(accel[static_cast<std::size_t>(i)], device_rate) ||
        !passes_coverage(gyro[static_cast<std::size_t>(i)], device_rate)) {
      return SkipReason::CoverageFailPhysical;
    }
  }
  const SensorWindow pedometer = materialize(repo, base, self, Channel::Pedometer, NominalRate());
  if (!passes_coverage(pedometer, NominalRate())) return SkipReason::CoverageFailPhysical;

  const ChannelWindow accel_mag = derive_magnitude("accel_mag", accel[0], accel[1], accel[2]);
  const ChannelWindow gyro_mag = derive_magnitude("gyro_mag", gyro[0], gyro[1], gyro[2]);
  if (accel_mag.values.size() == 0 || gyro_mag.values.size() == 0) return SkipReason::CoverageFailPhysical;

  std::vector<ChannelWindow> physical_channels;
  physical_channels.push_back(to_channel_window(accel[0]));
  physical_channels.push_back(to_channel_window(accel[1]));
  physical_channels.push_back(to_channel_window(accel[2]));
  physical_channels.push_back(accel_mag);
  physical_channels.push_back(to_channel_window(gyro[0]));
  physical_channels.push_back(to_channel_window(gyro[1]));
  physical_channels.push_back(to_channel_window(gyro[2]));
  physical_channels.push_back(gyro_mag);
  physical_channels.push_back(derive_step_delta(pedometer));

  // Ambient block: station channels pooled over the floor for the 30-minute
  // window ending at the base centroid; the phone magnetometer is windowed on
  // the 5-minute base grid and merged in as magnet_mag.
  const WindowBounds ambient_bounds = ambient_bounds_for(base);
  const std::vector<std::string> stations = site.all_stations();

  std::vector<ChannelWindow> ambient_channels;
  for (const Channel channel : kStationChannels) {
    SensorWindow w = materialize(repo, ambient_bounds, stations, channel, NominalRate());
    if (!passes_coverage(w, NominalRate())) return SkipReason::CoverageFailAmbient;
    ambient_channels.push_back(to_channel_window(w));
  }
  std::array<SensorWindow, 3> magnet;
  for (int i = 0; i < 3; ++i) {
    magnet[static_cast<std::size_t>(i)] = materialize(repo, base, self, kMagnetAxes[static_cast<std::size_t>(i)], NominalRate());
    if (!passes_coverage(magnet[static_cast<std::size_t>(i)], NominalRate())) return SkipReason::CoverageFailAmbient;
  }
  const ChannelWindow magnet_mag = derive_magnitude("magnet_mag", magnet[0], magnet[1], magnet[2]);
  if (magnet_mag.values.size() == 0) return SkipReason::CoverageFailAmbient;
  ambient_channels.push_back(magnet_mag);

  LabeledInstance instance;
  instance.participant = participant;
  instance.end_timestamp = base.end;
  instance.physical = window_features(physical_channels, FeatureKind::Physical, base.end);
  instance.ambient = window_features(ambient_channels, FeatureKind::Ambient, ambient_bounds.end);
  instance.label = survey->concentration;
  instance.slot = slot;
  instance.site = site.site_id;
  instance.date = date;
  instance.zone = survey->zone;
  return instance;
}

Dataset build_dataset(const Repository& repo, Slot slot, const FusionConfig& config, SkipAudit* audit) {
  const auto& site = repo.site();
  Dataset dataset;
  dataset.site = site.site_id;
  dataset.slot = slot;
  dataset.manifest = canonical_manifest();

  const auto min_ts = repo.min_timestamp();
  const auto max_ts = repo.max_timestamp();
  if (!min_ts || !max_ts) throw DataError("build_dataset: repository holds no readings");

  const Date first_date = local_date_of(*min_ts, site.utc_offset_minutes);
  const Date last_date = local_date_of(*max_ts, site.utc_offset_minutes);
  const std::vector<std::string> participants = repo.participants();
  if (participants.empty()) throw DataError("build_dataset: no participants in repository");

  for (const auto& participant : participants) {
    for (std::int64_t day = days_from_civil(first_date); day <= days_from_civil(last_date); ++day) {
      const Date date = civil_from_days(day);
      for (const WindowBounds& base : base_windows(date, slot, site.utc_offset_minutes)) {
        InstanceOrSkip result = build_instance(repo, participant, base, slot, config);
        if (std::holds_alternative<LabeledInstance>(result)) {
          dataset.instances.push_back(std::move(std::get<LabeledInstance>(result)));
        } else if (audit != nullptr) {
          audit->records.push_back({participant, date, base.start, std::get<SkipReason>(result)});
        }
      }
    }
  }

  std::sort(dataset.instances.begin(), dataset.instances.end(),
            [](const LabeledInstance& a, const LabeledInstance& b) {
              if (a.participant != b.participant) return a.participant < b.participant;
              return a.end_timestamp < b.end_timestamp;
            });
  if (dataset.instances.empty()) throw DataError("build_dataset: no instances emitted (empty dataset)");
  return dataset;
}

Matrix feature_matrix(const Dataset& dataset) {
  const auto n = static_cast<Eigen::Index>(dataset.instances.size());
  const auto da = static_cast<Eigen::Index>(dataset.manifest.ambient.size());
  const auto dp = static_cast<Eigen::Index>(dataset.manifest.physical.size());
  Matrix X(n, da + dp);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& inst = dataset.instances[static_cast<std::size_t>(i)];
    if (inst.ambient.values.size() != da || inst.physical.values.size() != dp) {
      throw ContractError("feature_matrix: instance does not match manifest");
    }
    X.row(i).head(da) = inst.ambient.values.transpose();
    X.row(i).tail(dp) = inst.physical.values.transpose();
  }
  return X;
}

IntVector label_vector(const Dataset& dataset) {
  IntVector y(static_cast<Eigen::Index>(dataset.instances.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = dataset.instances[static_cast<std::size_t>(i)].label;
  }
  return y;
}

void export_dataset(const Dataset& dataset, const SkipAudit& audit, const std::string& out_dir,
                    const std::string& prefix) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/" + prefix;

  {
    csv::Writer out(base + "_dataset.csv");
    std::string header = "participant_id,end_timestamp_ms,label";
    for (const auto& name : dataset.manifest.all()) {
      header += ',';
      header += name;
    }
    out.write_line(header);
    const Matrix X = feature_matrix(dataset);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const auto& inst = dataset.instances[static_cast<std::size_t>(i)];
      std::string line = inst.participant;
      line += ',';
      line += std::to_string(inst.end_timestamp);
      line += ',';
      line += std::to_string(inst.label);
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        line += ',';
        line += csv::format_double(X(i, j));
      }
      out.write_line(line);
    }
    out.close();
  }

  {
    csv::Writer out(base + "_manifest.txt");
    out.write_line("site=" + dataset.site);
    out.write_line("slot=" + std::string(to_string(dataset.slot)));
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(dataset.manifest.schema_hash()));
    out.write_line("schema_hash=" + std::string(hash));
    std::string amb = "ambient_features=";
    for (std::size_t i = 0; i < dataset.manifest.ambient.size(); ++i) {
      if (i > 0) amb += ',';
      amb += dataset.manifest.ambient[i];
    }
    out.write_line(amb);
    std::string phys = "physical_features=";
    for (std::size_t i = 0; i < dataset.manifest.physical.size(); ++i) {
      if (i > 0) phys += ',';
      phys += dataset.manifest.physical[i];
    }
    out.write_line(phys);
    out.write_line("instances=" + std::to_string(dataset.instances.size()));
    out.close();
  }

  {
    csv::Writer out(base + "_skips.csv");
    out.write_line("participant_id,date,window_start_ms,reason");
    for (const auto& record : audit.records) {
      std::string line = record.participant;
      line += ',';
      line += format_date(record.date);
      line += ',';
      line += std::to_string(record.window_start);
      line += ',';
      line += to_string(record.reason);
      out.write_line(line);
    }
    out.close();
  }
}

Dataset import_dataset(const std::string& out_dir, const std::string& prefix) {
  const std::string base = out_dir + "/" + prefix;
  Dataset dataset;

  {
    csv::Reader reader(base + "_manifest.txt");
    std::string_view line;
    std::string recorded_hash;
    while (reader.next_line(line)) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string key(line.substr(0, eq));
      const std::string value(line.substr(eq + 1));
      if (key == "site") {
        dataset.site = value;
      } else if (key == "slot") {
        if (!parse_slot(value, dataset.slot)) throw DataError("manifest: bad slot");
      } else if (key == "schema_hash") {
        recorded_hash = value;
      } else if (key == "ambient_features") {
        for (const auto f : csv::split(value)) dataset.manifest.ambient.emplace_back(f);
      } else if (key == "physical_features") {
        for (const auto f : csv::split(value)) dataset.manifest.physical.emplace_back(f);
      }
    }
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(dataset.manifest.schema_hash()));
    if (!recorded_hash.empty() && recorded_hash != hash) {
      throw DataError("manifest: schema hash mismatch (dataset written with a different feature schema)");
    }
  }

  const auto da = static_cast<Eigen::Index>(dataset.manifest.ambient.size());
  const auto dp = static_cast<Eigen::Index>(dataset.manifest.physical.size());

  csv::Reader reader(base + "_dataset.csv");
  std::string_view line;
  if (!reader.next_line(line)) throw DataError("dataset: empty file");
  const auto header = csv::split(line);
  if (header.size() != static_cast<std::size_t>(3 + da + dp)) throw DataError("dataset: header/manifest mismatch");

  while (reader.next_line(line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != static_cast<std::size_t>(3 + da + dp)) throw DataError("dataset: bad row width");
    LabeledInstance inst;
    inst.participant = std::string(fields[0]);
    if (!csv::parse_int64(fields[1], inst.end_timestamp) || !csv::parse_int(fields[2], inst.label)) {
      throw DataError("dataset: bad metadata fields");
    }
    inst.slot = dataset.slot;
    inst.site = dataset.site;
    inst.ambient.kind = FeatureKind::Ambient;
    inst.ambient.names = dataset.manifest.ambient;
    inst.ambient.values.resize(da);
    inst.physical.kind = FeatureKind::Physical;
    inst.physical.names = dataset.manifest.physical;
    inst.physical.values.resize(dp);
    for (Eigen::Index j = 0; j < da; ++j) {
      double v = 0;
      if (!csv::parse_double(fields[static_cast<std::size_t>(3 + j)], v)) throw DataError("dataset: bad value");
      inst.ambient.values(j) = v;
    }
    for (Eigen::Index j = 0; j < dp; ++j) {
      double v = 0;
      if (!csv::parse_double(fields[static_cast<std::size_t>(3 + da + j)], v)) throw DataError("dataset: bad value");
      inst.physical.values(j) = v;
    }
    inst.ambient.end_timestamp = inst.end_timestamp - kBaseWindowMs + kCentroidOffsetMs;
    inst.physical.end_timestamp = inst.end_timestamp;
    dataset.instances.push_back(std::move(inst));
  }
  if (dataset.instances.empty()) throw DataError("dataset: no instances");
  return dataset;
}

}  // namespace concentra

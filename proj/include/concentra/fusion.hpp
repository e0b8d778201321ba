#pragma once

#include "concentra/features.hpp"
#include "concentra/repository.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace concentra {

constexpr DurationMs kBaseWindowMs = 5 * kMillisPerMinute;
constexpr DurationMs kAmbientWindowMs = 30 * kMillisPerMinute;
constexpr DurationMs kCentroidOffsetMs = kBaseWindowMs / 2;  // 150 000 ms

// Slot ranges in local wall-clock minutes from midnight. Morning windows are
// labeled by the 10:00 report, afternoon windows by the 15:30 report.
constexpr int kMorningStartMin = 8 * 60;
constexpr int kMorningEndMin = 10 * 60 + 30;
constexpr int kAfternoonStartMin = 10 * 60 + 30;
constexpr int kAfternoonEndMin = 15 * 60 + 30;

struct LabeledInstance {
  std::string participant;  // audit/stratification only, never a feature
  TimestampMs end_timestamp = 0;
  FeatureVector ambient;
  FeatureVector physical;
  int label = 0;
  Slot slot = Slot::Morning;
  std::string site;
  Date date;
  std::optional<std::string> zone;
};

struct FeatureManifest {
  std::vector<std::string> ambient;
  std::vector<std::string> physical;

  std::vector<std::string> all() const;
  std::uint64_t schema_hash() const;
};

// The fixed manifest implied by the registered channel schema.
FeatureManifest canonical_manifest();

struct Dataset {
  std::string site;
  Slot slot = Slot::Morning;
  FeatureManifest manifest;
  std::vector<LabeledInstance> instances;
};

enum class SkipReason { NoSurvey, CoverageFailPhysical, CoverageFailAmbient };

const char* to_string(SkipReason reason);

struct SkipRecord {
  std::string participant;
  Date date;
  TimestampMs window_start = 0;
  SkipReason reason = SkipReason::NoSurvey;
};

struct SkipAudit {
  std::vector<SkipRecord> records;
  std::size_t count(SkipReason reason) const;
};

struct FusionConfig {
  // Nominal accelerometer/gyroscope rate used for expected counts; <= 0 means
  // take it from site metadata.
  double physical_rate_hz = 0;
};

// 5-minute non-overlapping base windows tiling the slot in site-local time.
std::vector<WindowBounds> base_windows(const Date& date, Slot slot, int utc_offset_minutes);

// Ambient window (centroid - 30 min, centroid], start-exclusive-end-inclusive,
// with centroid = base.start + 150 000 ms.
WindowBounds ambient_bounds_for(const WindowBounds& base);

using InstanceOrSkip = std::variant<LabeledInstance, SkipReason>;

InstanceOrSkip build_instance(const Repository& repo, const std::string& participant, const WindowBounds& base,
                              Slot slot, const FusionConfig& config);

// Iterates all participants x spanned dates x base windows. Instances are
// ordered by (participant, timestamp). Throws DataError when nothing is
// emitted.
Dataset build_dataset(const Repository& repo, Slot slot, const FusionConfig& config, SkipAudit* audit);

// Dense views used by models/eval; feature columns follow manifest order
// (ambient block then physical block).
Matrix feature_matrix(const Dataset& dataset);
IntVector label_vector(const Dataset& dataset);

// Canonical artifacts: `<prefix>_dataset.csv` with header
// participant_id,end_timestamp_ms,label,<features...>, a `<prefix>_manifest.txt`
// and `<prefix>_skips.csv` (participant_id,date,window_start_ms,reason).
void export_dataset(const Dataset& dataset, const SkipAudit& audit, const std::string& out_dir,
                    const std::string& prefix);
Dataset import_dataset(const std::string& out_dir, const std::string& prefix);

}  // namespace concentra

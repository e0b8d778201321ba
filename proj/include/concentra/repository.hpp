#pragma once

#include "concentra/channels.hpp"
#include "concentra/timeutil.hpp"
#include "concentra/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace concentra {

// One timestamped scalar inside a stream; the stream key carries source and
// channel so samples stay 16 bytes.
struct ReadingSample {
  TimestampMs ts = 0;
  double value = 0;
};

struct StreamKey {
  std::string source;
  Channel channel = Channel::Temperature;

  bool operator<(const StreamKey& o) const {
    if (source != o.source) return source < o.source;
    return channel < o.channel;
  }
};

struct SurveyReport {
  std::string participant;
  Date date;
  Slot slot = Slot::Morning;
  int concentration = 0;  // Likert 1..5
  std::optional<int> stress;
  std::optional<int> thermal_comfort;
  std::optional<int> sleep_quality;
  std::optional<int> n_formal_meetings;
  std::optional<int> n_informal_meetings;
  std::optional<int> n_projects;
  std::optional<bool> preferred_seat;
  std::optional<std::string> zone;
};

struct SurveyKey {
  std::string participant;
  Date date;
  Slot slot = Slot::Morning;

  bool operator<(const SurveyKey& o) const {
    if (participant != o.participant) return participant < o.participant;
    if (date != o.date) return date < o.date;
    return slot < o.slot;
  }
};

struct SiteMetadata {
  std::string site_id;
  int utc_offset_minutes = 0;
  double physical_rate_hz = 0;  // nominal device rate; 0 = unknown
  std::map<std::string, std::vector<std::string>> stations_by_floor;
  std::vector<std::string> zones;

  std::vector<std::string> all_stations() const;
};

SiteMetadata load_site_metadata(const std::string& path);
void save_site_metadata(const SiteMetadata& meta, const std::string& path);

enum class RangeConvention { StartInEndEx, StartExEndIn };

// Time-indexed repository of sensor streams and survey reports.
// Ingest mutates and needs exclusive access; all query methods are const and
// safe to call concurrently once ingestion is done.
class Repository {
 public:
  // Inserts a batch into one stream, keeping the stream sorted and unique per
  // timestamp with last-write-wins (batch order decides among batch
  // duplicates). Returns the net growth of the stream.
  std::size_t insert_batch(const StreamKey& key, std::vector<ReadingSample> batch);

  // Stores a survey report; returns true when it replaced an existing one.
  bool upsert_survey(SurveyReport report);

  // Pooled, time-sorted readings across the selected sources.
  // Throws ParameterError when t_start >= t_end. Unknown sources/channels
  // contribute nothing.
  std::vector<ReadingSample> query_readings(const std::vector<std::string>& sources, Channel channel,
                                            TimestampMs t_start, TimestampMs t_end,
                                            RangeConvention convention) const;

  std::vector<ReadingSample> query_readings(const std::string& source, Channel channel, TimestampMs t_start,
                                            TimestampMs t_end, RangeConvention convention) const;

  const SurveyReport* find_survey(const std::string& participant, const Date& date, Slot slot) const;
  std::vector<const SurveyReport*> surveys() const;

  // Participants seen in physical streams or surveys, sorted.
  std::vector<std::string> participants() const;

  // Smallest/largest timestamp across all streams; nullopt when empty.
  std::optional<TimestampMs> min_timestamp() const;
  std::optional<TimestampMs> max_timestamp() const;

  std::size_t stream_count() const { return streams_.size(); }
  std::size_t reading_count() const;
  std::size_t survey_count() const { return surveys_.size(); }

  const SiteMetadata& site() const { return site_; }
  void set_site(SiteMetadata meta) { site_ = std::move(meta); }

 private:
  std::map<StreamKey, std::vector<ReadingSample>> streams_;
  std::map<SurveyKey, SurveyReport> surveys_;
  SiteMetadata site_;
};

}  // namespace concentra

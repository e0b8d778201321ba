#include "concentra/ingest.hpp"

#include "concentra/csv.hpp"

#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace concentra {

namespace {

// Per-file staging area; one repository insert per touched stream keeps the
// sort/dedupe cost linear-ish for bulk files. Batch pointers are cached per
// source because rows arrive grouped by device in practice.
class Stage {
 public:
  void add(const std::string& source, Channel channel, TimestampMs ts, double value) {
    if (source != cached_source_) {
      cached_.fill(nullptr);
      cached_source_ = source;
    }
    auto*& slot = cached_[static_cast<std::size_t>(channel)];
    if (slot == nullptr) slot = &batches_[StreamKey{source, channel}];
    slot->push_back({ts, value});
  }

  void commit(Repository& repo, IngestSummary& summary) {
    for (auto& [key, batch] : batches_) {
      summary.per_channel[key.channel] += batch.size();
      summary.readings_accepted += batch.size();
      summary.net_new += repo.insert_batch(key, std::move(batch));
    }
    summary.replaced = summary.readings_accepted - summary.net_new;
  }

 private:
  std::map<StreamKey, std::vector<ReadingSample>> batches_;
  std::string cached_source_;
  std::array<std::vector<ReadingSample>*, kChannelCount> cached_{};
};

bool expect_header(csv::Reader& reader, std::string_view expected, const std::string& path) {
  std::string_view line;
  if (!reader.next_line(line)) throw DataError("empty file: " + path);
  if (csv::trim(line) != expected) {
    throw DataError("unexpected header in " + path + " (want '" + std::string(expected) + "')");
  }
  return true;
}

std::optional<int> parse_optional_likert(std::string_view field, bool& bad) {
  if (field.empty()) return std::nullopt;
  int v = 0;
  if (!csv::parse_int(field, v) || v < 1 || v > 5) {
    bad = true;
    return std::nullopt;
  }
  return v;
}

std::optional<int> parse_optional_count(std::string_view field, bool& bad) {
  if (field.empty()) return std::nullopt;
  int v = 0;
  if (!csv::parse_int(field, v) || v < 0) {
    bad = true;
    return std::nullopt;
  }
  return v;
}

}  // namespace

IngestSummary& IngestSummary::operator+=(const IngestSummary& o) {
  rows_accepted += o.rows_accepted;
  rows_rejected += o.rows_rejected;
  readings_accepted += o.readings_accepted;
  net_new += o.net_new;
  replaced += o.replaced;
  replacements += o.replacements;
  for (const auto& [channel, n] : o.per_channel) per_channel[channel] += n;
  return *this;
}

IngestSummary ingest_ambient(const std::string& path, Repository& repo) {
  csv::Reader reader(path);
  expect_header(reader, "source_id,timestamp_ms,channel,value", path);

  IngestSummary summary;
  Stage stage;
  std::string_view line;
  while (reader.next_line(line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    TimestampMs ts = 0;
    double value = 0;
    if (fields.size() != 4 || fields[0].empty() || !csv::parse_int64(fields[1], ts) || ts < 0 ||
        !csv::parse_double(fields[3], value) || !std::isfinite(value)) {
      ++summary.rows_rejected;
      continue;
    }
    const auto channel = parse_channel(fields[2]);
    if (!channel || !is_ambient_csv_channel(*channel)) {
      ++summary.rows_rejected;
      continue;
    }
    stage.add(std::string(fields[0]), *channel, ts, value);
    ++summary.rows_accepted;
  }
  stage.commit(repo, summary);
  return summary;
}

IngestSummary ingest_physical(const std::string& path, Repository& repo) {
  csv::Reader reader(path);
  expect_header(reader, "participant_id,timestamp_ms,sensor,x,y,z", path);

  IngestSummary summary;
  Stage stage;
  std::string_view line;
  while (reader.next_line(line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    TimestampMs ts = 0;
    if (fields.size() != 6 || fields[0].empty() || !csv::parse_int64(fields[1], ts) || ts < 0) {
      ++summary.rows_rejected;
      continue;
    }
    const std::string participant(fields[0]);
    const std::string_view sensor = fields[2];
    if (sensor == "accel" || sensor == "gyro") {
      double x = 0, y = 0, z = 0;
      if (!csv::parse_double(fields[3], x) || !csv::parse_double(fields[4], y) ||
          !csv::parse_double(fields[5], z) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        ++summary.rows_rejected;
        continue;
      }
      const auto& axes = sensor == "accel" ? kAccelAxes : kGyroAxes;
      stage.add(participant, axes[0], ts, x);
      stage.add(participant, axes[1], ts, y);
      stage.add(participant, axes[2], ts, z);
      ++summary.rows_accepted;
    } else if (sensor == "pedometer") {
      double count = 0;
      if (!csv::parse_double(fields[3], count) || !std::isfinite(count) || count < 0 ||
          !fields[4].empty() || !fields[5].empty()) {
        ++summary.rows_rejected;
        continue;
      }
      stage.add(participant, Channel::Pedometer, ts, count);
      ++summary.rows_accepted;
    } else {
      ++summary.rows_rejected;
    }
  }
  stage.commit(repo, summary);
  return summary;
}

IngestSummary ingest_surveys(const std::string& path, Repository& repo) {
  csv::Reader reader(path);
  expect_header(reader,
                "participant_id,date,slot,concentration,stress,thermal_comfort,sleep_quality,"
                "n_formal_meetings,n_informal_meetings,n_projects,preferred_seat,zone",
                path);

  IngestSummary summary;
  std::string_view line;
  while (reader.next_line(line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    SurveyReport report;
    int concentration = 0;
    bool bad = false;
    if (fields.size() != 12 || fields[0].empty() || !parse_date(std::string(fields[1]), report.date) ||
        !parse_slot(std::string(fields[2]), report.slot) || !csv::parse_int(fields[3], concentration) ||
        concentration < 1 || concentration > 5) {
      ++summary.rows_rejected;
      continue;
    }
    report.participant = std::string(fields[0]);
    report.concentration = concentration;
    report.stress = parse_optional_likert(fields[4], bad);
    report.thermal_comfort = parse_optional_likert(fields[5], bad);
    report.sleep_quality = parse_optional_likert(fields[6], bad);
    report.n_formal_meetings = parse_optional_count(fields[7], bad);
    report.n_informal_meetings = parse_optional_count(fields[8], bad);
    report.n_projects = parse_optional_count(fields[9], bad);
    if (!fields[10].empty()) {
      bool seat = false;
      if (!csv::parse_bool(fields[10], seat)) bad = true;
      report.preferred_seat = seat;
    }
    if (!fields[11].empty()) report.zone = std::string(fields[11]);
    if (bad) {
      ++summary.rows_rejected;
      continue;
    }
    if (repo.upsert_survey(std::move(report))) ++summary.replacements;
    ++summary.rows_accepted;
  }
  return summary;
}

std::string describe(const IngestSummary& s) {
  std::ostringstream out;
  out << "rows accepted=" << s.rows_accepted << " rejected=" << s.rows_rejected;
  if (s.readings_accepted > 0) {
    out << " readings=" << s.readings_accepted << " net_new=" << s.net_new << " replaced=" << s.replaced;
  }
  if (s.replacements > 0) out << " replacements=" << s.replacements;
  for (const auto& [channel, n] : s.per_channel) {
    out << "\n  " << channel_name(channel) << ": " << n;
  }
  return out.str();
}

}  // namespace concentra

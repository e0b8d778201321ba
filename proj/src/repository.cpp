#include "concentra/repository.hpp"

#include "concentra/csv.hpp"

#include <algorithm>
#include <set>

namespace concentra {

std::vector<std::string> SiteMetadata::all_stations() const {
  std::vector<std::string> out;
  for (const auto& [floor, stations] : stations_by_floor) {
    out.insert(out.end(), stations.begin(), stations.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SiteMetadata load_site_metadata(const std::string& path) {
  SiteMetadata meta;
  csv::Reader reader(path);
  std::string_view line;
  while (reader.next_line(line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError("site metadata: malformed line in " + path);
    const std::string key = csv::trim(line.substr(0, eq));
    const std::string value = csv::trim(line.substr(eq + 1));
    if (key == "site_id") {
      meta.site_id = value;
    } else if (key == "utc_offset_minutes") {
      int v = 0;
      if (!csv::parse_int(value, v)) throw DataError("site metadata: bad utc_offset_minutes");
      meta.utc_offset_minutes = v;
    } else if (key == "physical_rate_hz") {
      double v = 0;
      if (!csv::parse_double(value, v)) throw DataError("site metadata: bad physical_rate_hz");
      meta.physical_rate_hz = v;
    } else if (key == "floor") {
      const std::size_t colon = value.find(':');
      if (colon == std::string::npos) throw DataError("site metadata: floor line needs name:stations");
      const std::string floor = csv::trim(std::string_view(value).substr(0, colon));
      std::vector<std::string> stations;
      for (const auto f : csv::split(std::string_view(value).substr(colon + 1))) {
        const std::string s = csv::trim(f);
        if (!s.empty()) stations.push_back(s);
      }
      meta.stations_by_floor[floor] = std::move(stations);
    } else if (key == "zones") {
      for (const auto f : csv::split(value)) {
        const std::string z = csv::trim(f);
        if (!z.empty()) meta.zones.push_back(z);
      }
    } else {
      throw DataError("site metadata: unknown key '" + key + "'");
    }
  }
  if (meta.site_id.empty()) throw DataError("site metadata: missing site_id");
  return meta;
}

void save_site_metadata(const SiteMetadata& meta, const std::string& path) {
  csv::Writer out(path);
  out.write_line("site_id=" + meta.site_id);
  out.write_line("utc_offset_minutes=" + std::to_string(meta.utc_offset_minutes));
  if (meta.physical_rate_hz > 0) {
    out.write_line("physical_rate_hz=" + csv::format_double(meta.physical_rate_hz));
  }
  for (const auto& [floor, stations] : meta.stations_by_floor) {
    std::string line = "floor=" + floor + ":";
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (i > 0) line += ',';
      line += stations[i];
    }
    out.write_line(line);
  }
  if (!meta.zones.empty()) {
    std::string line = "zones=";
    for (std::size_t i = 0; i < meta.zones.size(); ++i) {
      if (i > 0) line += ',';
      line += meta.zones[i];
    }
    out.write_line(line);
  }
  out.close();
}

std::size_t Repository::insert_batch(const StreamKey& key, std::vector<ReadingSample> batch) {
  if (batch.empty()) return 0;
  auto& stream = streams_[key];
  const std::size_t before = stream.size();

  // Existing entries rank older than the batch; batch order breaks ties among
  // batch duplicates (last write wins).
  struct Tagged {
    TimestampMs ts;
    std::size_t seq;
    double value;
  };
  std::vector<Tagged> combined;
  combined.reserve(stream.size() + batch.size());
  for (std::size_t i = 0; i < stream.size(); ++i) combined.push_back({stream[i].ts, i, stream[i].value});
  for (std::size_t i = 0; i < batch.size(); ++i) combined.push_back({batch[i].ts, before + i, batch[i].value});
  std::sort(combined.begin(), combined.end(), [](const Tagged& a, const Tagged& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.seq < b.seq;
  });

  stream.clear();
  stream.reserve(combined.size());
  for (std::size_t i = 0; i < combined.size(); ++i) {
    if (i + 1 < combined.size() && combined[i + 1].ts == combined[i].ts) continue;  // keep last
    stream.push_back({combined[i].ts, combined[i].value});
  }
  return stream.size() - before;
}

bool Repository::upsert_survey(SurveyReport report) {
  SurveyKey key{report.participant, report.date, report.slot};
  auto [it, inserted] = surveys_.insert_or_assign(std::move(key), std::move(report));
  return !inserted;
}

std::vector<ReadingSample> Repository::query_readings(const std::vector<std::string>& sources, Channel channel,
                                                      TimestampMs t_start, TimestampMs t_end,
                                                      RangeConvention convention) const {
  if (t_start >= t_end) throw ParameterError("query_readings: empty or inverted range");
  std::vector<ReadingSample> out;
  for (const auto& source : sources) {
    const auto it = streams_.find(StreamKey{source, channel});
    if (it == streams_.end()) continue;
    const auto& stream = it->second;
    // Resolve the boundary convention to a half-open [lo, hi) on timestamps.
    const TimestampMs lo = convention == RangeConvention::StartInEndEx ? t_start : t_start + 1;
    const TimestampMs hi = convention == RangeConvention::StartInEndEx ? t_end : t_end + 1;
    const auto begin = std::lower_bound(stream.begin(), stream.end(), lo,
                                        [](const ReadingSample& s, TimestampMs t) { return s.ts < t; });
    const auto end = std::lower_bound(begin, stream.end(), hi,
                                      [](const ReadingSample& s, TimestampMs t) { return s.ts < t; });
    out.insert(out.end(), begin, end);
  }
  if (sources.size() > 1) {
    std::sort(out.begin(), out.end(), [](const ReadingSample& a, const ReadingSample& b) { return a.ts < b.ts; });
  }
  return out;
}

std::vector<ReadingSample> Repository::query_readings(const std::string& source, Channel channel,
                                                      TimestampMs t_start, TimestampMs t_end,
                                                      RangeConvention convention) const {
  return query_readings(std::vector<std::string>{source}, channel, t_start, t_end, convention);
}

const SurveyReport* Repository::find_survey(const std::string& participant, const Date& date, Slot slot) const {
  const auto it = surveys_.find(SurveyKey{participant, date, slot});
  return it == surveys_.end() ? nullptr : &it->second;
}

std::vector<const SurveyReport*> Repository::surveys() const {
  std::vector<const SurveyReport*> out;
  out.reserve(surveys_.size());
  for (const auto& [key, report] : surveys_) out.push_back(&report);
  return out;
}

std::vector<std::string> Repository::participants() const {
  std::set<std::string> ids;
  for (const auto& [key, stream] : streams_) {
    // Physical channels and the phone magnetometer are device-sourced.
    if (!is_station_channel(key.channel)) ids.insert(key.source);
  }
  for (const auto& [key, report] : surveys_) ids.insert(key.participant);
  return std::vector<std::string>(ids.begin(), ids.end());
}

std::optional<TimestampMs> Repository::min_timestamp() const {
  std::optional<TimestampMs> best;
  for (const auto& [key, stream] : streams_) {
    if (stream.empty()) continue;
    if (!best || stream.front().ts < *best) best = stream.front().ts;
  }
  return best;
}

std::optional<TimestampMs> Repository::max_timestamp() const {
  std::optional<TimestampMs> best;
  for (const auto& [key, stream] : streams_) {
    if (stream.empty()) continue;
    if (!best || stream.back().ts > *best) best = stream.back().ts;
  }
  return best;
}

std::size_t Repository::reading_count() const {
  std::size_t n = 0;
  for (const auto& [key, stream] : streams_) n += stream.size();
  return n;
}

}  // namespace concentra

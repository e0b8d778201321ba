#pragma once

#include "concentra/repository.hpp"

#include <map>
#include <string>

namespace concentra {

struct IngestSummary {
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
  std::size_t readings_accepted = 0;  // individual channel readings
  std::size_t net_new = 0;            // readings that grew a stream
  std::size_t replaced = 0;           // readings_accepted - net_new
  std::size_t replacements = 0;       // survey rows overwriting a prior report
  std::map<Channel, std::size_t> per_channel;

  IngestSummary& operator+=(const IngestSummary& o);
};

// Ambient CSV: header `source_id,timestamp_ms,channel,value`.
IngestSummary ingest_ambient(const std::string& path, Repository& repo);

// Physical CSV: header `participant_id,timestamp_ms,sensor,x,y,z`;
// sensor accel|gyro expands x,y,z to three channel readings, pedometer keeps
// x as a cumulative count with y,z empty.
IngestSummary ingest_physical(const std::string& path, Repository& repo);

// Survey CSV: header `participant_id,date,slot,concentration,stress,
// thermal_comfort,sleep_quality,n_formal_meetings,n_informal_meetings,
// n_projects,preferred_seat,zone`; optional fields may be empty.
IngestSummary ingest_surveys(const std::string& path, Repository& repo);

std::string describe(const IngestSummary& s);

}  // namespace concentra

#pragma once

#include "concentra/repository.hpp"
#include "concentra/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace concentra {

// Survey factors entering the pairwise correlation panels.
extern const std::vector<std::string> kSurveyFactors;

struct SurveyFilter {
  std::optional<Slot> slot;
  std::optional<bool> preferred_seat;
  std::optional<std::string> participant;

  std::string describe() const;  // token used in artifact file names
};

struct CorrelationMatrix {
  std::vector<std::string> variables;
  Matrix r;                                // symmetric where defined
  Eigen::MatrixXi pair_counts;             // pairwise-complete sample sizes
  std::vector<std::vector<bool>> defined;  // false = missing cell
  std::string filter_desc;
};

// Pairwise-complete Pearson correlations over the filtered survey reports.
// Cells with fewer than 2 complete pairs or zero variance are marked missing.
// Throws DataError when the filter selects nothing.
CorrelationMatrix correlation_matrix(const std::vector<const SurveyReport*>& surveys, const SurveyFilter& filter);

struct GroupRow {
  std::string group;
  std::string measure;
  int n = 0;
  stats::FiveNumber summary;
};

struct GroupSummary {
  std::string key;
  std::vector<GroupRow> rows;  // ordered by (group, measure)
};

// Five-number summaries of the measures (concentration and, when present,
// stress) per value of the grouping key. Keys: zone, n_formal_meetings,
// n_informal_meetings, preferred_seat, slot.
GroupSummary group_summary(const std::vector<const SurveyReport*>& surveys, const std::string& key,
                           const SurveyFilter& filter);

std::string format_correlation_csv(const CorrelationMatrix& matrix);
std::string format_group_csv(const GroupSummary& summary);

}  // namespace concentra

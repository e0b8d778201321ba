#include "concentra/analytics.hpp"

#include "concentra/csv.hpp"

#include <algorithm>
#include <map>

namespace concentra {

const std::vector<std::string> kSurveyFactors = {
    "concentration", "stress",            "thermal_comfort",     "sleep_quality",
    "n_projects",    "n_formal_meetings", "n_informal_meetings",
};

namespace {

std::optional<double> factor_value(const SurveyReport& report, const std::string& name) {
  const auto lift = [](const std::optional<int>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
  };
  if (name == "concentration") return static_cast<double>(report.concentration);
  if (name == "stress") return lift(report.stress);
  if (name == "thermal_comfort") return lift(report.thermal_comfort);
  if (name == "sleep_quality") return lift(report.sleep_quality);
  if (name == "n_projects") return lift(report.n_projects);
  if (name == "n_formal_meetings") return lift(report.n_formal_meetings);
  if (name == "n_informal_meetings") return lift(report.n_informal_meetings);
  throw ContractError("unknown survey factor: " + name);
}

bool matches(const SurveyReport& report, const SurveyFilter& filter) {
  if (filter.slot && report.slot != *filter.slot) return false;
  if (filter.preferred_seat) {
    if (!report.preferred_seat || *report.preferred_seat != *filter.preferred_seat) return false;
  }
  if (filter.participant && report.participant != *filter.participant) return false;
  return true;
}

}  // namespace

std::string SurveyFilter::describe() const {
  std::string out = slot ? to_string(*slot) : "all";
  out += '_';
  out += preferred_seat ? (*preferred_seat ? "preferred" : "notpreferred") : "anyseat";
  if (participant) {
    out += '_';
    out += *participant;
  }
  return out;
}

CorrelationMatrix correlation_matrix(const std::vector<const SurveyReport*>& surveys, const SurveyFilter& filter) {
  std::vector<const SurveyReport*> selected;
  for (const auto* report : surveys) {
    if (matches(*report, filter)) selected.push_back(report);
  }
  if (selected.size() < 2) throw DataError("correlation_matrix: filter selects fewer than 2 reports");

  const auto v = static_cast<Eigen::Index>(kSurveyFactors.size());
  CorrelationMatrix matrix;
  matrix.variables = kSurveyFactors;
  matrix.filter_desc = filter.describe();
  matrix.r = Matrix::Zero(v, v);
  matrix.pair_counts = Eigen::MatrixXi::Zero(v, v);
  matrix.defined.assign(static_cast<std::size_t>(v), std::vector<bool>(static_cast<std::size_t>(v), false));

  for (Eigen::Index a = 0; a < v; ++a) {
    for (Eigen::Index b = a; b < v; ++b) {
      // Pairwise-complete: keep reports where both factors are present.
      std::vector<double> xs, ys;
      for (const auto* report : selected) {
        const auto x = factor_value(*report, kSurveyFactors[static_cast<std::size_t>(a)]);
        const auto y = factor_value(*report, kSurveyFactors[static_cast<std::size_t>(b)]);
        if (x && y) {
          xs.push_back(*x);
          ys.push_back(*y);
        }
      }
      matrix.pair_counts(a, b) = matrix.pair_counts(b, a) = static_cast<int>(xs.size());
      if (xs.size() < 2) continue;
      const auto xv = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
      const auto yv = Eigen::Map<const Vector>(ys.data(), static_cast<Eigen::Index>(ys.size()));
      double r = 0;
      if (stats::pearson(xv, yv, r)) {
        matrix.r(a, b) = matrix.r(b, a) = r;
        matrix.defined[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        matrix.defined[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
      }
    }
  }
  return matrix;
}

GroupSummary group_summary(const std::vector<const SurveyReport*>& surveys, const std::string& key,
                           const SurveyFilter& filter) {
  const auto group_of = [&](const SurveyReport& report) -> std::optional<std::string> {
    if (key == "zone") return report.zone;
    if (key == "preferred_seat") {
      if (!report.preferred_seat) return std::nullopt;
      return std::string(*report.preferred_seat ? "true" : "false");
    }
    if (key == "slot") return std::string(to_string(report.slot));
    if (key == "n_formal_meetings" || key == "n_informal_meetings" || key == "n_projects") {
      const auto v = factor_value(report, key);
      if (!v) return std::nullopt;
      return std::to_string(static_cast<int>(*v));
    }
    throw ContractError("group_summary: unknown key '" + key + "'");
  };

  std::map<std::string, std::map<std::string, std::vector<double>>> groups;  // group -> measure -> values
  for (const auto* report : surveys) {
    if (!matches(*report, filter)) continue;
    const auto group = group_of(*report);
    if (!group) continue;
    groups[*group]["concentration"].push_back(static_cast<double>(report->concentration));
    if (report->stress) groups[*group]["stress"].push_back(static_cast<double>(*report->stress));
  }
  if (groups.empty()) throw DataError("group_summary: no records carry key '" + key + "'");

  GroupSummary summary;
  summary.key = key;
  for (const auto& [group, measures] : groups) {
    for (const auto& [measure, values] : measures) {
      GroupRow row;
      row.group = group;
      row.measure = measure;
      row.n = static_cast<int>(values.size());
      row.summary = stats::five_number(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
      summary.rows.push_back(std::move(row));
    }
  }
  return summary;
}

std::string format_correlation_csv(const CorrelationMatrix& matrix) {
  std::string out = "variable";
  for (const auto& name : matrix.variables) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < matrix.variables.size(); ++i) {
    out += matrix.variables[i];
    for (std::size_t j = 0; j < matrix.variables.size(); ++j) {
      out += ',';
      if (matrix.defined[i][j]) {
        out += csv::format_double(matrix.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_group_csv(const GroupSummary& summary) {
  std::string out = "group,measure,n,min,q1,median,q3,max\n";
  for (const auto& row : summary.rows) {
    out += row.group;
    out += ',';
    out += row.measure;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += csv::format_double(row.summary.min);
    out += ',';
    out += csv::format_double(row.summary.q1);
    out += ',';
    out += csv::format_double(row.summary.median);
    out += ',';
    out += csv::format_double(row.summary.q3);
    out += ',';
    out += csv::format_double(row.summary.max);
    out += '\n';
  }
  return out;
}

}  // namespace concentra

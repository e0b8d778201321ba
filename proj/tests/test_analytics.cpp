#include "concentra/analytics.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace concentra;

namespace {

SurveyReport make_report(const std::string& participant, int day, Slot slot, int concentration,
                         std::optional<int> stress = std::nullopt,
                         std::optional<int> formal = std::nullopt,
                         std::optional<bool> seat = std::nullopt,
                         std::optional<std::string> zone = std::nullopt) {
  SurveyReport r;
  r.participant = participant;
  r.date = Date{2019, 3, day};
  r.slot = slot;
  r.concentration = concentration;
  r.stress = stress;
  r.n_formal_meetings = formal;
  r.preferred_seat = seat;
  r.zone = std::move(zone);
  return r;
}

concentra::Vector to_vec(const std::vector<double>& v) {
  return Eigen::Map<const concentra::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("pearson of identical, negated and affine sequences") {
  const auto x = to_vec({1, 2, 3, 4});
  double r = 0;
  REQUIRE(stats::pearson(x, x, r));
  CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(stats::pearson(x, (-x).eval(), r));
  CHECK(r == doctest::Approx(-1.0).epsilon(1e-14));
  const auto y = to_vec({5, 7, 9, 11});  // 2x + 3
  REQUIRE(stats::pearson(x, y, r));
  CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pearson is undefined for zero variance and guards its preconditions") {
  const auto x = to_vec({1, 2, 3});
  const auto c = to_vec({5, 5, 5});
  double r = 0;
  CHECK_FALSE(stats::pearson(x, c, r));
  CHECK_THROWS_AS(stats::pearson(x, to_vec({1, 2}), r), ContractError);
  CHECK_THROWS_AS(stats::pearson(to_vec({1}), to_vec({2}), r), ContractError);
}

TEST_CASE("correlation matrix is symmetric with unit diagonal and marked gaps") {
  std::vector<SurveyReport> reports;
  for (int i = 0; i < 12; ++i) {
    auto r = make_report("p1", 1 + i, Slot::Morning, 1 + i % 5, 5 - i % 5, 3);
    r.thermal_comfort = 1 + (i * 3) % 5;
    reports.push_back(r);
  }
  std::vector<const SurveyReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);

  SurveyFilter filter;
  filter.slot = Slot::Morning;
  const auto matrix = correlation_matrix(ptrs, filter);

  const auto index_of = [&](const std::string& name) {
    return static_cast<Eigen::Index>(std::find(matrix.variables.begin(), matrix.variables.end(), name) -
                                     matrix.variables.begin());
  };
  const auto con = index_of("concentration");
  const auto stress = index_of("stress");
  CHECK(matrix.defined[static_cast<std::size_t>(con)][static_cast<std::size_t>(con)]);
  CHECK(matrix.r(con, con) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(matrix.r(con, stress) == doctest::Approx(matrix.r(stress, con)).epsilon(1e-14));
  // concentration and stress were built perfectly anti-aligned
  CHECK(matrix.r(con, stress) == doctest::Approx(-1.0).epsilon(1e-12));

  // n_formal_meetings is constant -> zero variance -> marked missing.
  const auto formal = index_of("n_formal_meetings");
  CHECK_FALSE(matrix.defined[static_cast<std::size_t>(formal)][static_cast<std::size_t>(formal)]);
  CHECK_FALSE(matrix.defined[static_cast<std::size_t>(con)][static_cast<std::size_t>(formal)]);
  // sleep_quality was never reported -> zero pairs.
  const auto sleep = index_of("sleep_quality");
  CHECK(matrix.pair_counts(sleep, sleep) == 0);
  CHECK_FALSE(matrix.defined[static_cast<std::size_t>(sleep)][static_cast<std::size_t>(sleep)]);
}

TEST_CASE("correlation matrix is invariant under report order") {
  std::vector<SurveyReport> reports;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    reports.push_back(make_report("p" + std::to_string(i % 3), 1 + i % 9, Slot::Afternoon, 1 + (i * 2) % 5,
                                  1 + (i * 3) % 5, static_cast<int>(rng() % 4)));
  }
  std::vector<const SurveyReport*> a;
  for (const auto& r : reports) a.push_back(&r);
  auto b = a;
  std::shuffle(b.begin(), b.end(), rng);

  SurveyFilter filter;
  const auto ma = correlation_matrix(a, filter);
  const auto mb = correlation_matrix(b, filter);
  CHECK((ma.r - mb.r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("filters narrow the report set and empty selections raise errors") {
  std::vector<SurveyReport> reports;
  reports.push_back(make_report("p1", 1, Slot::Morning, 4, 2, 1, true));
  reports.push_back(make_report("p1", 2, Slot::Morning, 3, 3, 1, false));
  reports.push_back(make_report("p2", 1, Slot::Afternoon, 2, 4, 2, true));
  std::vector<const SurveyReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);

  SurveyFilter nothing;
  nothing.participant = "p9";
  CHECK_THROWS_AS(correlation_matrix(ptrs, nothing), DataError);

  SurveyFilter seat;
  seat.preferred_seat = true;
  CHECK(seat.describe() == "all_preferred");
  const auto matrix = correlation_matrix(ptrs, seat);
  const auto con = static_cast<Eigen::Index>(
      std::find(matrix.variables.begin(), matrix.variables.end(), "concentration") - matrix.variables.begin());
  CHECK(matrix.pair_counts(con, con) == 2);
}

TEST_CASE("group summaries: constant group and hand-computed medians") {
  std::vector<SurveyReport> reports;
  for (int i = 0; i < 3; ++i) reports.push_back(make_report("p1", 1 + i, Slot::Morning, 3, 2, 1));
  std::vector<const SurveyReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);
  const auto summary = group_summary(ptrs, "n_formal_meetings", SurveyFilter{});
  bool found = false;
  for (const auto& row : summary.rows) {
    if (row.group == "1" && row.measure == "concentration") {
      found = true;
      CHECK(row.n == 3);
      CHECK(row.summary.median == 3.0);
      CHECK(row.summary.q3 - row.summary.q1 == 0.0);
    }
  }
  CHECK(found);
}

TEST_CASE("group summaries: two groups with hand-computed quantiles") {
  std::vector<SurveyReport> reports;
  reports.push_back(make_report("p1", 1, Slot::Morning, 2, std::nullopt, 0));
  reports.push_back(make_report("p2", 1, Slot::Morning, 4, std::nullopt, 0));
  reports.push_back(make_report("p3", 1, Slot::Morning, 1, std::nullopt, 5));
  reports.push_back(make_report("p4", 1, Slot::Morning, 1, std::nullopt, 5));
  std::vector<const SurveyReport*> ptrs;
  for (const auto& r : reports) ptrs.push_back(&r);
  const auto summary = group_summary(ptrs, "n_formal_meetings", SurveyFilter{});
  int total = 0;
  for (const auto& row : summary.rows) {
    if (row.measure != "concentration") continue;
    total += row.n;
    if (row.group == "0") CHECK(row.summary.median == 3.0);
    if (row.group == "5") CHECK(row.summary.median == 1.0);
  }
  CHECK(total == 4);  // groups partition the filtered records
}

TEST_CASE("group summaries reject unknown keys") {
  std::vector<SurveyReport> reports{make_report("p1", 1, Slot::Morning, 3)};
  std::vector<const SurveyReport*> ptrs{&reports[0]};
  CHECK_THROWS_AS(group_summary(ptrs, "favorite_color", SurveyFilter{}), ContractError);
}

TEST_CASE("group summary output is invariant under record shuffling") {
  std::vector<SurveyReport> reports;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 30; ++i) {
    reports.push_back(make_report("p" + std::to_string(i % 5), 1 + i % 9, i % 2 == 0 ? Slot::Morning : Slot::Afternoon,
                                  1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5),
                                  static_cast<int>(rng() % 3)));
  }
  std::vector<const SurveyReport*> a;
  for (const auto& r : reports) a.push_back(&r);
  auto b = a;
  std::shuffle(b.begin(), b.end(), rng);
  const auto csv_a = format_group_csv(group_summary(a, "n_formal_meetings", SurveyFilter{}));
  const auto csv_b = format_group_csv(group_summary(b, "n_formal_meetings", SurveyFilter{}));
  CHECK(csv_a == csv_b);
}

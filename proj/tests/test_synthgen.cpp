#include "concentra/synthgen.hpp"

#include "concentra/csv.hpp"
#include "concentra/ingest.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <map>

using namespace concentra;
using testutil::TempDir;
using testutil::read_file;

namespace {

SynthConfig tiny(std::uint64_t seed) {
  SynthConfig config;
  config.n_participants = 2;
  config.n_days = 1;
  config.stations_per_floor = 2;
  config.physical_rate_hz = 2.0;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("survey row count is participants x days x 2") {
  TempDir dir("synth");
  SynthConfig config = tiny(7);
  config.n_participants = 4;
  config.n_days = 3;
  const auto out = generate(config, dir.str());
  CHECK(out.survey_rows == 4u * 3u * 2u);

  csv::Reader reader(out.surveys_csv);
  std::string_view line;
  std::size_t rows = 0;
  while (reader.next_line(line)) ++rows;
  CHECK(rows == 1 + 4 * 3 * 2);  // header + data
}

TEST_CASE("generation is byte-identical across runs with one seed") {
  TempDir a("synth"), b("synth");
  generate(tiny(42), a.str());
  generate(tiny(42), b.str());
  for (const char* name : {"ambient.csv", "physical.csv", "surveys.csv", "ground_truth.csv", "site.meta"}) {
    CHECK(read_file(a.file(name)) == read_file(b.file(name)));
  }
  TempDir c("synth");
  generate(tiny(43), c.str());
  CHECK(read_file(a.file("surveys.csv")) != read_file(c.file("surveys.csv")));
}

TEST_CASE("generator output passes ingestion with zero rejects") {
  TempDir dir("synth");
  const auto out = generate(tiny(3), dir.str());
  Repository repo;
  repo.set_site(load_site_metadata(out.site_meta));
  const auto a = ingest_ambient(out.ambient_csv, repo);
  const auto p = ingest_physical(out.physical_csv, repo);
  const auto s = ingest_surveys(out.surveys_csv, repo);
  CHECK(a.rows_rejected == 0);
  CHECK(p.rows_rejected == 0);
  CHECK(s.rows_rejected == 0);
  CHECK(a.replaced == 0);
  CHECK(p.replaced == 0);
  CHECK(repo.participants() == std::vector<std::string>{"p01", "p02"});
}

TEST_CASE("uniform shuffled labels hit 0.2 each within 0.02 over 1e4 draws") {
  Rng rng(99);
  std::map<int, int> counts;
  const int draws = 10'000;
  for (int i = 0; i < draws; ++i) ++counts[PlantedLabeler::uniform_label(rng)];
  REQUIRE(counts.size() == 5);
  for (const auto& [label, n] : counts) {
    CHECK(label >= 1);
    CHECK(label <= 5);
    CHECK(std::abs(n / static_cast<double>(draws) - 0.2) <= 0.02);
  }
}

TEST_CASE("joint-mode units with both aggregates at the median land on level 3") {
  // 5x5 grid of aggregates; the center cell sits at the median of both
  // z-scores and of the combined score.
  std::vector<SlotAggregates> corpus;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      corpus.push_back({500.0 + 10.0 * i, 0.5 + 0.1 * j, 0.0});
    }
  }
  const PlantedLabeler labeler(SignalMode::Joint, "", 0.0, corpus);
  Rng rng(1);
  CHECK(labeler.label_of(2 * 5 + 2, rng) == 3);  // center cell
  // Balanced bins: each level appears exactly 5 times.
  std::map<int, int> counts;
  for (std::size_t i = 0; i < corpus.size(); ++i) ++counts[labeler.label_of(i, rng)];
  for (int level = 1; level <= 5; ++level) CHECK(counts[level] == 5);
}

TEST_CASE("skew produces an imbalanced label distribution") {
  std::vector<SlotAggregates> corpus;
  for (int i = 0; i < 100; ++i) corpus.push_back({static_cast<double>(i), 0.0, 0.0});
  const PlantedLabeler labeler(SignalMode::AmbientOnly, "", 1.0, corpus);
  Rng rng(1);
  std::map<int, int> counts;
  for (std::size_t i = 0; i < corpus.size(); ++i) ++counts[labeler.label_of(i, rng)];
  CHECK(counts[1] < counts[5]);
}

TEST_CASE("sidecar marks the informative features per mode") {
  TempDir dir("synth");
  SynthConfig config = tiny(11);
  config.signal_mode = SignalMode::Shuffled;
  generate(config, dir.str());
  const std::string truth = read_file(dir.file("ground_truth.csv"));
  CHECK(truth.find(",none") != std::string::npos);

  TempDir dir2("synth");
  config = tiny(11);
  config.signal_mode = SignalMode::SingleFeature;
  generate(config, dir2.str());
  const std::string planted = read_file(dir2.file("ground_truth.csv"));
  CHECK(planted.find(",pedometer_steps") != std::string::npos);

  TempDir dir3("synth");
  config = tiny(11);
  config.signal_mode = SignalMode::Joint;
  generate(config, dir3.str());
  const std::string joint = read_file(dir3.file("ground_truth.csv"));
  CHECK(joint.find(",co2_mean;accel_mag_std") != std::string::npos);
}

TEST_CASE("label noise corrupts to a different level") {
  // With noise approaching 0.5, reported labels must disagree with the truth
  // for a sizable fraction of units, and never produce out-of-range values.
  TempDir dir("synth");
  SynthConfig config = tiny(13);
  config.n_participants = 6;
  config.n_days = 3;
  config.physical_rate_hz = 1.0;
  config.label_noise = 0.4;
  generate(config, dir.str());

  std::map<std::string, int> truth;
  {
    csv::Reader reader(dir.file("ground_truth.csv"));
    std::string_view line;
    reader.next_line(line);
    while (reader.next_line(line)) {
      const auto f = csv::split(line);
      int label = 0;
      REQUIRE(csv::parse_int(f[3], label));
      truth[std::string(f[0]) + "|" + std::string(f[1]) + "|" + std::string(f[2])] = label;
    }
  }
  csv::Reader reader(dir.file("surveys.csv"));
  std::string_view line;
  reader.next_line(line);
  int total = 0, flipped = 0;
  while (reader.next_line(line)) {
    const auto f = csv::split(line);
    int reported = 0;
    REQUIRE(csv::parse_int(f[3], reported));
    CHECK(reported >= 1);
    CHECK(reported <= 5);
    const int expected = truth.at(std::string(f[0]) + "|" + std::string(f[1]) + "|" + std::string(f[2]));
    ++total;
    if (reported != expected) ++flipped;
  }
  CHECK(total == 36);
  CHECK(flipped > 0);
  CHECK(flipped < total);
}

TEST_CASE("invalid synth configurations are rejected") {
  SynthConfig config;
  config.label_noise = 0.6;
  CHECK_THROWS_AS(config.validate(), ParameterError);
  config = SynthConfig{};
  config.n_participants = 0;
  CHECK_THROWS_AS(config.validate(), ParameterError);
  config = SynthConfig{};
  config.signal_mode = SignalMode::SingleFeature;
  config.single_feature = "humidity_max";
  CHECK_THROWS_AS(config.validate(), ParameterError);
}

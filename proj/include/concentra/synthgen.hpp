#pragma once

#include "concentra/rng.hpp"
#include "concentra/timeutil.hpp"
#include "concentra/types.hpp"

#include <string>
#include <vector>

namespace concentra {

enum class SignalMode { Joint, AmbientOnly, PhysicalOnly, SingleFeature, Shuffled };

const char* to_string(SignalMode mode);
bool parse_signal_mode(const std::string& token, SignalMode& out);

struct SynthConfig {
  int n_participants = 4;
  int n_days = 3;
  int stations_per_floor = 4;
  double physical_rate_hz = 5.0;  // 50 Hz smoke configurations supported
  double label_noise = 0.0;       // in [0, 0.5)
  double skew = 0.0;              // > 0 biases class sizes
  SignalMode signal_mode = SignalMode::Joint;
  std::string single_feature = "pedometer_steps";  // or co2_mean
  std::uint64_t seed = 1;
  std::string site_id = "site1";
  int utc_offset_minutes = 600;
  Date start_date{2019, 3, 4};
  std::vector<std::string> zones = {"violet", "aqua", "amber"};

  void validate() const;  // throws ParameterError
};

// True slot-level aggregates the planted rule reads.
struct SlotAggregates {
  double co2_mean = 0;
  double accel_mag_std = 0;
  double pedometer_steps = 0;
};

// Rank-based quantile binning of the planted score into levels 1..5; built
// over the whole corpus of slot aggregates so classes come out balanced
// (or skewed when configured).
class PlantedLabeler {
 public:
  PlantedLabeler(SignalMode mode, const std::string& single_feature, double skew,
                 const std::vector<SlotAggregates>& corpus);

  // Level of the unit at `index` in the corpus passed to the constructor.
  // Shuffled mode ignores the aggregates and draws from `rng`.
  int label_of(std::size_t index, Rng& rng) const;

  double score(const SlotAggregates& unit) const;

  static int uniform_label(Rng& rng) { return 1 + static_cast<int>(rng.next_below(5)); }

  const std::string& informative_features() const { return informative_; }

 private:
  SignalMode mode_;
  std::string informative_;
  double co2_mean_ = 0, co2_scale_ = 1;
  double act_mean_ = 0, act_scale_ = 1;
  double ped_mean_ = 0, ped_scale_ = 1;
  bool use_co2_ = false, use_activity_ = false, use_pedometer_ = false;
  std::vector<int> labels_by_index_;
};

struct SynthOutput {
  std::string ambient_csv;
  std::string physical_csv;
  std::string surveys_csv;
  std::string ground_truth_csv;
  std::string site_meta;
  std::size_t survey_rows = 0;
};

// Writes the repository file set plus the ground-truth sidecar
// (participant_id,date,slot,true_label,informative_features). Deterministic:
// a fixed seed reproduces every file byte for byte.
SynthOutput generate(const SynthConfig& config, const std::string& out_dir);

}  // namespace concentra

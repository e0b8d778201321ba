#include "concentra/synthgen.hpp"

#include "concentra/csv.hpp"
#include "concentra/fusion.hpp"
#include "concentra/repository.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>

namespace concentra {

const char* to_string(SignalMode mode) {
  switch (mode) {
    case SignalMode::Joint: return "joint";
    case SignalMode::AmbientOnly: return "ambient_only";
    case SignalMode::PhysicalOnly: return "physical_only";
    case SignalMode::SingleFeature: return "single_feature";
    default: return "shuffled";
  }
}

bool parse_signal_mode(const std::string& token, SignalMode& out) {
  for (const SignalMode m : {SignalMode::Joint, SignalMode::AmbientOnly, SignalMode::PhysicalOnly,
                             SignalMode::SingleFeature, SignalMode::Shuffled}) {
    if (token == to_string(m)) {
      out = m;
      return true;
    }
  }
  return false;
}

void SynthConfig::validate() const {
  if (n_participants < 1 || n_days < 1 || stations_per_floor < 1) {
    throw ParameterError("synth: participant/day/station counts must be >= 1");
  }
  if (physical_rate_hz <= 0) throw ParameterError("synth: physical_rate_hz must be > 0");
  if (label_noise < 0 || label_noise >= 0.5) throw ParameterError("synth: label_noise must be in [0, 0.5)");
  if (skew < 0) throw ParameterError("synth: skew must be >= 0");
  if (signal_mode == SignalMode::SingleFeature && single_feature != "pedometer_steps" &&
      single_feature != "co2_mean") {
    throw ParameterError("synth: single_feature supports pedometer_steps or co2_mean");
  }
  if (zones.empty()) throw ParameterError("synth: need at least one zone label");
}

namespace {

void mean_scale(const std::vector<double>& values, double& mean, double& scale) {
  const auto n = static_cast<double>(values.size());
  mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0;
  for (const double v : values) var += (v - mean) * (v - mean);
  var /= n;
  scale = var > 0 ? std::sqrt(var) : 1.0;
}

}  // namespace

PlantedLabeler::PlantedLabeler(SignalMode mode, const std::string& single_feature, double skew,
                               const std::vector<SlotAggregates>& corpus)
    : mode_(mode) {
  switch (mode) {
    case SignalMode::Joint:
      use_co2_ = use_activity_ = true;
      informative_ = "co2_mean;accel_mag_std";
      break;
    case SignalMode::AmbientOnly:
      use_co2_ = true;
      informative_ = "co2_mean";
      break;
    case SignalMode::PhysicalOnly:
      use_activity_ = true;
      informative_ = "accel_mag_std";
      break;
    case SignalMode::SingleFeature:
      if (single_feature == "co2_mean") {
        use_co2_ = true;
      } else {
        use_pedometer_ = true;
      }
      informative_ = single_feature;
      break;
    default:
      informative_ = "none";
      break;
  }
  if (mode == SignalMode::Shuffled || corpus.empty()) return;

  std::vector<double> co2, act, ped;
  co2.reserve(corpus.size());
  for (const auto& u : corpus) {
    co2.push_back(u.co2_mean);
    act.push_back(u.accel_mag_std);
    ped.push_back(u.pedometer_steps);
  }
  mean_scale(co2, co2_mean_, co2_scale_);
  mean_scale(act, act_mean_, act_scale_);
  mean_scale(ped, ped_mean_, ped_scale_);

  // Rank-based binning: weights (1+skew)^c carve the score order into the
  // five levels, exactly balanced at skew 0.
  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = score(corpus[i]);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::array<double, 5> weights{};
  double total_w = 0;
  for (int c = 0; c < 5; ++c) {
    weights[static_cast<std::size_t>(c)] = std::pow(1.0 + skew, c);
    total_w += weights[static_cast<std::size_t>(c)];
  }
  labels_by_index_.assign(n, 1);
  double cum = 0;
  std::size_t lo = 0;
  for (int c = 0; c < 5; ++c) {
    cum += weights[static_cast<std::size_t>(c)];
    const std::size_t hi =
        c == 4 ? n : std::min(n, static_cast<std::size_t>(std::llround(cum / total_w * static_cast<double>(n))));
    for (std::size_t r = lo; r < hi; ++r) labels_by_index_[order[r]] = c + 1;
    lo = std::max(lo, hi);
  }
}

double PlantedLabeler::score(const SlotAggregates& unit) const {
  double s = 0;
  if (use_co2_) s += (unit.co2_mean - co2_mean_) / co2_scale_;
  if (use_activity_) s += (unit.accel_mag_std - act_mean_) / act_scale_;
  if (use_pedometer_) s += (unit.pedometer_steps - ped_mean_) / ped_scale_;
  return s;
}

int PlantedLabeler::label_of(std::size_t index, Rng& rng) const {
  if (mode_ == SignalMode::Shuffled) return uniform_label(rng);
  return labels_by_index_.at(index);
}

namespace {

constexpr double kGravity = 9.806;

struct UnitParams {
  double activity = 0.4;   // drives accel/gyro variance
  double step_rate = 0;    // steps/s in the pedometer-planted mode
  double burst_phase = 0;  // seconds
};

struct DaySlotOffsets {
  double temperature = 0, humidity = 0, pressure = 0, noise = 0, co2 = 150;
};

class Generator {
 public:
  Generator(const SynthConfig& config, const std::string& out_dir) : cfg_(config), out_dir_(out_dir) {}

  SynthOutput run();

 private:
  std::string participant_id(int p) const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%02d", p + 1);
    return buf;
  }
  std::string station_id(int s) const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "st%02d", s + 1);
    return buf;
  }

  Date date_of(int day) const { return civil_from_days(days_from_civil(cfg_.start_date) + day); }

  TimestampMs local_ms(int day, int minutes_from_midnight) const {
    return local_midnight_utc_ms(date_of(day), cfg_.utc_offset_minutes) +
           static_cast<TimestampMs>(minutes_from_midnight) * kMillisPerMinute;
  }

  int cell_of(int day, Slot slot) const { return day * 2 + (slot == Slot::Morning ? 0 : 1); }

  std::size_t unit_index(int p, int day, Slot slot) const {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(cfg_.n_days) * 2 +
           static_cast<std::size_t>(cell_of(day, slot));
  }

  bool flat_ambient() const {
    return cfg_.signal_mode == SignalMode::Shuffled || cfg_.signal_mode == SignalMode::PhysicalOnly ||
           (cfg_.signal_mode == SignalMode::SingleFeature && cfg_.single_feature == "pedometer_steps");
  }
  bool flat_activity() const {
    return cfg_.signal_mode == SignalMode::Shuffled || cfg_.signal_mode == SignalMode::AmbientOnly ||
           cfg_.signal_mode == SignalMode::SingleFeature;
  }
  bool smooth_steps() const {
    return cfg_.signal_mode == SignalMode::SingleFeature && cfg_.single_feature == "pedometer_steps";
  }

  void plan_units();
  void write_ambient();
  void write_physical();
  void write_surveys_and_truth();
  void write_site_meta();

  const SynthConfig& cfg_;
  std::string out_dir_;
  std::vector<DaySlotOffsets> offsets_;     // indexed by cell
  std::vector<UnitParams> units_;           // indexed by unit
  std::vector<SlotAggregates> aggregates_;  // realized, indexed by unit
  std::size_t survey_rows_ = 0;
};

void Generator::plan_units() {
  const int cells = cfg_.n_days * 2;
  offsets_.resize(static_cast<std::size_t>(cells));
  Rng off_rng = substream(cfg_.seed, "day-slot-offsets");

  // Gridded, permuted co2 levels keep the ambient term well separated across
  // (day, slot) cells; flat modes pin it so ambient carries no label signal.
  std::vector<int> co2_perm(static_cast<std::size_t>(cells));
  std::iota(co2_perm.begin(), co2_perm.end(), 0);
  off_rng.shuffle(co2_perm);
  const bool informative_co2 = cfg_.signal_mode == SignalMode::Joint ||
                               cfg_.signal_mode == SignalMode::AmbientOnly ||
                               (cfg_.signal_mode == SignalMode::SingleFeature && cfg_.single_feature == "co2_mean");
  for (int cell = 0; cell < cells; ++cell) {
    auto& off = offsets_[static_cast<std::size_t>(cell)];
    if (flat_ambient()) {
      off = DaySlotOffsets{};
      continue;
    }
    off.temperature = off_rng.uniform(-1.5, 1.5);
    off.humidity = off_rng.uniform(-5, 5);
    off.pressure = off_rng.uniform(-3, 3);
    off.noise = off_rng.uniform(-4, 4);
    if (informative_co2) {
      const double level = (co2_perm[static_cast<std::size_t>(cell)] + 0.5) / cells;
      off.co2 = 300.0 * level + off_rng.uniform(-5, 5);
    } else {
      off.co2 = 150.0;
    }
  }

  units_.resize(static_cast<std::size_t>(cfg_.n_participants) * static_cast<std::size_t>(cells));
  aggregates_.assign(units_.size(), SlotAggregates{});

  // In joint mode the activity jitter is keyed to the grid position, so the
  // physical arm alone sees only n_participants distinct regimes and cannot
  // single out (participant, day, slot) units; resolving the label needs the
  // ambient cell as well. The per-unit jitter elsewhere keeps single-arm
  // modes fully recoverable from their own arm.
  std::vector<double> position_jitter(static_cast<std::size_t>(cfg_.n_participants));
  Rng pos_rng = substream(cfg_.seed, "position-jitter");
  for (auto& j : position_jitter) j = pos_rng.uniform(-0.2, 0.2) / cfg_.n_participants;

  for (int day = 0; day < cfg_.n_days; ++day) {
    for (const Slot slot : {Slot::Morning, Slot::Afternoon}) {
      Rng cell_rng = substream(cfg_.seed, "unit-activity", static_cast<std::uint64_t>(cell_of(day, slot)));
      // Per-cell permutation of evenly spaced levels keeps the participants'
      // physical regimes separated within each slot.
      std::vector<int> perm(static_cast<std::size_t>(cfg_.n_participants));
      std::iota(perm.begin(), perm.end(), 0);
      cell_rng.shuffle(perm);
      for (int p = 0; p < cfg_.n_participants; ++p) {
        auto& unit = units_[unit_index(p, day, slot)];
        unit.burst_phase = cell_rng.uniform(0, 300);
        const int position = perm[static_cast<std::size_t>(p)];
        const double unit_jitter = cell_rng.uniform(-0.2, 0.2) / cfg_.n_participants;
        const double jitter = cfg_.signal_mode == SignalMode::Joint
                                  ? position_jitter[static_cast<std::size_t>(position)]
                                  : unit_jitter;
        const double level = std::clamp((position + 0.5) / cfg_.n_participants + jitter, 0.01, 0.99);
        unit.activity = flat_activity() ? 0.4 : level;
        if (smooth_steps()) unit.step_rate = 0.2 + 1.6 * level;
      }
    }
  }
}

void Generator::write_ambient() {
  csv::Writer out(out_dir_ + "/ambient.csv");
  out.write_line("source_id,timestamp_ms,channel,value");

  const bool replicate_days = cfg_.signal_mode == SignalMode::Shuffled;
  const int cells = cfg_.n_days * 2;
  std::vector<double> co2_sum(static_cast<std::size_t>(cells), 0.0);
  std::vector<double> co2_count(static_cast<std::size_t>(cells), 0.0);

  char line[160];
  for (int day = 0; day < cfg_.n_days; ++day) {
    for (int s = 0; s < cfg_.stations_per_floor; ++s) {
      const std::string sid = station_id(s);
      Rng rng = substream(cfg_.seed, "ambient-station",
                          static_cast<std::uint64_t>(s) * 100000u +
                              static_cast<std::uint64_t>(replicate_days ? 0 : day));
      Rng bias_rng = substream(cfg_.seed, "station-bias", static_cast<std::uint64_t>(s));
      const double b_temp = bias_rng.uniform(-0.3, 0.3);
      const double b_hum = bias_rng.uniform(-1, 1);
      const double b_press = bias_rng.uniform(-0.5, 0.5);
      const double b_noise = bias_rng.uniform(-1, 1);
      const double b_co2 = bias_rng.uniform(-8, 8);

      for (int minute = 7 * 60 + 30; minute <= 15 * 60 + 34; ++minute) {
        const TimestampMs ts = local_ms(day, minute);
        const double tod = minute / 60.0;
        const Slot slot = minute < kAfternoonStartMin ? Slot::Morning : Slot::Afternoon;
        const int cell = cell_of(day, slot);
        const auto& off = offsets_[static_cast<std::size_t>(cell)];

        const auto emit = [&](const char* channel, double value) {
          const double q = std::round(value * 1000.0) / 1000.0;
          const int len = std::snprintf(line, sizeof(line), "%s,%lld,%s,%s", sid.c_str(),
                                        static_cast<long long>(ts), channel, csv::format_double(q).c_str());
          out.write_line(std::string_view(line, static_cast<std::size_t>(len)));
          return q;
        };
        emit("temperature", 21.5 + 1.2 * std::sin(M_PI * (tod - 8.0) / 9.0) + off.temperature + b_temp +
                                0.15 * rng.gaussian());
        emit("humidity",
             45.0 + 4.0 * std::sin(M_PI * (tod - 6.0) / 12.0) + off.humidity + b_hum + 1.0 * rng.gaussian());
        emit("pressure",
             1013.0 + 2.0 * std::sin(M_PI * (tod - 4.0) / 14.0) + off.pressure + b_press + 0.4 * rng.gaussian());
        emit("noise",
             44.0 + 5.0 * std::sin(M_PI * (tod - 8.0) / 10.0) + off.noise + b_noise + 2.0 * rng.gaussian());
        const double co2_q =
            emit("co2", 480.0 + 5.0 * std::sin(M_PI * (tod - 8.0) / 8.0) + off.co2 + b_co2 + 3.0 * rng.gaussian());

        // Slot aggregates only count readings inside the slot span.
        const bool in_slot = slot == Slot::Morning ? minute >= kMorningStartMin && minute < kMorningEndMin
                                                   : minute >= kAfternoonStartMin && minute < kAfternoonEndMin;
        if (in_slot) {
          co2_sum[static_cast<std::size_t>(cell)] += co2_q;
          co2_count[static_cast<std::size_t>(cell)] += 1.0;
        }
      }
    }
  }

  // Phone magnetometer: ambient-classified but device-sourced; constant-noise
  // baselines, sampled every 5 seconds.
  const auto q3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
  for (int p = 0; p < cfg_.n_participants; ++p) {
    const std::string pid = participant_id(p);
    for (int day = 0; day < cfg_.n_days; ++day) {
      Rng rng = substream(cfg_.seed, "magnet", static_cast<std::uint64_t>(p) * 100000u + static_cast<std::uint64_t>(day));
      const TimestampMs start = local_ms(day, kMorningStartMin);
      const TimestampMs end = local_ms(day, kAfternoonEndMin);
      for (TimestampMs ts = start; ts < end; ts += 5 * kMillisPerSecond) {
        const double mx = q3(30.0 + 2.0 * rng.gaussian());
        const double my = q3(-10.0 + 2.0 * rng.gaussian());
        const double mz = q3(40.0 + 2.0 * rng.gaussian());
        int len = std::snprintf(line, sizeof(line), "%s,%lld,magnet_x,%s", pid.c_str(), static_cast<long long>(ts),
                                csv::format_double(mx).c_str());
        out.write_line(std::string_view(line, static_cast<std::size_t>(len)));
        len = std::snprintf(line, sizeof(line), "%s,%lld,magnet_y,%s", pid.c_str(), static_cast<long long>(ts),
                            csv::format_double(my).c_str());
        out.write_line(std::string_view(line, static_cast<std::size_t>(len)));
        len = std::snprintf(line, sizeof(line), "%s,%lld,magnet_z,%s", pid.c_str(), static_cast<long long>(ts),
                            csv::format_double(mz).c_str());
        out.write_line(std::string_view(line, static_cast<std::size_t>(len)));
      }
    }
  }
  out.close();

  for (int p = 0; p < cfg_.n_participants; ++p) {
    for (int day = 0; day < cfg_.n_days; ++day) {
      for (const Slot slot : {Slot::Morning, Slot::Afternoon}) {
        const int cell = cell_of(day, slot);
        aggregates_[unit_index(p, day, slot)].co2_mean =
            co2_count[static_cast<std::size_t>(cell)] > 0
                ? co2_sum[static_cast<std::size_t>(cell)] / co2_count[static_cast<std::size_t>(cell)]
                : 0.0;
      }
    }
  }
}

void Generator::write_physical() {
  csv::Writer out(out_dir_ + "/physical.csv");
  out.write_line("participant_id,timestamp_ms,sensor,x,y,z");

  const auto step_ms = static_cast<TimestampMs>(std::llround(1000.0 / cfg_.physical_rate_hz));
  if (step_ms <= 0) throw ParameterError("synth: physical rate too high for millisecond timestamps");

  std::vector<double> mag_sum(units_.size(), 0.0), mag_sumsq(units_.size(), 0.0), mag_count(units_.size(), 0.0);
  std::vector<double> step_delta(units_.size(), 0.0);

  char line[200];
  const auto q5 = [](double v) { return std::round(v * 100000.0) / 100000.0; };

  for (int p = 0; p < cfg_.n_participants; ++p) {
    const std::string pid = participant_id(p);
    for (int day = 0; day < cfg_.n_days; ++day) {
      Rng rng = substream(cfg_.seed, "physical",
                          static_cast<std::uint64_t>(p) * 100000u + static_cast<std::uint64_t>(day));
      const TimestampMs day_start = local_ms(day, kMorningStartMin);
      const TimestampMs afternoon_start = local_ms(day, kAfternoonStartMin);
      const TimestampMs day_end = local_ms(day, kAfternoonEndMin);

      double step_accum = rng.uniform(200, 900);  // counter base; deltas are what matter
      double slot_step_mark = step_accum;
      TimestampMs next_pedometer = day_start;
      Slot current_slot = Slot::Morning;

      for (TimestampMs ts = day_start; ts < day_end; ts += step_ms) {
        const Slot slot = ts < afternoon_start ? Slot::Morning : Slot::Afternoon;
        if (slot != current_slot) {
          step_delta[unit_index(p, day, current_slot)] = step_accum - slot_step_mark;
          slot_step_mark = step_accum;
          current_slot = slot;
        }
        const std::size_t ui = unit_index(p, day, slot);
        const UnitParams& unit = units_[ui];
        const double t_s = static_cast<double>(ts - day_start) / 1000.0;

        const double sigma_a = 0.25 + 2.2 * unit.activity;
        const double sigma_g = 0.08 + 0.8 * unit.activity;

        bool bursting = false;
        if (!smooth_steps()) {
          const double interval = 600.0 - 420.0 * unit.activity;
          const double phase = std::fmod(t_s + unit.burst_phase, interval);
          bursting = phase < 18.0;
        }

        double ax = sigma_a * rng.gaussian();
        double ay = sigma_a * rng.gaussian();
        double az = kGravity + sigma_a * rng.gaussian();
        double gx = sigma_g * rng.gaussian();
        double gy = sigma_g * rng.gaussian();
        double gz = sigma_g * rng.gaussian();
        if (bursting) {
          ax += 0.5 * std::sin(2.0 * M_PI * 1.8 * t_s);
          ay += 0.3 * std::cos(2.0 * M_PI * 1.8 * t_s);
          gx += 0.4 * std::sin(2.0 * M_PI * 1.8 * t_s);
        }
        const double qax = q5(ax), qay = q5(ay), qaz = q5(az);

        int len = std::snprintf(line, sizeof(line), "%s,%lld,accel,%s,%s,%s", pid.c_str(), static_cast<long long>(ts),
                                csv::format_double(qax).c_str(), csv::format_double(qay).c_str(),
                                csv::format_double(qaz).c_str());
        out.write_line(std::string_view(line, static_cast<std::size_t>(len)));
        len = std::snprintf(line, sizeof(line), "%s,%lld,gyro,%s,%s,%s", pid.c_str(), static_cast<long long>(ts),
                            csv::format_double(q5(gx)).c_str(), csv::format_double(q5(gy)).c_str(),
                            csv::format_double(q5(gz)).c_str());
        out.write_line(std::string_view(line, static_cast<std::size_t>(len)));

        const double mag = std::sqrt(qax * qax + qay * qay + qaz * qaz);
        mag_sum[ui] += mag;
        mag_sumsq[ui] += mag * mag;
        mag_count[ui] += 1.0;

        const double dt = static_cast<double>(step_ms) / 1000.0;
        if (smooth_steps()) {
          step_accum += unit.step_rate * dt;
        } else if (bursting) {
          step_accum += 1.7 * dt;
        }

        if (ts >= next_pedometer) {
          len = std::snprintf(line, sizeof(line), "%s,%lld,pedometer,%lld,,", pid.c_str(),
                              static_cast<long long>(ts), static_cast<long long>(std::floor(step_accum)));
          out.write_line(std::string_view(line, static_cast<std::size_t>(len)));
          next_pedometer = ts + 30 * kMillisPerSecond;
        }
      }
      step_delta[unit_index(p, day, Slot::Afternoon)] = step_accum - slot_step_mark;
    }
  }
  out.close();

  for (std::size_t ui = 0; ui < units_.size(); ++ui) {
    auto& agg = aggregates_[ui];
    if (mag_count[ui] > 0) {
      const double mean = mag_sum[ui] / mag_count[ui];
      agg.accel_mag_std = std::sqrt(std::max(0.0, mag_sumsq[ui] / mag_count[ui] - mean * mean));
    }
    agg.pedometer_steps = step_delta[ui];
  }
}

void Generator::write_surveys_and_truth() {
  PlantedLabeler labeler(cfg_.signal_mode, cfg_.single_feature, cfg_.skew, aggregates_);
  Rng label_rng = substream(cfg_.seed, "labels");
  Rng noise_rng = substream(cfg_.seed, "label-noise");
  Rng factor_rng = substream(cfg_.seed, "survey-factors");

  csv::Writer surveys(out_dir_ + "/surveys.csv");
  surveys.write_line(
      "participant_id,date,slot,concentration,stress,thermal_comfort,sleep_quality,"
      "n_formal_meetings,n_informal_meetings,n_projects,preferred_seat,zone");
  csv::Writer truth(out_dir_ + "/ground_truth.csv");
  truth.write_line("participant_id,date,slot,true_label,informative_features");

  for (int p = 0; p < cfg_.n_participants; ++p) {
    const std::string pid = participant_id(p);
    for (int day = 0; day < cfg_.n_days; ++day) {
      const std::string date = format_date(date_of(day));
      const std::string zone = cfg_.zones[static_cast<std::size_t>(factor_rng.next_below(cfg_.zones.size()))];
      const bool preferred = factor_rng.next_below(2) == 1;
      const int thermal = factor_rng.uniform_int(1, 5);
      const int sleep = factor_rng.uniform_int(1, 5);
      const int formal = factor_rng.uniform_int(0, 5);
      const int informal = factor_rng.uniform_int(0, 6);
      const int projects = factor_rng.uniform_int(1, 4);

      for (const Slot slot : {Slot::Morning, Slot::Afternoon}) {
        const int true_label = labeler.label_of(unit_index(p, day, slot), label_rng);
        int reported = true_label;
        if (cfg_.label_noise > 0 && noise_rng.next_double() < cfg_.label_noise) {
          // Corrupt to one of the other four levels.
          const int shift = 1 + static_cast<int>(noise_rng.next_below(4));
          reported = 1 + (true_label - 1 + shift) % 5;
        }
        const int stress = std::clamp(6 - true_label + factor_rng.uniform_int(-1, 1), 1, 5);

        std::string row = pid;
        row += ',';
        row += date;
        row += ',';
        row += to_string(slot);
        row += ',';
        row += std::to_string(reported);
        row += ',';
        row += std::to_string(stress);
        row += ',';
        row += std::to_string(thermal);
        row += ',';
        row += std::to_string(sleep);
        row += ',';
        row += std::to_string(formal);
        row += ',';
        row += std::to_string(informal);
        row += ',';
        row += std::to_string(projects);
        row += ',';
        row += preferred ? "true" : "false";
        row += ',';
        row += zone;
        surveys.write_line(row);
        ++survey_rows_;

        std::string t = pid;
        t += ',';
        t += date;
        t += ',';
        t += to_string(slot);
        t += ',';
        t += std::to_string(true_label);
        t += ',';
        t += labeler.informative_features();
        truth.write_line(t);
      }
    }
  }
  surveys.close();
  truth.close();
}

void Generator::write_site_meta() {
  SiteMetadata meta;
  meta.site_id = cfg_.site_id;
  meta.utc_offset_minutes = cfg_.utc_offset_minutes;
  meta.physical_rate_hz = cfg_.physical_rate_hz;
  std::vector<std::string> stations;
  for (int s = 0; s < cfg_.stations_per_floor; ++s) stations.push_back(station_id(s));
  meta.stations_by_floor["floor1"] = std::move(stations);
  meta.zones = cfg_.zones;
  save_site_metadata(meta, out_dir_ + "/site.meta");
}

SynthOutput Generator::run() {
  std::filesystem::create_directories(out_dir_);
  plan_units();
  write_ambient();
  write_physical();
  write_surveys_and_truth();
  write_site_meta();
  SynthOutput out;
  out.ambient_csv = out_dir_ + "/ambient.csv";
  out.physical_csv = out_dir_ + "/physical.csv";
  out.surveys_csv = out_dir_ + "/surveys.csv";
  out.ground_truth_csv = out_dir_ + "/ground_truth.csv";
  out.site_meta = out_dir_ + "/site.meta";
  out.survey_rows = survey_rows_;
  return out;
}

}  // namespace

SynthOutput generate(const SynthConfig& config, const std::string& out_dir) {
  config.validate();
  Generator generator(config, out_dir);
  return generator.run();
}

}  // namespace concentra

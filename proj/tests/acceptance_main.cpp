// Acceptance suite: runs every criterion end to end and prints one
// pass/fail line each. Exits non-zero when any criterion fails.

#include "concentra/analytics.hpp"
#include "concentra/csv.hpp"
#include "concentra/eval.hpp"
#include "concentra/fusion.hpp"
#include "concentra/ingest.hpp"
#include "concentra/models.hpp"
#include "concentra/synthgen.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

using namespace concentra;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch_root() {
  const fs::path root = fs::temp_directory_path() / ("concentra_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  return root;
}

// ---------------------------------------------------------------------------
// corpus plumbing shared by the experiment criteria

struct Corpus {
  Repository repo;
  Dataset morning;
  SkipAudit morning_audit;
};

Corpus build_corpus(const SynthConfig& config, const fs::path& dir) {
  generate(config, dir.string());
  Corpus corpus;
  corpus.repo.set_site(load_site_metadata((dir / "site.meta").string()));
  ingest_ambient((dir / "ambient.csv").string(), corpus.repo);
  ingest_physical((dir / "physical.csv").string(), corpus.repo);
  ingest_surveys((dir / "surveys.csv").string(), corpus.repo);
  corpus.morning = build_dataset(corpus.repo, Slot::Morning, FusionConfig{}, &corpus.morning_audit);
  return corpus;
}

SynthConfig experiment_config(std::uint64_t seed, SignalMode mode) {
  SynthConfig config;
  config.n_participants = 8;
  config.n_days = 5;
  config.stations_per_floor = 4;
  config.physical_rate_hz = 5.0;
  config.label_noise = mode == SignalMode::Shuffled ? 0.0 : 0.05;
  config.signal_mode = mode;
  config.seed = seed;
  return config;
}

double run_gbm_arm(const Dataset& dataset, Arm arm, std::uint64_t seed, int importances) {
  ClassifierSpec spec = ClassifierSpec::defaults(Family::GradientBoosting, mix_seed(seed, "gbm"));
  EvalOptions options;
  options.k = 10;
  options.seed = seed;
  options.jobs = 2;
  options.top_n_importances = importances;
  return run_experiment(dataset, spec, arm, options).mean_accuracy;
}

// ---------------------------------------------------------------------------
// criterion 1: feature oracle equivalence

struct OracleStats {
  double mean, median, std, max, min, iqr, rms;
};

double oracle_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

OracleStats oracle(std::vector<double> v) {
  const double n = static_cast<double>(v.size());
  double sum = 0, sumsq = 0;
  for (const double x : v) {
    sum += x;
    sumsq += x * x;
  }
  OracleStats o{};
  o.mean = sum / n;
  double var = 0;
  for (const double x : v) var += (x - o.mean) * (x - o.mean);
  o.std = std::sqrt(var / n);
  o.rms = std::sqrt(sumsq / n);
  std::sort(v.begin(), v.end());
  o.min = v.front();
  o.max = v.back();
  o.median = oracle_quantile(v, 0.5);
  o.iqr = oracle_quantile(v, 0.75) - oracle_quantile(v, 0.25);
  return o;
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> length(1, 10'000);
  std::uniform_real_distribution<double> offset(-50, 50);
  std::uniform_real_distribution<double> width(0.5, 100);
  double worst = 0;
  bool pass = true;
  const auto check = [&](double got, double want) {
    const double err = want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
    worst = std::max(worst, err);
    if (err >= 1e-9) pass = false;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = length(rng);
    const double a = offset(rng);
    std::uniform_real_distribution<double> value(a, a + width(rng));
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = value(rng);
    const auto got =
        stats::extract_stats(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    const auto want = oracle(v);
    check(got.mean, want.mean);
    check(got.median, want.median);
    check(got.std, want.std);
    check(got.max, want.max);
    check(got.min, want.min);
    check(got.iqr, want.iqr);
    check(got.rms, want.rms);
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 10.0) pass = false;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "1000 sequences, worst rel err %.2e, %.1f s", worst, elapsed);
  report(1, pass, "feature oracle equivalence", detail);
}

// ---------------------------------------------------------------------------

void criterion_2(const Corpus& corpus) {
  bool aligned = true;
  for (const auto& inst : corpus.morning.instances) {
    if (inst.ambient.end_timestamp - (inst.end_timestamp - kBaseWindowMs) != 150'000) aligned = false;
  }
  const std::size_t morning_total = corpus.morning.instances.size() + corpus.morning_audit.records.size();

  SkipAudit pm_audit;
  const Dataset afternoon = build_dataset(corpus.repo, Slot::Afternoon, FusionConfig{}, &pm_audit);
  for (const auto& inst : afternoon.instances) {
    if (inst.ambient.end_timestamp - (inst.end_timestamp - kBaseWindowMs) != 150'000) aligned = false;
  }
  const std::size_t pm_total = afternoon.instances.size() + pm_audit.records.size();

  const bool conserved = morning_total == 8u * 5u * 30u && pm_total == 8u * 5u * 60u;
  char detail[160];
  std::snprintf(detail, sizeof(detail), "alignment %s; morning %zu/1200, afternoon %zu/2400",
                aligned ? "exact" : "BROKEN", morning_total, pm_total);
  report(2, aligned && conserved, "fusion alignment and window conservation", detail);
}

// ---------------------------------------------------------------------------

void criterion_3() {
  std::mt19937_64 rng(55);
  bool pass = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = 2 + static_cast<int>(rng() % 5);
    std::vector<int> labels;
    for (int c = 0; c < classes; ++c) {
      const int members = 1 + static_cast<int>(rng() % 60);
      for (int i = 0; i < members; ++i) labels.push_back(c + 1);
    }
    if (static_cast<int>(labels.size()) < 10) {
      while (static_cast<int>(labels.size()) < 10) labels.push_back(1);
    }
    const auto folds = stratified_folds(labels, 10, trial + 1);
    std::map<int, int> totals;
    std::map<int, std::map<int, int>> per_class_fold;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ++totals[labels[i]];
      ++per_class_fold[labels[i]][folds.fold_of[i]];
    }
    for (const auto& [label, total] : totals) {
      const double ideal = total / 10.0;
      for (int f = 0; f < 10; ++f) {
        const auto it = per_class_fold[label].find(f);
        const int count = it == per_class_fold[label].end() ? 0 : it->second;
        if (std::abs(count - ideal) > 1.0) pass = false;
      }
    }
  }
  report(3, pass, "stratification within one of proportionality", "20 random label multisets, k=10");
}

// ---------------------------------------------------------------------------

struct JointSeedResult {
  double acc_a = 0, acc_p = 0, acc_ap = 0;
  double elapsed = 0;
};

void criteria_4_and_5(const fs::path& root) {
  std::vector<JointSeedResult> results;
  double rf_ap = -1;
  Corpus first_corpus;
  bool first_kept = false;

  for (int s = 0; s < 5; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = root / ("joint_seed" + std::to_string(s));
    Corpus corpus = build_corpus(experiment_config(1000 + static_cast<std::uint64_t>(s), SignalMode::Joint), dir);
    JointSeedResult r;
    const std::uint64_t eval_seed = 5000 + static_cast<std::uint64_t>(s);
    r.acc_a = run_gbm_arm(corpus.morning, Arm::A, eval_seed, 0);
    r.acc_p = run_gbm_arm(corpus.morning, Arm::P, eval_seed, 0);
    r.acc_ap = run_gbm_arm(corpus.morning, Arm::AP, eval_seed, 0);
    r.elapsed = seconds_since(t0);
    results.push_back(r);
    std::printf("       seed %d: A %.3f  P %.3f  A+P %.3f  (%.0f s)\n", s, r.acc_a, r.acc_p, r.acc_ap, r.elapsed);
    std::fflush(stdout);

    if (s == 0) {
      criterion_2(corpus);
      ClassifierSpec rf_spec = ClassifierSpec::defaults(Family::RandomForest, mix_seed(eval_seed, "rf"));
      EvalOptions options;
      options.k = 10;
      options.seed = eval_seed;
      options.jobs = 2;
      options.top_n_importances = 0;
      rf_ap = run_experiment(corpus.morning, rf_spec, Arm::AP, options).mean_accuracy;
      first_corpus = std::move(corpus);
      first_kept = true;
    }
    fs::remove_all(dir);
  }

  int superior = 0;
  bool runtime_ok = true;
  for (const auto& r : results) {
    if (r.acc_ap >= r.acc_a + 0.10 && r.acc_ap >= r.acc_p + 0.10) ++superior;
    if (r.elapsed > 120.0) runtime_ok = false;
  }
  {
    char detail[160];
    std::snprintf(detail, sizeof(detail), "A+P superior in %d/5 seeds, all per-seed runtimes %s 2 min", superior,
                  runtime_ok ? "within" : "OVER");
    report(4, superior >= 4 && runtime_ok, "ambient-physical superiority", detail);
  }

  // Criterion 5: recovery on the first joint corpus plus chance level on
  // shuffled corpora.
  const double gbm_ap = results.empty() ? 0.0 : results.front().acc_ap;
  bool shuffled_ok = true;
  std::string shuffled_accs;
  for (int s = 0; s < 5; ++s) {
    const fs::path dir = root / ("shuffled_seed" + std::to_string(s));
    Corpus corpus = build_corpus(experiment_config(2000 + static_cast<std::uint64_t>(s), SignalMode::Shuffled), dir);
    const double acc = run_gbm_arm(corpus.morning, Arm::AP, 6000 + static_cast<std::uint64_t>(s), 0);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%.3f", s > 0 ? "," : "", acc);
    shuffled_accs += buf;
    if (acc < 0.10 || acc > 0.30) shuffled_ok = false;
    fs::remove_all(dir);
  }
  char detail[200];
  std::snprintf(detail, sizeof(detail), "GBM A+P %.3f, RF A+P %.3f (need >= 0.90); shuffled accs [%s] in [0.10,0.30]",
                gbm_ap, rf_ap, shuffled_accs.c_str());
  report(5, first_kept && gbm_ap >= 0.90 && rf_ap >= 0.90 && shuffled_ok, "signal recovery and chance level", detail);
}

// ---------------------------------------------------------------------------

void criterion_6(const fs::path& root) {
  int gbm_hits = 0, rf_hits = 0;
  std::string details;
  for (int s = 0; s < 5; ++s) {
    const fs::path dir = root / ("planted_seed" + std::to_string(s));
    Corpus corpus =
        build_corpus(experiment_config(3000 + static_cast<std::uint64_t>(s), SignalMode::SingleFeature), dir);
    const Matrix X = select_arm(corpus.morning, Arm::AP);
    const IntVector y = label_vector(corpus.morning);
    const auto manifest = arm_manifest(corpus.morning.manifest, Arm::AP);

    const auto check = [&](Family family, std::uint64_t seed) {
      ClassifierSpec spec = ClassifierSpec::defaults(family, seed);
      const auto model = fit(X, y, manifest, spec);
      const auto importance = model->feature_importance();
      return !importance.empty() && importance.front().first == "pedometer_steps" &&
             importance.front().second >= 0.5;
    };
    const bool gbm = check(Family::GradientBoosting, 71 + static_cast<std::uint64_t>(s));
    const bool rf = check(Family::RandomForest, 81 + static_cast<std::uint64_t>(s));
    gbm_hits += gbm ? 1 : 0;
    rf_hits += rf ? 1 : 0;
    fs::remove_all(dir);
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "pedometer_steps ranked #1 with weight >= 0.5: gbm %d/5, rf %d/5", gbm_hits,
                rf_hits);
  report(6, gbm_hits >= 4 && rf_hits >= 4, "planted-feature importance recovery", detail);
}

// ---------------------------------------------------------------------------

void criterion_7() {
  Rng rng(404);
  bool pass = true;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(30));
    const int d = 2 + static_cast<int>(rng.next_below(5));
    const int K = 2 + static_cast<int>(rng.next_below(3));
    Matrix X(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-2, 2);
    }
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (auto& c : ids) c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(K)));
    const LogisticObjective obj{X, ids, K, 1e-4};
    Matrix W(K, d);
    for (int c = 0; c < K; ++c) {
      for (int j = 0; j < d; ++j) W(c, j) = rng.uniform(-0.7, 0.7);
    }
    Vector b(K);
    for (int c = 0; c < K; ++c) b(c) = rng.uniform(-0.5, 0.5);

    Matrix gw(K, d);
    Vector gb(K);
    obj.gradient(W, b, gw, gb);
    const double eps = 1e-5;
    const auto check = [&](double analytic, double fd) {
      const double err = std::abs(analytic - fd) / std::max({1e-6, std::abs(fd), std::abs(analytic)});
      worst = std::max(worst, err);
      if (err > 1e-4) pass = false;
    };
    for (int c = 0; c < K; ++c) {
      for (int j = 0; j < d; ++j) {
        Matrix Wp = W, Wm = W;
        Wp(c, j) += eps;
        Wm(c, j) -= eps;
        check(gw(c, j), (obj.loss(Wp, b) - obj.loss(Wm, b)) / (2 * eps));
      }
      Vector bp = b, bm = b;
      bp(c) += eps;
      bm(c) -= eps;
      check(gb(c), (obj.loss(W, bp) - obj.loss(W, bm)) / (2 * eps));
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "20 random problems, worst rel err %.2e", worst);
  report(7, pass, "logistic analytic gradient vs central differences", detail);
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONCENTRA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_8(const fs::path& root) {
  bool pass = true;
  std::string failure;
  std::vector<fs::path> out_dirs;
  for (int run = 0; run < 2; ++run) {
    const fs::path base = root / ("determinism_run" + std::to_string(run));
    const fs::path data = base / "data";
    const fs::path out = base / "out";
    out_dirs.push_back(out);
    const std::string synth =
        "synth --participants 3 --days 2 --stations 2 --rate 2 --label-noise 0.1 --seed 77 --out " + data.string();
    if (run_cli(synth) != 0 ||
        run_cli("fuse --data " + data.string() + " --slot both --out " + out.string()) != 0 ||
        run_cli("evaluate --in " + out.string() + " --site site1 --slot both --k 10 --seed 13 --jobs 2 --out " +
                out.string()) != 0 ||
        run_cli("analyze --data " + data.string() + " --participant p01 --out " + out.string()) != 0) {
      pass = false;
      failure = "pipeline command failed";
    }
  }
  std::size_t compared = 0;
  if (pass) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(out_dirs[0])) {
      if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), out_dirs[0]));
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      pass = false;
      failure = "no artifacts produced";
    }
    for (const auto& rel : files) {
      ++compared;
      if (slurp(out_dirs[0] / rel) != slurp(out_dirs[1] / rel)) {
        pass = false;
        failure = "differs: " + rel.string();
        break;
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail), "%zu artifact files byte-compared%s%s", compared,
                failure.empty() ? "" : "; ", failure.c_str());
  report(8, pass, "full-pipeline byte determinism", detail);
}

// ---------------------------------------------------------------------------

void criterion_9(const fs::path& root) {
  bool pass = true;
  std::string note;

  Vector x(6);
  x << 1, 4, 2, 8, 5, 7;
  double r = 0;
  if (!stats::pearson(x, x, r) || std::abs(r - 1.0) > 1e-12) pass = false;
  if (!stats::pearson(x, (-x).eval(), r) || std::abs(r + 1.0) > 1e-12) pass = false;

  const fs::path dir = root / "analytics";
  SynthConfig config;
  config.n_participants = 5;
  config.n_days = 6;
  config.stations_per_floor = 1;
  config.physical_rate_hz = 1.0;
  config.seed = 31;
  generate(config, dir.string());
  Repository repo;
  ingest_surveys((dir / "surveys.csv").string(), repo);
  const auto surveys = repo.surveys();

  for (const Slot slot : {Slot::Morning, Slot::Afternoon}) {
    SurveyFilter filter;
    filter.slot = slot;
    const auto matrix = correlation_matrix(surveys, filter);
    for (std::size_t i = 0; i < matrix.variables.size(); ++i) {
      for (std::size_t j = 0; j < matrix.variables.size(); ++j) {
        if (matrix.defined[i][j] != matrix.defined[j][i]) pass = false;
        if (matrix.defined[i][j] &&
            std::abs(matrix.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                     matrix.r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) > 1e-12) {
          pass = false;
        }
      }
      if (matrix.defined[i][i] &&
          std::abs(matrix.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - 1.0) > 1e-12) {
        pass = false;
      }
    }
  }

  const auto groups = group_summary(surveys, "preferred_seat", SurveyFilter{});
  int counted = 0, with_key = 0;
  for (const auto& row : groups.rows) {
    if (row.measure == "concentration") counted += row.n;
  }
  for (const auto* s : surveys) {
    if (s->preferred_seat) ++with_key;
  }
  if (counted != with_key) pass = false;
  fs::remove_all(dir);
  char detail[128];
  std::snprintf(detail, sizeof(detail), "pearson identities, matrix symmetry/diagonal, group counts %d/%d", counted,
                with_key);
  report(9, pass, "analytics sanity", detail);
}

// ---------------------------------------------------------------------------

void criterion_10() {
  bool pass = true;
  IntVector pred(10), truth(10);
  for (int i = 0; i < 10; ++i) {
    truth(i) = 1;
    pred(i) = i < 8 ? 1 : 2;
  }
  if (accuracy(pred, truth) != 0.8) pass = false;
  if (accuracy(truth, truth) != 1.0) pass = false;
  IntVector disjoint = IntVector::Constant(10, 9);
  if (accuracy(disjoint, truth) != 0.0) pass = false;
  IntVector p5(5), t5(5);
  p5 << 1, 2, 3, 4, 5;
  t5 << 1, 2, 0, 4, 0;
  if (accuracy(p5, t5) != 0.6) pass = false;
  report(10, pass, "accuracy metric equals hand-computed fractions", "8/10 = 0.8 exact and friends");
}

}  // namespace

int main() {
  const fs::path root = scratch_root();
  std::printf("acceptance scratch: %s\n", root.c_str());

  criterion_1();
  criterion_3();
  criterion_7();
  criterion_10();
  criterion_9(root);
  criteria_4_and_5(root);  // also runs criterion 2 on the first joint corpus
  criterion_6(root);
  criterion_8(root);

  std::error_code ec;
  fs::remove_all(root, ec);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

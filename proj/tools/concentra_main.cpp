#include "concentra/analytics.hpp"
#include "concentra/csv.hpp"
#include "concentra/eval.hpp"
#include "concentra/fusion.hpp"
#include "concentra/ingest.hpp"
#include "concentra/synthgen.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

namespace {

using namespace concentra;

struct DataPaths {
  std::string dir = "data";
  std::string ambient, physical, surveys, site_meta;

  std::string resolve(const std::string& explicit_path, const char* name) const {
    return explicit_path.empty() ? dir + "/" + name : explicit_path;
  }
};

void add_data_options(CLI::App* cmd, DataPaths& paths) {
  cmd->add_option("--data", paths.dir, "Repository directory")->envname("CONCENTRA_DATA_DIR");
  cmd->add_option("--ambient", paths.ambient, "Ambient CSV (default <data>/ambient.csv)");
  cmd->add_option("--physical", paths.physical, "Physical CSV (default <data>/physical.csv)");
  cmd->add_option("--surveys", paths.surveys, "Survey CSV (default <data>/surveys.csv)");
  cmd->add_option("--site-meta", paths.site_meta, "Site metadata file (default <data>/site.meta)");
}

Repository load_repository(const DataPaths& paths, bool verbose) {
  Repository repo;
  repo.set_site(load_site_metadata(paths.resolve(paths.site_meta, "site.meta")));
  const auto a = ingest_ambient(paths.resolve(paths.ambient, "ambient.csv"), repo);
  const auto p = ingest_physical(paths.resolve(paths.physical, "physical.csv"), repo);
  const auto s = ingest_surveys(paths.resolve(paths.surveys, "surveys.csv"), repo);
  if (verbose) {
    std::cout << "ambient:  " << describe(a) << "\n";
    std::cout << "physical: " << describe(p) << "\n";
    std::cout << "surveys:  " << describe(s) << "\n";
  }
  return repo;
}

std::vector<Slot> parse_slots(const std::string& token) {
  if (token == "both") return {Slot::Morning, Slot::Afternoon};
  Slot slot;
  if (!parse_slot(token, slot)) throw ParameterError("unknown slot: " + token);
  return {slot};
}

std::string prefix_for(const std::string& site, Slot slot) { return site + "_" + to_string(slot); }

void write_text_file(const std::string& path, const std::string& content) {
  csv::Writer out(path);
  out.write(content);
  out.close();
}

// ---------------------------------------------------------------------------
// evaluate / report artifact emission

struct RunRecord {
  Family family;
  Arm arm;
  std::vector<FoldResult> folds;
};

void write_runs_csv(const std::string& path, const std::vector<ExperimentReport>& reports) {
  std::string out = "family,arm,fold,status,n_test,accuracy\n";
  for (const auto& report : reports) {
    for (const auto& fold : report.folds) {
      out += to_string(report.family);
      out += ',';
      out += to_string(report.arm);
      out += ',';
      out += std::to_string(fold.fold);
      out += ',';
      out += fold.failed ? "failed" : "ok";
      out += ',';
      out += std::to_string(fold.n_test);
      out += ',';
      out += csv::format_double(fold.accuracy);
      out += '\n';
    }
  }
  write_text_file(path, out);
}

std::vector<ExperimentReport> read_runs_csv(const std::string& path, const std::string& site, Slot slot) {
  csv::Reader reader(path);
  std::string_view line;
  if (!reader.next_line(line)) throw DataError("runs csv: empty file");
  std::map<std::pair<int, int>, ExperimentReport> cells;
  while (reader.next_line(line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 6) throw DataError("runs csv: bad row");
    Family family;
    Arm arm;
    if (!parse_family(std::string(fields[0]), family) || !parse_arm(std::string(fields[1]), arm)) {
      throw DataError("runs csv: bad family/arm");
    }
    FoldResult fold;
    double acc = 0;
    if (!csv::parse_int(fields[2], fold.fold) || !csv::parse_int(fields[4], fold.n_test) ||
        !csv::parse_double(fields[5], acc)) {
      throw DataError("runs csv: bad fold fields");
    }
    fold.failed = fields[3] == "failed";
    fold.accuracy = acc;
    auto& report = cells[{static_cast<int>(family), static_cast<int>(arm)}];
    report.site = site;
    report.slot = slot;
    report.family = family;
    report.arm = arm;
    report.folds.push_back(fold);
  }
  std::vector<ExperimentReport> reports;
  for (auto& [key, report] : cells) {
    double total = 0;
    int ok = 0;
    for (const auto& fold : report.folds) {
      if (!fold.failed) {
        total += fold.accuracy;
        ++ok;
      }
    }
    report.mean_accuracy = ok > 0 ? total / ok : 0.0;
    reports.push_back(std::move(report));
  }
  return reports;
}

void write_importance_csv(const std::string& path, const std::vector<ExperimentReport>& reports) {
  std::string out = "family,arm,rank,feature,weight\n";
  for (const auto& report : reports) {
    int rank = 1;
    for (const auto& [feature, weight] : report.top_importances) {
      out += to_string(report.family);
      out += ',';
      out += to_string(report.arm);
      out += ',';
      out += std::to_string(rank++);
      out += ',';
      out += feature;
      out += ',';
      out += csv::format_double(weight);
      out += '\n';
    }
  }
  write_text_file(path, out);
}

void write_confusion_csv(const std::string& path, const std::vector<ExperimentReport>& reports) {
  std::string out = "family,arm,truth,predicted,count\n";
  for (const auto& report : reports) {
    for (Eigen::Index i = 0; i < report.confusion.rows(); ++i) {
      for (Eigen::Index j = 0; j < report.confusion.cols(); ++j) {
        out += to_string(report.family);
        out += ',';
        out += to_string(report.arm);
        out += ',';
        out += std::to_string(report.class_set[static_cast<std::size_t>(i)]);
        out += ',';
        out += std::to_string(report.class_set[static_cast<std::size_t>(j)]);
        out += ',';
        out += std::to_string(report.confusion(i, j));
        out += '\n';
      }
    }
  }
  write_text_file(path, out);
}

void write_run_manifest(const std::string& path, const Dataset& dataset, const std::vector<Family>& families,
                        const std::vector<Arm>& arms, int k, std::uint64_t seed,
                        const std::map<std::string, std::map<std::string, double>>& hyper_overrides) {
  std::string out;
  out += "site=" + dataset.site + "\n";
  out += "slot=" + std::string(to_string(dataset.slot)) + "\n";
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(dataset.manifest.schema_hash()));
  out += "schema_hash=" + std::string(hash) + "\n";
  out += "instances=" + std::to_string(dataset.instances.size()) + "\n";
  out += "k=" + std::to_string(k) + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  out += "families=";
  for (std::size_t i = 0; i < families.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(families[i]);
  }
  out += "\narms=";
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(arms[i]);
  }
  out += '\n';
  for (const auto& [family, kv] : hyper_overrides) {
    for (const auto& [key, value] : kv) {
      out += "hyper." + family + "." + key + "=" + csv::format_double(value) + "\n";
    }
  }

  // Class distribution and per-fold participant audit.
  std::map<int, int> class_counts;
  std::vector<int> labels;
  for (const auto& inst : dataset.instances) {
    ++class_counts[inst.label];
    labels.push_back(inst.label);
  }
  for (const auto& [label, count] : class_counts) {
    out += "class_" + std::to_string(label) + "=" + std::to_string(count) + "\n";
  }
  const FoldAssignment folds = stratified_folds(labels, k, seed);
  std::map<int, std::map<std::string, int>> fold_participants;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    ++fold_participants[folds.fold_of[i]][dataset.instances[i].participant];
  }
  for (const auto& [fold, participants] : fold_participants) {
    out += "fold" + std::to_string(fold) + "=";
    bool first = true;
    for (const auto& [participant, count] : participants) {
      if (!first) out += ' ';
      first = false;
      out += participant + ":" + std::to_string(count);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_synth(const SynthConfig& config, const std::string& out_dir) {
  const SynthOutput out = generate(config, out_dir);
  std::cout << "wrote " << out.ambient_csv << ", " << out.physical_csv << ", " << out.surveys_csv << ", "
            << out.ground_truth_csv << ", " << out.site_meta << " (" << out.survey_rows << " survey rows)\n";
  return 0;
}

int cmd_ingest(const DataPaths& paths) {
  const Repository repo = load_repository(paths, true);
  std::cout << "repository: " << repo.stream_count() << " streams, " << repo.reading_count() << " readings, "
            << repo.survey_count() << " surveys\n";
  return 0;
}

int cmd_fuse(const DataPaths& paths, const std::string& site, const std::string& slot_token, double rate,
             const std::string& out_dir) {
  const Repository repo = load_repository(paths, false);
  if (!site.empty() && site != repo.site().site_id) {
    throw DataError("fuse: repository holds site '" + repo.site().site_id + "', not '" + site + "'");
  }
  FusionConfig config;
  config.physical_rate_hz = rate;
  for (const Slot slot : parse_slots(slot_token)) {
    SkipAudit audit;
    const Dataset dataset = build_dataset(repo, slot, config, &audit);
    const std::string prefix = prefix_for(dataset.site, slot);
    export_dataset(dataset, audit, out_dir, prefix);
    std::cout << prefix << ": " << dataset.instances.size() << " instances, " << audit.records.size()
              << " skips (no-survey " << audit.count(SkipReason::NoSurvey) << ", physical "
              << audit.count(SkipReason::CoverageFailPhysical) << ", ambient "
              << audit.count(SkipReason::CoverageFailAmbient) << ")\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& in_dir, const std::string& site, const std::string& slot_token,
                 const std::vector<std::string>& family_tokens, const std::vector<std::string>& arm_tokens, int k,
                 std::uint64_t seed, int jobs,
                 const std::map<std::string, std::map<std::string, double>>& hyper_overrides,
                 const std::string& out_dir) {
  std::vector<Family> families;
  for (const auto& token : family_tokens) {
    Family family;
    if (!parse_family(token, family)) throw ParameterError("unknown family: " + token);
    families.push_back(family);
  }
  std::vector<Arm> arms;
  for (const auto& token : arm_tokens) {
    Arm arm;
    if (!parse_arm(token, arm)) throw ParameterError("unknown arm: " + token);
    arms.push_back(arm);
  }

  for (const Slot slot : parse_slots(slot_token)) {
    const std::string prefix = prefix_for(site, slot);
    const Dataset dataset = import_dataset(in_dir, prefix);

    std::vector<ExperimentReport> reports;
    for (const Family family : families) {
      ClassifierSpec spec = ClassifierSpec::defaults(family);
      const auto it = hyper_overrides.find(to_string(family));
      if (it != hyper_overrides.end()) {
        for (const auto& [key, value] : it->second) spec.set(key, value);
      }
      spec.seed = mix_seed(seed, to_string(family));
      for (const Arm arm : arms) {
        EvalOptions options;
        options.k = k;
        options.seed = seed;
        options.jobs = jobs;
        reports.push_back(run_experiment(dataset, spec, arm, options));
        const auto& report = reports.back();
        std::printf("%s %-20s %-4s mean accuracy %.4f\n", prefix.c_str(), to_string(report.family),
                    to_string(report.arm), report.mean_accuracy);
      }
    }

    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + prefix;
    const ResultMatrix matrix = report_matrix(reports);
    write_text_file(base + "_results.csv", format_result_csv(matrix));
    write_text_file(base + "_results.txt", format_result_text(matrix));
    write_runs_csv(base + "_runs.csv", reports);
    write_importance_csv(base + "_importance.csv", reports);
    write_confusion_csv(base + "_confusion.csv", reports);
    write_run_manifest(base + "_run_manifest.txt", dataset, families, arms, k, seed, hyper_overrides);
  }
  return 0;
}

int cmd_analyze(const DataPaths& paths, const std::string& participant, const std::string& out_dir) {
  Repository repo;
  const auto summary = ingest_surveys(paths.resolve(paths.surveys, "surveys.csv"), repo);
  if (summary.rows_accepted == 0) throw DataError("analyze: no valid survey rows");
  const auto surveys = repo.surveys();
  std::filesystem::create_directories(out_dir);

  std::vector<SurveyFilter> panels;
  panels.push_back({Slot::Morning, std::nullopt, std::nullopt});
  panels.push_back({Slot::Morning, true, std::nullopt});
  panels.push_back({Slot::Morning, false, std::nullopt});
  panels.push_back({Slot::Afternoon, std::nullopt, std::nullopt});
  if (!participant.empty()) {
    panels.push_back({Slot::Morning, std::nullopt, participant});
    panels.push_back({Slot::Afternoon, std::nullopt, participant});
  }
  for (const auto& filter : panels) {
    try {
      const CorrelationMatrix matrix = correlation_matrix(surveys, filter);
      write_text_file(out_dir + "/correlation_" + matrix.filter_desc + ".csv", format_correlation_csv(matrix));
    } catch (const DataError& e) {
      std::cerr << "skipping panel " << filter.describe() << ": " << e.what() << "\n";
    }
  }

  const SurveyFilter all;
  for (const std::string key : {"preferred_seat", "n_formal_meetings", "n_informal_meetings", "zone", "slot"}) {
    try {
      const GroupSummary summary_all = group_summary(surveys, key, all);
      write_text_file(out_dir + "/groups_" + key + ".csv", format_group_csv(summary_all));
    } catch (const DataError& e) {
      std::cerr << "skipping groups_" << key << ": " << e.what() << "\n";
    }
  }
  // Zone split by slot mirrors the per-slot seating-zone summaries.
  for (const Slot slot : {Slot::Morning, Slot::Afternoon}) {
    SurveyFilter filter;
    filter.slot = slot;
    try {
      const GroupSummary zones = group_summary(surveys, "zone", filter);
      write_text_file(out_dir + "/groups_zone_" + std::string(to_string(slot)) + ".csv", format_group_csv(zones));
    } catch (const DataError&) {
      // zone column absent; the unfiltered attempt already reported it
    }
  }
  std::cout << "analytics written to " << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& site, const std::string& slot_token,
               const std::string& out_dir) {
  for (const Slot slot : parse_slots(slot_token)) {
    const std::string prefix = prefix_for(site, slot);
    const auto reports = read_runs_csv(in_dir + "/" + prefix + "_runs.csv", site, slot);
    const ResultMatrix matrix = report_matrix(reports);
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/" + prefix + "_results.csv", format_result_csv(matrix));
    write_text_file(out_dir + "/" + prefix + "_results.txt", format_result_text(matrix));
    std::cout << format_result_text(matrix);
  }
  return 0;
}

std::map<std::string, std::map<std::string, double>> parse_hyper_overrides(const std::vector<std::string>& items) {
  // Each item: family.key=value
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    const auto dot = item.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw CLI::ValidationError("--hyper expects family.key=value, got '" + item + "'");
    }
    double value = 0;
    if (!csv::parse_double(std::string_view(item).substr(eq + 1), value)) {
      throw CLI::ValidationError("--hyper: bad value in '" + item + "'");
    }
    out[item.substr(0, dot)][item.substr(dot + 1, eq - dot - 1)] = value;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ambient-physical concentration inference pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; flags override file values");
  app.failure_message(CLI::FailureMessage::simple);

  // synth ------------------------------------------------------------------
  SynthConfig synth_config;
  std::string synth_out = "data";
  std::string synth_mode = "joint";
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth->add_option("--participants", synth_config.n_participants, "Participant count")->check(CLI::PositiveNumber);
  synth->add_option("--days", synth_config.n_days, "Weekday count")->check(CLI::PositiveNumber);
  synth->add_option("--stations", synth_config.stations_per_floor, "Stations per floor")->check(CLI::PositiveNumber);
  synth->add_option("--rate", synth_config.physical_rate_hz, "Device sample rate in Hz (default 5)");
  synth->add_option("--label-noise", synth_config.label_noise, "Label corruption fraction in [0, 0.5)");
  synth->add_option("--skew", synth_config.skew, "Class imbalance knob (0 = balanced)");
  synth->add_option("--mode", synth_mode, "joint|ambient_only|physical_only|single_feature|shuffled");
  synth->add_option("--single-feature", synth_config.single_feature, "Planted feature for single_feature mode");
  synth->add_option("--seed", synth_config.seed, "Master seed");
  synth->add_option("--site-id", synth_config.site_id, "Site identifier");
  synth->add_option("--tz-offset-min", synth_config.utc_offset_minutes, "Site UTC offset in minutes");
  synth->add_option("--out", synth_out, "Output directory")->envname("CONCENTRA_DATA_DIR");

  // ingest -----------------------------------------------------------------
  DataPaths ingest_paths;
  auto* ingest = app.add_subcommand("ingest", "Validate and summarize repository files");
  add_data_options(ingest, ingest_paths);

  // fuse -------------------------------------------------------------------
  DataPaths fuse_paths;
  std::string fuse_site, fuse_slot = "both", fuse_out = "out";
  double fuse_rate = 0;
  auto* fuse = app.add_subcommand("fuse", "Build labeled datasets (fusion + label attachment)");
  add_data_options(fuse, fuse_paths);
  fuse->add_option("--site", fuse_site, "Expected site id (validated against site metadata)");
  fuse->add_option("--slot", fuse_slot, "morning|afternoon|both");
  fuse->add_option("--rate", fuse_rate, "Override nominal device rate in Hz");
  fuse->add_option("--out", fuse_out, "Artifact directory");

  // evaluate ----------------------------------------------------------------
  std::string eval_in = "out", eval_site = "site1", eval_slot, eval_out = "out";
  std::vector<std::string> eval_families;
  for (const Family f : kFamilyOrder) eval_families.push_back(to_string(f));
  std::vector<std::string> eval_arms = {"A", "P", "A+P"};
  std::vector<std::string> eval_hyper;
  int eval_k = 10;
  std::uint64_t eval_seed = 1;
  int eval_jobs = static_cast<int>(std::thread::hardware_concurrency());
  auto* evaluate = app.add_subcommand("evaluate", "Run the (classifier x arm) experiment grid");
  evaluate->add_option("--in", eval_in, "Directory holding fused datasets");
  evaluate->add_option("--site", eval_site, "Site id");
  evaluate->add_option("--slot", eval_slot, "morning|afternoon|both")->required();
  evaluate->add_option("--families", eval_families, "Classifier families")->delimiter(',');
  evaluate->add_option("--arms", eval_arms, "Feature arms (A,P,A+P)")->delimiter(',');
  evaluate->add_option("--k", eval_k, "Folds")->check(CLI::Range(2, 1000));
  evaluate->add_option("--seed", eval_seed, "Master seed");
  evaluate->add_option("--jobs", eval_jobs, "Worker threads (wall clock only, never output)");
  evaluate->add_option("--hyper", eval_hyper, "Hyperparameter override family.key=value")->delimiter(';');
  evaluate->add_option("--out", eval_out, "Artifact directory");

  // analyze -----------------------------------------------------------------
  DataPaths analyze_paths;
  std::string analyze_participant, analyze_out = "out";
  auto* analyze = app.add_subcommand("analyze", "Survey-factor correlation and group summaries");
  add_data_options(analyze, analyze_paths);
  analyze->add_option("--participant", analyze_participant, "Add per-participant correlation panels");
  analyze->add_option("--out", analyze_out, "Artifact directory");

  // report ------------------------------------------------------------------
  std::string report_in = "out", report_site = "site1", report_slot, report_out = "out";
  auto* report = app.add_subcommand("report", "Re-render result tables from raw fold records");
  report->add_option("--in", report_in, "Directory holding runs csv");
  report->add_option("--site", report_site, "Site id");
  report->add_option("--slot", report_slot, "morning|afternoon|both")->required();
  report->add_option("--out", report_out, "Artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" || e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      if (!parse_signal_mode(synth_mode, synth_config.signal_mode)) {
        throw ParameterError("unknown signal mode: " + synth_mode);
      }
      return cmd_synth(synth_config, synth_out);
    }
    if (ingest->parsed()) return cmd_ingest(ingest_paths);
    if (fuse->parsed()) return cmd_fuse(fuse_paths, fuse_site, fuse_slot, fuse_rate, fuse_out);
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_in, eval_site, eval_slot, eval_families, eval_arms, eval_k, eval_seed,
                          std::max(1, eval_jobs), parse_hyper_overrides(eval_hyper), eval_out);
    }
    if (analyze->parsed()) return cmd_analyze(analyze_paths, analyze_participant, analyze_out);
    if (report->parsed()) return cmd_report(report_in, report_site, report_slot, report_out);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

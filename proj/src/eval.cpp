#include "concentra/eval.hpp"

#include "concentra/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace concentra {

const char* to_string(Arm arm) {
  switch (arm) {
    case Arm::A: return "A";
    case Arm::P: return "P";
    default: return "A+P";
  }
}

bool parse_arm(const std::string& token, Arm& out) {
  if (token == "A") {
    out = Arm::A;
    return true;
  }
  if (token == "P") {
    out = Arm::P;
    return true;
  }
  if (token == "A+P" || token == "AP") {
    out = Arm::AP;
    return true;
  }
  return false;
}

FoldAssignment stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("stratified_folds: k must be >= 2");
  const int n = static_cast<int>(labels.size());
  if (k > n) throw ParameterError("stratified_folds: k exceeds the number of instances");

  std::map<int, std::vector<int>> by_class;
  for (int i = 0; i < n; ++i) by_class[labels[static_cast<std::size_t>(i)]].push_back(i);

  FoldAssignment assignment;
  assignment.k = k;
  assignment.seed = seed;
  assignment.fold_of.assign(static_cast<std::size_t>(n), -1);

  Rng rng = substream(seed, "stratified-folds");
  // A running cursor across classes keeps overall fold sizes within 1.
  int cursor = 0;
  for (auto& [label, members] : by_class) {
    if (static_cast<int>(members.size()) < k) assignment.small_classes.push_back(label);
    rng.shuffle(members);
    for (const int i : members) {
      assignment.fold_of[static_cast<std::size_t>(i)] = cursor;
      cursor = (cursor + 1) % k;
    }
  }
  return assignment;
}

double accuracy(const IntVector& predicted, const IntVector& truth) {
  if (predicted.size() != truth.size()) throw ContractError("accuracy: length mismatch");
  if (predicted.size() == 0) throw ContractError("accuracy: empty input");
  const auto correct = (predicted.array() == truth.array()).count();
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::vector<std::string> arm_manifest(const FeatureManifest& manifest, Arm arm) {
  switch (arm) {
    case Arm::A: return manifest.ambient;
    case Arm::P: return manifest.physical;
    default: return manifest.all();
  }
}

Matrix select_arm(const Dataset& dataset, Arm arm) {
  if (dataset.instances.empty()) throw ContractError("select_arm: empty dataset");
  const Matrix X = feature_matrix(dataset);
  const auto da = static_cast<Eigen::Index>(dataset.manifest.ambient.size());
  const auto dp = static_cast<Eigen::Index>(dataset.manifest.physical.size());
  switch (arm) {
    case Arm::A: return X.leftCols(da);
    case Arm::P: return X.rightCols(dp);
    default: return X;
  }
}

namespace {

void run_parallel(int n_items, int jobs, const std::function<void(int)>& work) {
  jobs = std::max(1, std::min(jobs, n_items));
  if (jobs == 1) {
    for (int i = 0; i < n_items; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n_items) return;
        work(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ExperimentReport run_experiment(const Dataset& dataset, const ClassifierSpec& spec, Arm arm,
                                const EvalOptions& options) {
  const int n = static_cast<int>(dataset.instances.size());
  if (n < options.k) throw ParameterError("run_experiment: dataset smaller than k");

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = dataset.instances[static_cast<std::size_t>(i)].label;
  const std::set<int> class_set(labels.begin(), labels.end());
  if (class_set.size() < 2) throw ParameterError("run_experiment: dataset has fewer than 2 classes");

  const Matrix X = select_arm(dataset, arm);
  const std::vector<std::string> manifest = arm_manifest(dataset.manifest, arm);
  const FoldAssignment folds = stratified_folds(labels, options.k, options.seed);

  ExperimentReport report;
  report.site = dataset.site;
  report.slot = dataset.slot;
  report.family = spec.family;
  report.arm = arm;
  report.seed = options.seed;
  report.class_set.assign(class_set.begin(), class_set.end());
  report.small_classes = folds.small_classes;
  report.data_start = dataset.instances.front().end_timestamp;
  report.data_end = dataset.instances.back().end_timestamp;
  for (const auto& inst : dataset.instances) {
    report.data_start = std::min(report.data_start, inst.end_timestamp);
    report.data_end = std::max(report.data_end, inst.end_timestamp);
  }

  const int K = static_cast<int>(report.class_set.size());
  report.confusion = Eigen::MatrixXi::Zero(K, K);
  const auto class_index = [&](int label) {
    return static_cast<int>(std::lower_bound(report.class_set.begin(), report.class_set.end(), label) -
                            report.class_set.begin());
  };

  report.folds.resize(static_cast<std::size_t>(options.k));
  std::vector<Eigen::MatrixXi> fold_confusion(static_cast<std::size_t>(options.k), Eigen::MatrixXi::Zero(K, K));

  run_parallel(options.k, options.jobs, [&](int f) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < n; ++i) {
      (folds.fold_of[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
    }
    FoldResult result;
    result.fold = f;
    result.n_test = static_cast<int>(test_rows.size());

    Matrix train_x(static_cast<Eigen::Index>(train_rows.size()), X.cols());
    IntVector train_y(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      train_x.row(static_cast<Eigen::Index>(i)) = X.row(train_rows[i]);
      train_y(static_cast<Eigen::Index>(i)) = labels[static_cast<std::size_t>(train_rows[i])];
    }
    Matrix test_x(static_cast<Eigen::Index>(test_rows.size()), X.cols());
    IntVector test_y(static_cast<Eigen::Index>(test_rows.size()));
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      test_x.row(static_cast<Eigen::Index>(i)) = X.row(test_rows[i]);
      test_y(static_cast<Eigen::Index>(i)) = labels[static_cast<std::size_t>(test_rows[i])];
    }

    ClassifierSpec fold_spec = spec;
    fold_spec.seed = mix_seed(spec.seed, "fold", static_cast<std::uint64_t>(f));
    try {
      const auto model = fit(train_x, train_y, manifest, fold_spec);
      const IntVector pred = model->predict(test_x, manifest);
      result.accuracy = accuracy(pred, test_y);
      auto& confusion = fold_confusion[static_cast<std::size_t>(f)];
      for (Eigen::Index i = 0; i < pred.size(); ++i) {
        confusion(class_index(test_y(i)), class_index(pred(i))) += 1;
      }
    } catch (const DegenerateFitError&) {
      result.failed = true;
    }
    report.folds[static_cast<std::size_t>(f)] = result;
  });

  double total = 0;
  int ok = 0;
  for (int f = 0; f < options.k; ++f) {
    report.confusion += fold_confusion[static_cast<std::size_t>(f)];
    if (!report.folds[static_cast<std::size_t>(f)].failed) {
      total += report.folds[static_cast<std::size_t>(f)].accuracy;
      ++ok;
    }
  }
  report.mean_accuracy = ok > 0 ? total / ok : 0.0;

  const bool tree_family = spec.family == Family::DecisionTree || spec.family == Family::RandomForest ||
                           spec.family == Family::GradientBoosting;
  if (tree_family && options.top_n_importances > 0) {
    IntVector y(n);
    for (int i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];
    ClassifierSpec full_spec = spec;
    full_spec.seed = mix_seed(spec.seed, "full-fit");
    const auto model = fit(X, y, manifest, full_spec);
    auto importances = model->feature_importance();
    if (static_cast<int>(importances.size()) > options.top_n_importances) {
      importances.resize(static_cast<std::size_t>(options.top_n_importances));
    }
    report.top_importances = std::move(importances);
  }
  return report;
}

ResultMatrix report_matrix(const std::vector<ExperimentReport>& reports) {
  if (reports.empty()) throw ContractError("report_matrix: no reports");
  ResultMatrix matrix;
  matrix.site = reports.front().site;
  matrix.slot = reports.front().slot;
  matrix.arms = {Arm::A, Arm::P, Arm::AP};

  std::map<std::pair<int, int>, double> cells;
  std::set<int> family_seen;
  for (const auto& report : reports) {
    if (report.site != matrix.site || report.slot != matrix.slot) {
      throw ContractError("report_matrix: mixed site/slot");
    }
    family_seen.insert(static_cast<int>(report.family));
    cells[{static_cast<int>(report.family), static_cast<int>(report.arm)}] = report.mean_accuracy;
  }
  for (const Family f : kFamilyOrder) {
    if (family_seen.count(static_cast<int>(f)) > 0) matrix.families.push_back(f);
  }

  matrix.mean_accuracy = Matrix::Constant(static_cast<Eigen::Index>(matrix.families.size()),
                                          static_cast<Eigen::Index>(matrix.arms.size()), -1.0);
  for (std::size_t i = 0; i < matrix.families.size(); ++i) {
    for (std::size_t j = 0; j < matrix.arms.size(); ++j) {
      const auto it = cells.find({static_cast<int>(matrix.families[i]), static_cast<int>(matrix.arms[j])});
      if (it != cells.end()) {
        matrix.mean_accuracy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
      }
    }
  }
  return matrix;
}

std::string format_result_csv(const ResultMatrix& matrix) {
  std::string out = "model";
  for (const Arm arm : matrix.arms) {
    out += ',';
    out += to_string(arm);
  }
  out += '\n';
  char cell[32];
  for (std::size_t i = 0; i < matrix.families.size(); ++i) {
    out += to_string(matrix.families[i]);
    for (std::size_t j = 0; j < matrix.arms.size(); ++j) {
      const double v = matrix.mean_accuracy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v < 0) {
        out += ",";
      } else {
        std::snprintf(cell, sizeof(cell), ",%.2f", v * 100.0);
        out += cell;
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_result_text(const ResultMatrix& matrix) {
  std::ostringstream out;
  out << "Concentration prediction accuracy (%), " << matrix.site << " / " << to_string(matrix.slot) << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-22s", "model");
  out << buf;
  for (const Arm arm : matrix.arms) {
    std::snprintf(buf, sizeof(buf), "%10s", to_string(arm));
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < matrix.families.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-22s", to_string(matrix.families[i]));
    out << buf;
    for (std::size_t j = 0; j < matrix.arms.size(); ++j) {
      const double v = matrix.mean_accuracy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v < 0) {
        std::snprintf(buf, sizeof(buf), "%10s", "-");
      } else {
        std::snprintf(buf, sizeof(buf), "%10.2f", v * 100.0);
      }
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace concentra

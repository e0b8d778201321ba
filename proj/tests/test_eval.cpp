#include "concentra/eval.hpp"

#include "concentra/rng.hpp"

#include <doctest.h>

#include <functional>
#include <map>
#include <sstream>

using namespace concentra;

namespace {

// Dataset with fabricated feature vectors; ambient/physical blocks filled
// from the canonical manifest so arm selection is meaningful.
Dataset fabricate(int n, const std::function<int(int)>& label_of, const std::function<double(int, int)>& value) {
  Dataset dataset;
  dataset.site = "site1";
  dataset.slot = Slot::Morning;
  dataset.manifest = canonical_manifest();
  const auto da = static_cast<Eigen::Index>(dataset.manifest.ambient.size());
  const auto dp = static_cast<Eigen::Index>(dataset.manifest.physical.size());
  for (int i = 0; i < n; ++i) {
    LabeledInstance inst;
    inst.participant = "p" + std::to_string(i % 4);
    inst.end_timestamp = 1'000'000 + static_cast<TimestampMs>(i) * 300'000;
    inst.label = label_of(i);
    inst.slot = Slot::Morning;
    inst.site = "site1";
    inst.ambient.kind = FeatureKind::Ambient;
    inst.ambient.names = dataset.manifest.ambient;
    inst.ambient.values.resize(da);
    for (Eigen::Index j = 0; j < da; ++j) inst.ambient.values(j) = value(i, static_cast<int>(j));
    inst.physical.kind = FeatureKind::Physical;
    inst.physical.names = dataset.manifest.physical;
    inst.physical.values.resize(dp);
    for (Eigen::Index j = 0; j < dp; ++j) inst.physical.values(j) = value(i, static_cast<int>(da + j));
    dataset.instances.push_back(std::move(inst));
  }
  return dataset;
}

}  // namespace

TEST_CASE("stratified folds deal 5+5 across 5 folds evenly") {
  std::vector<int> labels;
  for (int i = 0; i < 5; ++i) labels.push_back(1);
  for (int i = 0; i < 5; ++i) labels.push_back(2);
  const auto folds = stratified_folds(labels, 5, 3);
  std::map<std::pair<int, int>, int> counts;  // (fold, label) -> n
  for (std::size_t i = 0; i < labels.size(); ++i) ++counts[{folds.fold_of[i], labels[i]}];
  for (int f = 0; f < 5; ++f) {
    CHECK(counts[{f, 1}] == 1);
    CHECK(counts[{f, 2}] == 1);
  }
}

TEST_CASE("stratified folds keep per-class counts within one of proportional") {
  std::vector<int> labels;
  for (int i = 0; i < 7; ++i) labels.push_back(1);
  for (int i = 0; i < 3; ++i) labels.push_back(2);
  const auto folds = stratified_folds(labels, 3, 1);
  std::map<int, std::map<int, int>> per_fold;
  for (std::size_t i = 0; i < labels.size(); ++i) ++per_fold[folds.fold_of[i]][labels[i]];
  for (int f = 0; f < 3; ++f) {
    CHECK(per_fold[f][1] >= 2);
    CHECK(per_fold[f][1] <= 3);
    CHECK(per_fold[f][2] == 1);
  }
  CHECK(folds.small_classes.empty());  // class 2 holds exactly k members

  const auto sparse = stratified_folds({1, 1, 1, 1, 1, 2}, 3, 1);
  CHECK(sparse.small_classes == std::vector<int>{2});  // 1 member < k
}

TEST_CASE("fold sizes differ by at most one even with many small classes") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> labels;
    const int classes = 2 + static_cast<int>(rng.next_below(5));
    for (int c = 0; c < classes; ++c) {
      const int members = 1 + static_cast<int>(rng.next_below(40));
      for (int i = 0; i < members; ++i) labels.push_back(c);
    }
    if (static_cast<int>(labels.size()) < 10) continue;
    const auto folds = stratified_folds(labels, 10, trial);
    std::vector<int> sizes(10, 0);
    for (const int f : folds.fold_of) ++sizes[static_cast<std::size_t>(f)];
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);

    std::map<int, std::map<int, int>> per_class_fold;
    std::map<int, int> class_totals;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ++per_class_fold[labels[i]][folds.fold_of[i]];
      ++class_totals[labels[i]];
    }
    for (const auto& [label, fold_counts] : per_class_fold) {
      const double ideal = class_totals[label] / 10.0;
      for (int f = 0; f < 10; ++f) {
        const auto it = fold_counts.find(f);
        const int count = it == fold_counts.end() ? 0 : it->second;
        CHECK(std::abs(count - ideal) <= 1.0);
      }
    }
  }
}

TEST_CASE("fold assignment is deterministic and k bounds are enforced") {
  std::vector<int> labels = {1, 1, 2, 2, 1, 2, 1, 1, 2, 1, 2, 2};
  const auto a = stratified_folds(labels, 4, 99);
  const auto b = stratified_folds(labels, 4, 99);
  CHECK(a.fold_of == b.fold_of);
  CHECK_THROWS_AS(stratified_folds(labels, 1, 0), ParameterError);
  CHECK_THROWS_AS(stratified_folds(labels, 13, 0), ParameterError);
}

TEST_CASE("accuracy is the exact fraction of agreeing positions") {
  IntVector pred(10), truth(10);
  for (int i = 0; i < 10; ++i) {
    truth(i) = 1;
    pred(i) = i < 8 ? 1 : 2;
  }
  CHECK(accuracy(pred, truth) == 0.8);
  CHECK(accuracy(truth, truth) == 1.0);
  IntVector disjoint = IntVector::Constant(10, 5);
  CHECK(accuracy(disjoint, truth) == 0.0);
  IntVector shorter(4);
  CHECK_THROWS_AS(accuracy(shorter, truth), ContractError);
}

TEST_CASE("constant-majority accuracy equals the majority proportion") {
  IntVector truth(20);
  for (int i = 0; i < 20; ++i) truth(i) = i < 13 ? 2 : 4;
  IntVector constant = IntVector::Constant(20, 2);
  CHECK(accuracy(constant, truth) == doctest::Approx(13.0 / 20.0));
}

TEST_CASE("select_arm splits the manifest blocks with stable order") {
  const auto dataset = fabricate(
      12, [](int i) { return 1 + i % 2; }, [](int i, int j) { return i * 0.01 + j; });
  const Matrix a = select_arm(dataset, Arm::A);
  const Matrix p = select_arm(dataset, Arm::P);
  const Matrix ap = select_arm(dataset, Arm::AP);
  CHECK(a.cols() == 42);
  CHECK(p.cols() == 57);
  CHECK(ap.cols() == 99);
  CHECK((ap.leftCols(42) - a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ap.rightCols(57) - p).cwiseAbs().maxCoeff() == 0.0);

  const auto amb_names = arm_manifest(dataset.manifest, Arm::A);
  for (const auto& name : amb_names) {
    CHECK(name.rfind("accel", 0) != 0);
    CHECK(name.rfind("gyro", 0) != 0);
    CHECK(name.rfind("pedometer", 0) != 0);
  }
  const auto ap_names = arm_manifest(dataset.manifest, Arm::AP);
  CHECK(std::vector<std::string>(ap_names.begin(), ap_names.begin() + 42) == amb_names);
}

TEST_CASE("run_experiment scores a trivially separable dataset at 1.0") {
  const auto dataset = fabricate(
      60, [](int i) { return i % 2 == 0 ? 1 : 5; },
      [](int i, int j) { return (i % 2 == 0 ? 0.0 : 10.0) + 0.001 * j; });
  EvalOptions options;
  options.k = 10;
  options.seed = 5;
  const auto report = run_experiment(dataset, ClassifierSpec::defaults(Family::DecisionTree, 5), Arm::AP, options);
  CHECK(report.mean_accuracy == 1.0);
  CHECK(report.confusion.sum() == 60);
  CHECK(report.folds.size() == 10);
  CHECK(!report.top_importances.empty());
}

TEST_CASE("confusion totals match the dataset and pooled accuracy when folds are even") {
  Rng rng(13);
  const auto dataset = fabricate(
      100, [&](int i) { return 1 + (i * 7 + 3) % 4; },
      [&](int i, int j) { return std::sin(i * 0.37 + j * 1.13); });
  EvalOptions options;
  options.k = 10;
  options.seed = 2;
  const auto report = run_experiment(dataset, ClassifierSpec::defaults(Family::Knn, 2), Arm::AP, options);
  CHECK(report.confusion.sum() == 100);
  double diag = 0;
  for (Eigen::Index i = 0; i < report.confusion.rows(); ++i) diag += report.confusion(i, i);
  // 100 instances over 10 folds: all folds the same size, so the fold mean
  // equals the pooled fraction.
  CHECK(report.mean_accuracy == doctest::Approx(diag / 100.0).epsilon(1e-12));
}

TEST_CASE("altering held-out rows cannot change a fold's fitted model") {
  Rng rng(3);
  Matrix X(40, 3);
  IntVector y(40);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);
    y(i) = 1 + i % 2;
  }
  std::vector<int> labels(y.data(), y.data() + y.size());
  const auto folds = stratified_folds(labels, 5, 7);

  std::vector<int> train_rows;
  for (int i = 0; i < 40; ++i) {
    if (folds.fold_of[static_cast<std::size_t>(i)] != 0) train_rows.push_back(i);
  }
  Matrix train_x(static_cast<Eigen::Index>(train_rows.size()), 3);
  IntVector train_y(static_cast<Eigen::Index>(train_rows.size()));
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    train_x.row(static_cast<Eigen::Index>(i)) = X.row(train_rows[i]);
    train_y(static_cast<Eigen::Index>(i)) = y(train_rows[i]);
  }

  std::vector<std::string> manifest = {"a", "b", "c"};
  const auto model = fit(train_x, train_y, manifest, ClassifierSpec::defaults(Family::LogisticRegression, 1));
  std::stringstream before;
  model->save(before);

  // Scale the held-out rows wildly; the training split is untouched, so the
  // standardizer and weights must come out identical.
  Matrix mutated = X;
  for (int i = 0; i < 40; ++i) {
    if (folds.fold_of[static_cast<std::size_t>(i)] == 0) mutated.row(i) *= 100.0;
  }
  Matrix train_x2(train_x.rows(), 3);
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    train_x2.row(static_cast<Eigen::Index>(i)) = mutated.row(train_rows[i]);
  }
  const auto model2 = fit(train_x2, train_y, manifest, ClassifierSpec::defaults(Family::LogisticRegression, 1));
  std::stringstream after;
  model2->save(after);
  CHECK(before.str() == after.str());
}

TEST_CASE("report matrix has fixed family order and exact passthrough") {
  const auto dataset = fabricate(
      40, [](int i) { return i % 2 == 0 ? 1 : 5; },
      [](int i, int j) { return (i % 2 == 0 ? 0.0 : 10.0) + 0.001 * j; });
  EvalOptions options;
  options.k = 5;
  options.seed = 11;
  std::vector<ExperimentReport> reports;
  for (const Family family : {Family::GaussianNb, Family::DecisionTree}) {
    for (const Arm arm : {Arm::A, Arm::P, Arm::AP}) {
      reports.push_back(run_experiment(dataset, ClassifierSpec::defaults(family, 11), arm, options));
    }
  }
  const auto matrix = report_matrix(reports);
  REQUIRE(matrix.families.size() == 2);
  CHECK(matrix.families[0] == Family::DecisionTree);  // fixed presentation order
  CHECK(matrix.families[1] == Family::GaussianNb);
  CHECK(matrix.mean_accuracy.rows() == 2);
  CHECK(matrix.mean_accuracy.cols() == 3);
  for (const auto& report : reports) {
    for (std::size_t i = 0; i < matrix.families.size(); ++i) {
      if (matrix.families[i] != report.family) continue;
      for (std::size_t j = 0; j < matrix.arms.size(); ++j) {
        if (matrix.arms[j] != report.arm) continue;
        CHECK(matrix.mean_accuracy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
              report.mean_accuracy);
      }
    }
  }
  const std::string csv1 = format_result_csv(matrix);
  const std::string csv2 = format_result_csv(matrix);
  CHECK(csv1 == csv2);
  CHECK(csv1.rfind("model,A,P,A+P", 0) == 0);

  // Mixed site/slot is rejected.
  auto mixed = reports;
  mixed.back().site = "site2";
  CHECK_THROWS_AS(report_matrix(mixed), ContractError);
}

TEST_CASE("degenerate folds are flagged and excluded from the mean") {
  // 11 instances of class 1 and 1 of class 2 with k=2: the fold holding the
  // lone class-2 instance leaves a single-class training split.
  Dataset dataset = fabricate(
      12, [](int i) { return i == 0 ? 2 : 1; }, [](int i, int j) { return i + 0.1 * j; });
  EvalOptions options;
  options.k = 2;
  options.seed = 1;
  const auto report = run_experiment(dataset, ClassifierSpec::defaults(Family::DecisionTree, 1), Arm::AP, options);
  int failed = 0;
  for (const auto& fold : report.folds) failed += fold.failed ? 1 : 0;
  CHECK(failed == 1);
}

#pragma once

#include "concentra/fusion.hpp"
#include "concentra/models.hpp"

#include <string>
#include <vector>

namespace concentra {

enum class Arm { A, P, AP };

const char* to_string(Arm arm);
bool parse_arm(const std::string& token, Arm& out);

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;        // per instance
  std::vector<int> small_classes;  // labels with fewer than k members
};

// Seeded stratified fold assignment: instances are shuffled within each class
// and dealt round-robin with a running fold cursor, so fold sizes differ by
// at most 1 overall and per class.
FoldAssignment stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

// Fraction of positions where predicted equals truth.
double accuracy(const IntVector& predicted, const IntVector& truth);

// Column subset per feature arm: A = ambient block, P = physical block,
// A+P = ambient block followed by physical block.
Matrix select_arm(const Dataset& dataset, Arm arm);
std::vector<std::string> arm_manifest(const FeatureManifest& manifest, Arm arm);

struct FoldResult {
  int fold = 0;
  bool failed = false;  // degenerate training split
  double accuracy = 0;
  int n_test = 0;
};

struct ExperimentReport {
  std::string site;
  Slot slot = Slot::Morning;
  Family family = Family::DecisionTree;
  Arm arm = Arm::A;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0;  // over non-failed folds
  std::vector<int> class_set;
  Eigen::MatrixXi confusion;  // rows = truth, cols = predicted, class order
  std::vector<std::pair<std::string, double>> top_importances;  // tree families
  std::vector<int> small_classes;
  std::uint64_t seed = 0;
  TimestampMs data_start = 0;  // dataset span, not wall clock
  TimestampMs data_end = 0;
};

struct EvalOptions {
  int k = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  int top_n_importances = 20;
};

// Stratified k-fold cross-validation of one (classifier, arm) cell.
// Standardizing families fit their transform on training folds only. Folds
// whose training split collapses to one class are flagged and excluded from
// the mean. Tree families add importances from a final whole-dataset fit.
ExperimentReport run_experiment(const Dataset& dataset, const ClassifierSpec& spec, Arm arm,
                                const EvalOptions& options);

struct ResultMatrix {
  std::string site;
  Slot slot = Slot::Morning;
  std::vector<Family> families;
  std::vector<Arm> arms;
  Matrix mean_accuracy;  // families x arms, fractions
};

// Families in fixed presentation order, columns A, P, A+P. All reports must
// share one site/slot.
ResultMatrix report_matrix(const std::vector<ExperimentReport>& reports);

std::string format_result_csv(const ResultMatrix& matrix);   // percentages, 2 decimals
std::string format_result_text(const ResultMatrix& matrix);  // aligned table

}  // namespace concentra

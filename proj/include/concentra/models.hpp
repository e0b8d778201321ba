#pragma once

#include "concentra/types.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace concentra {

enum class Family {
  GaussianNb,
  Knn,
  LogisticRegression,
  DecisionTree,
  RandomForest,
  GradientBoosting,
};

const char* to_string(Family family);
bool parse_family(const std::string& token, Family& out);

// Fixed presentation order for experiment tables.
extern const std::vector<Family> kFamilyOrder;

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

// Family plus hyperparameters. Unset keys take the documented defaults:
//   gaussian_nb:        var_floor 1e-9
//   knn:                k 10
//   logistic_regression: learning_rate 0.1, epochs 500, l2 1e-4
//   decision_tree:      max_depth 10, min_samples_split 10
//   random_forest:      n_estimators 100, max_depth 5, min_samples_split 2,
//                       bootstrap 1, max_features -1 (-1 = floor(sqrt(d)))
//   gradient_boosting:  n_rounds 100, max_depth 5, learning_rate 0.1,
//                       min_samples_split 2
struct ClassifierSpec {
  Family family = Family::DecisionTree;
  std::map<std::string, double> hyper;
  std::uint64_t seed = 0;

  double get(const std::string& key, double fallback) const;
  void set(const std::string& key, double value) { hyper[key] = value; }
  void validate() const;  // throws ParameterError

  static ClassifierSpec defaults(Family family, std::uint64_t seed = 0);
};

// Immutable after fit; safe for concurrent predict calls.
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  Family family() const { return family_; }
  const std::vector<std::string>& manifest() const { return manifest_; }
  const std::vector<int>& classes() const { return classes_; }

  // Single-row prediction; checks finiteness and width. Ties break toward the
  // numerically smallest label.
  int predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;

  // Batch prediction with a manifest check against the training manifest.
  IntVector predict(const Matrix& X, const std::vector<std::string>& manifest) const;

  // Normalized total impurity decrease per feature, descending.
  // Throws ContractError for non-tree families.
  virtual std::vector<std::pair<std::string, double>> feature_importance() const;

  void save(std::ostream& out) const;

 protected:
  TrainedModel(Family family, std::vector<std::string> manifest, std::vector<int> classes)
      : family_(family), manifest_(std::move(manifest)), classes_(std::move(classes)) {}

  virtual int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const = 0;
  virtual void save_params(std::ostream& out) const = 0;

  Family family_;
  std::vector<std::string> manifest_;
  std::vector<int> classes_;  // ascending

  friend std::unique_ptr<TrainedModel> load_model(std::istream& in);
};

// Fits one classifier. X rows are instances, columns follow `manifest`;
// y holds integer labels. Deterministic given (X, y, spec.seed).
// Throws DegenerateFitError on single-class input and ContractError on
// non-finite features or width mismatches.
std::unique_ptr<TrainedModel> fit(const Matrix& X, const IntVector& y, const std::vector<std::string>& manifest,
                                  const ClassifierSpec& spec);

// Self-describing text round-trip; loading reproduces predictions bit-exactly.
std::unique_ptr<TrainedModel> load_model(std::istream& in);
std::unique_ptr<TrainedModel> load_model_file(const std::string& path);
void save_model_file(const TrainedModel& model, const std::string& path);

// Multiclass log-loss curve recorded during gradient boosting training
// (one entry per round); empty for other families.
const std::vector<double>& training_loss_curve(const TrainedModel& model);

// Multinomial softmax objective (cross-entropy + l2/2*||W||^2, bias
// unpenalized). Exposed so the analytic gradient can be checked against
// central finite differences.
struct LogisticObjective {
  const Matrix& X;                    // n x d
  const std::vector<int>& class_ids;  // values in [0, n_classes)
  int n_classes = 2;
  double l2 = 0;

  double loss(const Matrix& W, const Vector& b) const;
  void gradient(const Matrix& W, const Vector& b, Matrix& grad_w, Vector& grad_b) const;
};

}  // namespace concentra

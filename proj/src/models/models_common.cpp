#include "families.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace concentra {

const std::vector<Family> kFamilyOrder = {
    Family::GradientBoosting, Family::DecisionTree, Family::LogisticRegression,
    Family::Knn,              Family::GaussianNb,   Family::RandomForest,
};

const char* to_string(Family family) {
  switch (family) {
    case Family::GaussianNb: return "gaussian_nb";
    case Family::Knn: return "knn";
    case Family::LogisticRegression: return "logistic_regression";
    case Family::DecisionTree: return "decision_tree";
    case Family::RandomForest: return "random_forest";
    default: return "gradient_boosting";
  }
}

bool parse_family(const std::string& token, Family& out) {
  for (const Family f : kFamilyOrder) {
    if (token == to_string(f)) {
      out = f;
      return true;
    }
  }
  return false;
}

double ClassifierSpec::get(const std::string& key, double fallback) const {
  const auto it = hyper.find(key);
  return it == hyper.end() ? fallback : it->second;
}

ClassifierSpec ClassifierSpec::defaults(Family family, std::uint64_t seed) {
  ClassifierSpec spec;
  spec.family = family;
  spec.seed = seed;
  return spec;
}

void ClassifierSpec::validate() const {
  const auto positive = [&](const std::string& key, double fallback) {
    if (get(key, fallback) <= 0) throw ParameterError("classifier spec: " + key + " must be > 0");
  };
  switch (family) {
    case Family::GaussianNb:
      positive("var_floor", 1e-9);
      break;
    case Family::Knn:
      if (get("k", 10) < 1) throw ParameterError("classifier spec: k must be >= 1");
      break;
    case Family::LogisticRegression:
      positive("learning_rate", 0.1);
      positive("epochs", 500);
      if (get("l2", 1e-4) < 0) throw ParameterError("classifier spec: l2 must be >= 0");
      break;
    case Family::DecisionTree:
      if (get("max_depth", 10) < 1) throw ParameterError("classifier spec: max_depth must be >= 1");
      if (get("min_samples_split", 10) < 2) throw ParameterError("classifier spec: min_samples_split must be >= 2");
      break;
    case Family::RandomForest:
      if (get("n_estimators", 100) < 1) throw ParameterError("classifier spec: n_estimators must be >= 1");
      if (get("max_depth", 5) < 1) throw ParameterError("classifier spec: max_depth must be >= 1");
      if (get("min_samples_split", 2) < 2) throw ParameterError("classifier spec: min_samples_split must be >= 2");
      break;
    default:
      if (get("n_rounds", 100) < 1) throw ParameterError("classifier spec: n_rounds must be >= 1");
      if (get("max_depth", 5) < 1) throw ParameterError("classifier spec: max_depth must be >= 1");
      if (get("min_samples_split", 2) < 2) throw ParameterError("classifier spec: min_samples_split must be >= 2");
      positive("learning_rate", 0.1);
      break;
  }
}

int TrainedModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (x.size() != static_cast<Eigen::Index>(manifest_.size())) {
    throw ContractError("predict: feature width does not match the training manifest");
  }
  if (!x.allFinite()) throw ContractError("predict: non-finite feature value");
  return predict_one(x);
}

IntVector TrainedModel::predict(const Matrix& X, const std::vector<std::string>& manifest) const {
  if (manifest != manifest_) throw ContractError("predict: feature manifest mismatch");
  IntVector out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i));
  return out;
}

std::vector<std::pair<std::string, double>> TrainedModel::feature_importance() const {
  throw ContractError("feature_importance: unsupported for family " + std::string(to_string(family_)));
}

void TrainedModel::save(std::ostream& out) const {
  detail::ModelWriter w(out);
  w.word("concentra-model 1");
  w.key("family", to_string(family_));
  out << "classes " << classes_.size();
  for (const int c : classes_) out << ' ' << c;
  out << '\n';
  w.key("features", static_cast<std::int64_t>(manifest_.size()));
  for (const auto& name : manifest_) w.word(name);
  save_params(out);
  w.word("end");
}

std::unique_ptr<TrainedModel> fit(const Matrix& X, const IntVector& y, const std::vector<std::string>& manifest,
                                  const ClassifierSpec& spec) {
  spec.validate();
  if (X.rows() != y.size()) throw ContractError("fit: X and y row counts differ");
  if (X.rows() == 0) throw ContractError("fit: empty training set");
  if (X.cols() != static_cast<Eigen::Index>(manifest.size())) {
    throw ContractError("fit: feature width does not match manifest");
  }
  if (!X.allFinite()) throw ContractError("fit: non-finite feature value");

  std::set<int> label_set(y.data(), y.data() + y.size());
  if (label_set.size() < 2) throw DegenerateFitError("fit: training set has fewer than 2 distinct labels");
  const std::vector<int> classes(label_set.begin(), label_set.end());

  std::vector<int> class_ids(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), y(i));
    class_ids[static_cast<std::size_t>(i)] = static_cast<int>(it - classes.begin());
  }

  const detail::FitContext ctx{X, class_ids, classes, manifest, spec};
  switch (spec.family) {
    case Family::GaussianNb: return detail::fit_gaussian_nb(ctx);
    case Family::Knn: return detail::fit_knn(ctx);
    case Family::LogisticRegression: return detail::fit_logistic(ctx);
    case Family::DecisionTree: return detail::fit_decision_tree(ctx);
    case Family::RandomForest: return detail::fit_random_forest(ctx);
    default: return detail::fit_gradient_boosting(ctx);
  }
}

std::unique_ptr<TrainedModel> load_model(std::istream& in) {
  detail::ModelReader r(in);
  r.expect("concentra-model");
  if (r.integer() != 1) throw DataError("model: unsupported format version");
  r.expect("family");
  Family family = Family::DecisionTree;
  if (!parse_family(r.token(), family)) throw DataError("model: unknown family");
  r.expect("classes");
  const auto k = r.integer();
  std::vector<int> classes(static_cast<std::size_t>(k));
  for (auto& c : classes) c = static_cast<int>(r.integer());
  r.expect("features");
  const auto d = r.integer();
  std::vector<std::string> manifest(static_cast<std::size_t>(d));
  for (auto& name : manifest) name = r.token();
  auto model = detail::load_family(family, r, std::move(manifest), std::move(classes));
  r.expect("end");
  return model;
}

std::unique_ptr<TrainedModel> load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  return load_model(in);
}

void save_model_file(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  model.save(out);
}

}  // namespace concentra

namespace concentra::detail {

std::string ModelReader::token() {
  std::string t;
  if (!(in_ >> t)) throw DataError("model: truncated input");
  return t;
}

void ModelReader::expect(std::string_view keyword) {
  const std::string t = token();
  if (t != keyword) throw DataError("model: expected '" + std::string(keyword) + "', got '" + t + "'");
}

double ModelReader::number() {
  const std::string t = token();
  double v = 0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), v);
  if (result.ec != std::errc() || result.ptr != t.data() + t.size()) {
    throw DataError("model: bad number '" + t + "'");
  }
  return v;
}

std::int64_t ModelReader::integer() {
  const std::string t = token();
  std::int64_t v = 0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), v);
  if (result.ec != std::errc() || result.ptr != t.data() + t.size()) {
    throw DataError("model: bad integer '" + t + "'");
  }
  return v;
}

void ModelReader::fill(Eigen::Ref<Eigen::RowVectorXd> values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = number();
}

void Standardizer::fit(const Matrix& X) {
  const double n = static_cast<double>(X.rows());
  mean = X.colwise().mean();
  scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - mean(j)).square().sum() / n;
    const double sd = std::sqrt(std::max(var, 0.0));
    scale(j) = sd > 0 ? sd : 1.0;
  }
}

Matrix Standardizer::transform(const Matrix& X) const {
  return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::RowVectorXd Standardizer::transform_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  return (x - mean.transpose()).array() / scale.transpose().array();
}

void Standardizer::save(ModelWriter& w) const {
  w.word("standardizer");
  w.row(mean.transpose());
  w.row(scale.transpose());
}

void Standardizer::load(ModelReader& r, Eigen::Index d) {
  r.expect("standardizer");
  mean.resize(d);
  scale.resize(d);
  Eigen::RowVectorXd tmp(d);
  r.fill(tmp);
  mean = tmp.transpose();
  r.fill(tmp);
  scale = tmp.transpose();
}

void save_tree(ModelWriter& w, const Tree& tree) {
  w.key("tree", static_cast<std::int64_t>(tree.nodes.size()));
  for (const TreeNode& nd : tree.nodes) {
    w.raw() << nd.feature << ' ' << csv::format_double(nd.threshold) << ' ' << nd.left << ' ' << nd.right << ' '
            << csv::format_double(nd.value) << ' ' << nd.label << '\n';
  }
}

Tree load_tree(ModelReader& r) {
  r.expect("tree");
  const auto n = r.integer();
  Tree tree;
  tree.nodes.resize(static_cast<std::size_t>(n));
  for (auto& nd : tree.nodes) {
    nd.feature = static_cast<int>(r.integer());
    nd.threshold = r.number();
    nd.left = static_cast<int>(r.integer());
    nd.right = static_cast<int>(r.integer());
    nd.value = r.number();
    nd.label = static_cast<int>(r.integer());
  }
  return tree;
}

int argmax_smallest(const Eigen::Ref<const Vector>& scores) {
  int best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace concentra::detail

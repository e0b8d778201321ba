#include "families.hpp"

#include <algorithm>
#include <cmath>

namespace concentra::detail {

namespace {

constexpr double kLeafValueCap = 20.0;

std::vector<std::pair<std::string, double>> normalized_importance(const std::vector<std::string>& manifest,
                                                                  const std::vector<double>& accum) {
  double total = 0;
  for (const double v : accum) total += v;
  std::vector<std::pair<std::string, double>> out;
  out.reserve(accum.size());
  for (std::size_t i = 0; i < accum.size(); ++i) {
    out.emplace_back(manifest[i], total > 0 ? accum[i] / total : 0.0);
  }
  // Descending weight, ties by feature order for a stable ranking.
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

class DecisionTreeModel final : public TrainedModel {
 public:
  DecisionTreeModel(std::vector<std::string> manifest, std::vector<int> classes, Tree tree,
                    std::vector<double> importance)
      : TrainedModel(Family::DecisionTree, std::move(manifest), std::move(classes)),
        tree_(std::move(tree)),
        importance_(std::move(importance)) {}

  std::vector<std::pair<std::string, double>> feature_importance() const override {
    return normalized_importance(manifest_, importance_);
  }

 protected:
  int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
    return classes_[static_cast<std::size_t>(tree_.predict_label(x))];
  }

  void save_params(std::ostream& out) const override {
    ModelWriter w(out);
    w.word("importance");
    w.row(Eigen::Map<const Eigen::RowVectorXd>(importance_.data(), static_cast<Eigen::Index>(importance_.size())));
    save_tree(w, tree_);
  }

 private:
  Tree tree_;
  std::vector<double> importance_;
};

class RandomForestModel final : public TrainedModel {
 public:
  RandomForestModel(std::vector<std::string> manifest, std::vector<int> classes, std::vector<Tree> trees,
                    std::vector<double> importance)
      : TrainedModel(Family::RandomForest, std::move(manifest), std::move(classes)),
        trees_(std::move(trees)),
        importance_(std::move(importance)) {}

  std::vector<std::pair<std::string, double>> feature_importance() const override {
    return normalized_importance(manifest_, importance_);
  }

 protected:
  int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
    Vector votes = Vector::Zero(static_cast<Eigen::Index>(classes_.size()));
    for (const Tree& tree : trees_) votes(tree.predict_label(x)) += 1.0;
    return classes_[static_cast<std::size_t>(argmax_smallest(votes))];
  }

  void save_params(std::ostream& out) const override {
    ModelWriter w(out);
    w.word("importance");
    w.row(Eigen::Map<const Eigen::RowVectorXd>(importance_.data(), static_cast<Eigen::Index>(importance_.size())));
    w.key("n_trees", static_cast<std::int64_t>(trees_.size()));
    for (const Tree& tree : trees_) save_tree(w, tree);
  }

 private:
  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

class GradientBoostingModel final : public TrainedModel {
 public:
  GradientBoostingModel(std::vector<std::string> manifest, std::vector<int> classes, double learning_rate,
                        std::vector<Tree> trees, std::vector<double> importance, std::vector<double> loss_curve)
      : TrainedModel(Family::GradientBoosting, std::move(manifest), std::move(classes)),
        learning_rate_(learning_rate),
        trees_(std::move(trees)),
        importance_(std::move(importance)),
        loss_curve_(std::move(loss_curve)) {}

  std::vector<std::pair<std::string, double>> feature_importance() const override {
    return normalized_importance(manifest_, importance_);
  }

  const std::vector<double>& loss_curve() const { return loss_curve_; }

 protected:
  int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
    const int K = static_cast<int>(classes_.size());
    Vector scores = Vector::Zero(K);
    for (std::size_t t = 0; t < trees_.size(); ++t) {
      scores(static_cast<Eigen::Index>(t % static_cast<std::size_t>(K))) +=
          learning_rate_ * trees_[t].predict_value(x);
    }
    return classes_[static_cast<std::size_t>(argmax_smallest(scores))];
  }

  void save_params(std::ostream& out) const override {
    ModelWriter w(out);
    w.word("importance");
    w.row(Eigen::Map<const Eigen::RowVectorXd>(importance_.data(), static_cast<Eigen::Index>(importance_.size())));
    w.key("learning_rate", csv::format_double(learning_rate_));
    w.key("n_trees", static_cast<std::int64_t>(trees_.size()));
    for (const Tree& tree : trees_) save_tree(w, tree);
  }

 private:
  double learning_rate_;
  std::vector<Tree> trees_;  // (round, class) order
  std::vector<double> importance_;
  std::vector<double> loss_curve_;
};

const std::vector<double> kEmptyCurve;

}  // namespace

std::unique_ptr<TrainedModel> fit_decision_tree(const FitContext& ctx) {
  const SortedColumns cols = SortedColumns::build(ctx.X);
  TreeGrowParams params;
  params.max_depth = static_cast<int>(ctx.spec.get("max_depth", 10));
  params.min_samples_split = static_cast<int>(ctx.spec.get("min_samples_split", 10));
  std::vector<double> importance(static_cast<std::size_t>(ctx.X.cols()), 0.0);
  Tree tree = grow_classification_tree(cols, ctx.class_ids, static_cast<int>(ctx.classes.size()), nullptr, params,
                                       &importance);
  return std::make_unique<DecisionTreeModel>(ctx.manifest, ctx.classes, std::move(tree), std::move(importance));
}

std::unique_ptr<TrainedModel> fit_random_forest(const FitContext& ctx) {
  const int n_estimators = static_cast<int>(ctx.spec.get("n_estimators", 100));
  const bool bootstrap = ctx.spec.get("bootstrap", 1.0) != 0.0;
  const int n = static_cast<int>(ctx.X.rows());
  const int d = static_cast<int>(ctx.X.cols());
  int max_features = static_cast<int>(ctx.spec.get("max_features", -1.0));
  if (max_features <= 0) max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(d))));
  max_features = std::min(max_features, d);

  const SortedColumns cols = SortedColumns::build(ctx.X);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(n_estimators));
  std::vector<double> importance(static_cast<std::size_t>(d), 0.0);
  for (int t = 0; t < n_estimators; ++t) {
    Rng rng = substream(ctx.spec.seed, "rf-tree", static_cast<std::uint64_t>(t));
    TreeGrowParams params;
    params.max_depth = static_cast<int>(ctx.spec.get("max_depth", 5));
    params.min_samples_split = static_cast<int>(ctx.spec.get("min_samples_split", 2));
    params.max_features = max_features;
    params.rng = &rng;

    std::vector<int> weights;
    if (bootstrap) {
      weights.assign(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n; ++i) ++weights[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(n)))];
    }
    trees.push_back(grow_classification_tree(cols, ctx.class_ids, static_cast<int>(ctx.classes.size()),
                                             bootstrap ? &weights : nullptr, params, &importance));
  }
  return std::make_unique<RandomForestModel>(ctx.manifest, ctx.classes, std::move(trees), std::move(importance));
}

std::unique_ptr<TrainedModel> fit_gradient_boosting(const FitContext& ctx) {
  const int rounds = static_cast<int>(ctx.spec.get("n_rounds", 100));
  const double lr = ctx.spec.get("learning_rate", 0.1);
  const int K = static_cast<int>(ctx.classes.size());
  const int n = static_cast<int>(ctx.X.rows());

  const SortedColumns cols = SortedColumns::build(ctx.X);
  TreeGrowParams params;
  params.max_depth = static_cast<int>(ctx.spec.get("max_depth", 5));
  params.min_samples_split = static_cast<int>(ctx.spec.get("min_samples_split", 2));

  Matrix F = Matrix::Zero(n, K);  // raw scores
  Matrix P(n, K);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(rounds * K));
  std::vector<double> importance(static_cast<std::size_t>(ctx.X.cols()), 0.0);
  std::vector<double> loss_curve;
  loss_curve.reserve(static_cast<std::size_t>(rounds));

  Vector targets(n);
  std::vector<double> train_values;
  const double leaf_scale = K > 1 ? static_cast<double>(K - 1) / static_cast<double>(K) : 1.0;

  for (int round = 0; round < rounds; ++round) {
    // Shared softmax for every class tree of this round.
    for (int i = 0; i < n; ++i) {
      const double m = F.row(i).maxCoeff();
      P.row(i) = (F.row(i).array() - m).exp();
      P.row(i) /= P.row(i).sum();
    }
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const double y = ctx.class_ids[static_cast<std::size_t>(i)] == k ? 1.0 : 0.0;
        targets(i) = y - P(i, k);
      }
      // Friedman's multiclass leaf step; the residual column is captured so
      // the denominator uses this round's probabilities.
      const auto leaf_value = [&](const std::vector<int>& rows) {
        double num = 0, den = 0;
        for (const int r : rows) {
          const double res = targets(r);
          num += res;
          const double y = ctx.class_ids[static_cast<std::size_t>(r)] == k ? 1.0 : 0.0;
          const double p = y - res;
          den += p * (1.0 - p);
        }
        if (den < 1e-150) return 0.0;
        return std::clamp(leaf_scale * num / den, -kLeafValueCap, kLeafValueCap);
      };
      trees.push_back(grow_regression_tree(cols, targets, params, leaf_value, &importance, &train_values));
      for (int i = 0; i < n; ++i) F(i, k) += lr * train_values[static_cast<std::size_t>(i)];
    }
    double nll = 0;
    for (int i = 0; i < n; ++i) {
      const double m = F.row(i).maxCoeff();
      const double denom = (F.row(i).array() - m).exp().sum();
      const double log_p = F(i, ctx.class_ids[static_cast<std::size_t>(i)]) - m - std::log(denom);
      nll -= log_p;
    }
    loss_curve.push_back(nll / static_cast<double>(n));
  }

  return std::make_unique<GradientBoostingModel>(ctx.manifest, ctx.classes, lr, std::move(trees),
                                                 std::move(importance), std::move(loss_curve));
}

std::unique_ptr<TrainedModel> load_tree_family(Family family, ModelReader& r, std::vector<std::string> manifest,
                                               std::vector<int> classes) {
  const auto d = static_cast<Eigen::Index>(manifest.size());
  r.expect("importance");
  Eigen::RowVectorXd imp(d);
  r.fill(imp);
  std::vector<double> importance(imp.data(), imp.data() + imp.size());

  if (family == Family::DecisionTree) {
    Tree tree = load_tree(r);
    return std::make_unique<DecisionTreeModel>(std::move(manifest), std::move(classes), std::move(tree),
                                               std::move(importance));
  }
  if (family == Family::RandomForest) {
    r.expect("n_trees");
    const auto t = r.integer();
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(t));
    for (std::int64_t i = 0; i < t; ++i) trees.push_back(load_tree(r));
    return std::make_unique<RandomForestModel>(std::move(manifest), std::move(classes), std::move(trees),
                                               std::move(importance));
  }
  r.expect("learning_rate");
  const double lr = r.number();
  r.expect("n_trees");
  const auto t = r.integer();
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(t));
  for (std::int64_t i = 0; i < t; ++i) trees.push_back(load_tree(r));
  return std::make_unique<GradientBoostingModel>(std::move(manifest), std::move(classes), lr, std::move(trees),
                                                 std::move(importance), std::vector<double>{});
}

std::unique_ptr<TrainedModel> load_gaussian_nb(ModelReader& r, std::vector<std::string> manifest,
                                               std::vector<int> classes);
std::unique_ptr<TrainedModel> load_knn(ModelReader& r, std::vector<std::string> manifest, std::vector<int> classes);
std::unique_ptr<TrainedModel> load_logistic(ModelReader& r, std::vector<std::string> manifest,
                                            std::vector<int> classes);

std::unique_ptr<TrainedModel> load_family(Family family, ModelReader& reader, std::vector<std::string> manifest,
                                          std::vector<int> classes) {
  switch (family) {
    case Family::GaussianNb: return load_gaussian_nb(reader, std::move(manifest), std::move(classes));
    case Family::Knn: return load_knn(reader, std::move(manifest), std::move(classes));
    case Family::LogisticRegression: return load_logistic(reader, std::move(manifest), std::move(classes));
    default: return load_tree_family(family, reader, std::move(manifest), std::move(classes));
  }
}

}  // namespace concentra::detail

namespace concentra {

const std::vector<double>& training_loss_curve(const TrainedModel& model) {
  static const std::vector<double> empty;
  if (model.family() != Family::GradientBoosting) return empty;
  return static_cast<const detail::GradientBoostingModel&>(model).loss_curve();
}

}  // namespace concentra

#include "families.hpp"

#include <cmath>

namespace concentra::detail {

namespace {

class GaussianNbModel final : public TrainedModel {
 public:
  GaussianNbModel(std::vector<std::string> manifest, std::vector<int> classes, Vector log_priors, Matrix means,
                  Matrix vars)
      : TrainedModel(Family::GaussianNb, std::move(manifest), std::move(classes)),
        log_priors_(std::move(log_priors)),
        means_(std::move(means)),
        vars_(std::move(vars)) {}

 protected:
  int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
    const int K = static_cast<int>(classes_.size());
    Vector scores(K);
    for (int c = 0; c < K; ++c) {
      const auto diff = (x - means_.row(c)).array();
      const auto var = vars_.row(c).array();
      scores(c) = log_priors_(c) - 0.5 * ((2.0 * M_PI * var).log() + diff.square() / var).sum();
    }
    return classes_[static_cast<std::size_t>(argmax_smallest(scores))];
  }

  void save_params(std::ostream& out) const override {
    ModelWriter w(out);
    w.word("log_priors");
    w.row(log_priors_.transpose());
    w.word("means");
    for (Eigen::Index c = 0; c < means_.rows(); ++c) w.row(means_.row(c));
    w.word("vars");
    for (Eigen::Index c = 0; c < vars_.rows(); ++c) w.row(vars_.row(c));
  }

 private:
  Vector log_priors_;  // per class
  Matrix means_;       // K x d
  Matrix vars_;        // K x d, floored
};

}  // namespace

std::unique_ptr<TrainedModel> fit_gaussian_nb(const FitContext& ctx) {
  const int K = static_cast<int>(ctx.classes.size());
  const auto d = ctx.X.cols();
  const auto n = ctx.X.rows();
  const double var_floor = ctx.spec.get("var_floor", 1e-9);

  Vector counts = Vector::Zero(K);
  Matrix means = Matrix::Zero(K, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = ctx.class_ids[static_cast<std::size_t>(i)];
    counts(c) += 1.0;
    means.row(c) += ctx.X.row(i);
  }
  for (int c = 0; c < K; ++c) means.row(c) /= counts(c);

  Matrix vars = Matrix::Zero(K, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = ctx.class_ids[static_cast<std::size_t>(i)];
    vars.row(c) += (ctx.X.row(i) - means.row(c)).array().square().matrix();
  }
  for (int c = 0; c < K; ++c) {
    vars.row(c) = (vars.row(c) / counts(c)).cwiseMax(var_floor);
  }

  Vector log_priors(K);
  for (int c = 0; c < K; ++c) log_priors(c) = std::log(counts(c) / static_cast<double>(n));

  return std::make_unique<GaussianNbModel>(ctx.manifest, ctx.classes, std::move(log_priors), std::move(means),
                                           std::move(vars));
}

std::unique_ptr<TrainedModel> load_gaussian_nb(ModelReader& r, std::vector<std::string> manifest,
                                               std::vector<int> classes) {
  const auto K = static_cast<Eigen::Index>(classes.size());
  const auto d = static_cast<Eigen::Index>(manifest.size());
  r.expect("log_priors");
  Vector log_priors(K);
  Eigen::RowVectorXd tmp(K);
  r.fill(tmp);
  log_priors = tmp.transpose();
  r.expect("means");
  Matrix means(K, d);
  for (Eigen::Index c = 0; c < K; ++c) {
    Eigen::RowVectorXd row(d);
    r.fill(row);
    means.row(c) = row;
  }
  r.expect("vars");
  Matrix vars(K, d);
  for (Eigen::Index c = 0; c < K; ++c) {
    Eigen::RowVectorXd row(d);
    r.fill(row);
    vars.row(c) = row;
  }
  return std::make_unique<GaussianNbModel>(std::move(manifest), std::move(classes), std::move(log_priors),
                                           std::move(means), std::move(vars));
}

}  // namespace concentra::detail

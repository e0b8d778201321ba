#include "families.hpp"

#include <cmath>

namespace concentra {

namespace {

// Row-wise softmax with the usual max subtraction.
Matrix softmax_rows(const Matrix& scores) {
  Matrix p = (scores.colwise() - scores.rowwise().maxCoeff()).array().exp();
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  return p;
}

}  // namespace

double LogisticObjective::loss(const Matrix& W, const Vector& b) const {
  const auto n = X.rows();
  Matrix scores = X * W.transpose();
  scores.rowwise() += b.transpose();
  const Matrix p = softmax_rows(scores);
  double nll = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    nll -= std::log(std::max(p(i, class_ids[static_cast<std::size_t>(i)]), 1e-300));
  }
  return nll / static_cast<double>(n) + 0.5 * l2 * W.squaredNorm();
}

void LogisticObjective::gradient(const Matrix& W, const Vector& b, Matrix& grad_w, Vector& grad_b) const {
  const auto n = X.rows();
  Matrix scores = X * W.transpose();
  scores.rowwise() += b.transpose();
  Matrix p = softmax_rows(scores);
  for (Eigen::Index i = 0; i < n; ++i) p(i, class_ids[static_cast<std::size_t>(i)]) -= 1.0;
  grad_w = (p.transpose() * X) / static_cast<double>(n) + l2 * W;
  grad_b = p.colwise().sum().transpose() / static_cast<double>(n);
}

}  // namespace concentra

namespace concentra::detail {

namespace {

class LogisticModel final : public TrainedModel {
 public:
  LogisticModel(std::vector<std::string> manifest, std::vector<int> classes, Standardizer standardizer, Matrix W,
                Vector b)
      : TrainedModel(Family::LogisticRegression, std::move(manifest), std::move(classes)),
        standardizer_(std::move(standardizer)),
        weights_(std::move(W)),
        bias_(std::move(b)) {}

 protected:
  int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
    const Eigen::RowVectorXd z = standardizer_.transform_row(x);
    const Vector scores = weights_ * z.transpose() + bias_;
    return classes_[static_cast<std::size_t>(argmax_smallest(scores))];
  }

  void save_params(std::ostream& out) const override {
    ModelWriter w(out);
    standardizer_.save(w);
    w.word("weights");
    for (Eigen::Index c = 0; c < weights_.rows(); ++c) w.row(weights_.row(c));
    w.word("bias");
    w.row(bias_.transpose());
  }

 private:
  Standardizer standardizer_;
  Matrix weights_;  // K x d
  Vector bias_;     // K
};

}  // namespace

std::unique_ptr<TrainedModel> fit_logistic(const FitContext& ctx) {
  const double lr = ctx.spec.get("learning_rate", 0.1);
  const int epochs = static_cast<int>(ctx.spec.get("epochs", 500));
  const double l2 = ctx.spec.get("l2", 1e-4);
  const int K = static_cast<int>(ctx.classes.size());
  const auto d = ctx.X.cols();

  Standardizer standardizer;
  standardizer.fit(ctx.X);
  const Matrix Xs = standardizer.transform(ctx.X);

  Matrix W = Matrix::Zero(K, d);
  Vector b = Vector::Zero(K);
  const LogisticObjective objective{Xs, ctx.class_ids, K, l2};
  Matrix grad_w(K, d);
  Vector grad_b(K);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    objective.gradient(W, b, grad_w, grad_b);
    W -= lr * grad_w;
    b -= lr * grad_b;
  }
  return std::make_unique<LogisticModel>(ctx.manifest, ctx.classes, std::move(standardizer), std::move(W),
                                         std::move(b));
}

std::unique_ptr<TrainedModel> load_logistic(ModelReader& r, std::vector<std::string> manifest,
                                            std::vector<int> classes) {
  const auto K = static_cast<Eigen::Index>(classes.size());
  const auto d = static_cast<Eigen::Index>(manifest.size());
  Standardizer standardizer;
  standardizer.load(r, d);
  r.expect("weights");
  Matrix W(K, d);
  for (Eigen::Index c = 0; c < K; ++c) {
    Eigen::RowVectorXd row(d);
    r.fill(row);
    W.row(c) = row;
  }
  r.expect("bias");
  Eigen::RowVectorXd tmp(K);
  r.fill(tmp);
  return std::make_unique<LogisticModel>(std::move(manifest), std::move(classes), std::move(standardizer),
                                         std::move(W), tmp.transpose());
}

}  // namespace concentra::detail

#include "families.hpp"

#include <algorithm>
#include <numeric>

namespace concentra::detail {

namespace {

class KnnModel final : public TrainedModel {
 public:
  KnnModel(std::vector<std::string> manifest, std::vector<int> classes, int k, Standardizer standardizer,
           Matrix train, std::vector<int> train_class_ids)
      : TrainedModel(Family::Knn, std::move(manifest), std::move(classes)),
        k_(k),
        standardizer_(std::move(standardizer)),
        train_(std::move(train)),
        train_class_ids_(std::move(train_class_ids)) {}

 protected:
  int predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
    const Eigen::RowVectorXd z = standardizer_.transform_row(x);
    const Vector dist2 = (train_.rowwise() - z).rowwise().squaredNorm();

    const int n = static_cast<int>(train_.rows());
    const int k = std::min(k_, n);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // Neighbor order: distance, then training index, so equal distances
    // resolve deterministically.
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
      if (dist2(a) != dist2(b)) return dist2(a) < dist2(b);
      return a < b;
    });

    Vector votes = Vector::Zero(static_cast<Eigen::Index>(classes_.size()));
    for (int i = 0; i < k; ++i) votes(train_class_ids_[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]) += 1.0;
    return classes_[static_cast<std::size_t>(argmax_smallest(votes))];
  }

  void save_params(std::ostream& out) const override {
    ModelWriter w(out);
    w.key("k", static_cast<std::int64_t>(k_));
    standardizer_.save(w);
    w.key("train", static_cast<std::int64_t>(train_.rows()));
    for (Eigen::Index i = 0; i < train_.rows(); ++i) {
      w.raw() << train_class_ids_[static_cast<std::size_t>(i)] << ' ';
      w.row(train_.row(i));
    }
  }

 private:
  int k_;
  Standardizer standardizer_;
  Matrix train_;  // standardized
  std::vector<int> train_class_ids_;
};

}  // namespace

std::unique_ptr<TrainedModel> fit_knn(const FitContext& ctx) {
  const int k = static_cast<int>(ctx.spec.get("k", 10));
  Standardizer standardizer;
  standardizer.fit(ctx.X);
  Matrix train = standardizer.transform(ctx.X);
  return std::make_unique<KnnModel>(ctx.manifest, ctx.classes, k, std::move(standardizer), std::move(train),
                                    ctx.class_ids);
}

std::unique_ptr<TrainedModel> load_knn(ModelReader& r, std::vector<std::string> manifest, std::vector<int> classes) {
  r.expect("k");
  const int k = static_cast<int>(r.integer());
  Standardizer standardizer;
  const auto d = static_cast<Eigen::Index>(manifest.size());
  standardizer.load(r, d);
  r.expect("train");
  const auto n = r.integer();
  Matrix train(n, d);
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    ids[static_cast<std::size_t>(i)] = static_cast<int>(r.integer());
    Eigen::RowVectorXd row(d);
    r.fill(row);
    train.row(i) = row;
  }
  return std::make_unique<KnnModel>(std::move(manifest), std::move(classes), k, std::move(standardizer),
                                    std::move(train), std::move(ids));
}

}  // namespace concentra::detail

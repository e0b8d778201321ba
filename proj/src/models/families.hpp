#pragma once

#include "concentra/csv.hpp"
#include "concentra/models.hpp"

#include "tree_builder.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace concentra::detail {

// Whitespace-token serialization; doubles go through the shortest round-trip
// form so loading restores exact bits.
class ModelWriter {
 public:
  explicit ModelWriter(std::ostream& out) : out_(out) {}

  void word(std::string_view w) { out_ << w << '\n'; }
  void key(std::string_view k, std::string_view v) { out_ << k << ' ' << v << '\n'; }
  void key(std::string_view k, std::int64_t v) { out_ << k << ' ' << v << '\n'; }
  void row(const Eigen::Ref<const Eigen::RowVectorXd>& values) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (i > 0) out_ << ' ';
      out_ << csv::format_double(values(i));
    }
    out_ << '\n';
  }

  std::ostream& raw() { return out_; }

 private:
  std::ostream& out_;
};

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::string token();
  void expect(std::string_view keyword);
  double number();
  std::int64_t integer();
  void fill(Eigen::Ref<Eigen::RowVectorXd> values);

 private:
  std::istream& in_;
};

struct Standardizer {
  Vector mean;
  Vector scale;  // population std; zero-variance columns get scale 1

  void fit(const Matrix& X);
  Matrix transform(const Matrix& X) const;
  Eigen::RowVectorXd transform_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  void save(ModelWriter& w) const;
  void load(ModelReader& r, Eigen::Index d);
};

struct FitContext {
  const Matrix& X;
  const std::vector<int>& class_ids;  // [0, K)
  const std::vector<int>& classes;    // ascending labels
  const std::vector<std::string>& manifest;
  const ClassifierSpec& spec;
};

std::unique_ptr<TrainedModel> fit_gaussian_nb(const FitContext& ctx);
std::unique_ptr<TrainedModel> fit_knn(const FitContext& ctx);
std::unique_ptr<TrainedModel> fit_logistic(const FitContext& ctx);
std::unique_ptr<TrainedModel> fit_decision_tree(const FitContext& ctx);
std::unique_ptr<TrainedModel> fit_random_forest(const FitContext& ctx);
std::unique_ptr<TrainedModel> fit_gradient_boosting(const FitContext& ctx);

std::unique_ptr<TrainedModel> load_family(Family family, ModelReader& reader, std::vector<std::string> manifest,
                                          std::vector<int> classes);

// Shared by tree families.
void save_tree(ModelWriter& w, const Tree& tree);
Tree load_tree(ModelReader& r);

// Index of the strictly largest entry, smallest index on ties.
int argmax_smallest(const Eigen::Ref<const Vector>& scores);

}  // namespace concentra::detail

#pragma once

#include "concentra/rng.hpp"
#include "concentra/types.hpp"

#include <functional>
#include <vector>

namespace concentra::detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;  // regression output
  int label = 0;     // classification output (class id)
};

struct Tree {
  std::vector<TreeNode> nodes;

  int leaf_of(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
      i = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return i;
  }

  double predict_value(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return nodes[static_cast<std::size_t>(leaf_of(x))].value;
  }

  int predict_label(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return nodes[static_cast<std::size_t>(leaf_of(x))].label;
  }
};

// Row orderings per feature (ascending value, ties by row index), computed
// once per training matrix and shared across every tree grown on it.
struct SortedColumns {
  const Matrix* X = nullptr;
  std::vector<std::vector<int>> order;

  static SortedColumns build(const Matrix& X);
};

struct TreeGrowParams {
  int max_depth = 5;
  int min_samples_split = 2;
  int max_features = -1;  // -1 or >= d: consider all features
  Rng* rng = nullptr;     // feature-subset draws; required when subsetting
};

// Gini-greedy classification tree; split thresholds are midpoints between
// consecutive distinct values. `weights` holds per-row multiplicities
// (bootstrap); nullptr means one each. `importance`, when given, accumulates
// count-weighted impurity decrease per feature.
Tree grow_classification_tree(const SortedColumns& cols, const std::vector<int>& class_ids, int n_classes,
                              const std::vector<int>* weights, const TreeGrowParams& params,
                              std::vector<double>* importance);

using LeafValueFn = std::function<double(const std::vector<int>& rows)>;

// Variance-greedy regression tree on per-row targets (unit weights). Leaf
// values come from `leaf_value` (mean when empty). `train_values`, when
// given, receives each training row's leaf value.
Tree grow_regression_tree(const SortedColumns& cols, const Vector& targets, const TreeGrowParams& params,
                          const LeafValueFn& leaf_value, std::vector<double>* importance,
                          std::vector<double>* train_values);

}  // namespace concentra::detail

#include "tree_builder.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace concentra::detail {

namespace {

constexpr double kMinDecrease = 1e-12;

struct BestSplit {
  double decrease = 0;
  int feature = -1;
  double threshold = 0;
};

}  // namespace

SortedColumns SortedColumns::build(const Matrix& X) {
  SortedColumns cols;
  cols.X = &X;
  const auto n = static_cast<int>(X.rows());
  const auto d = static_cast<int>(X.cols());
  cols.order.resize(static_cast<std::size_t>(d));
  std::vector<int> base(static_cast<std::size_t>(n));
  std::iota(base.begin(), base.end(), 0);
  for (int f = 0; f < d; ++f) {
    auto& ord = cols.order[static_cast<std::size_t>(f)];
    ord = base;
    const double* col = X.col(f).data();
    std::sort(ord.begin(), ord.end(), [col](int a, int b) {
      if (col[a] != col[b]) return col[a] < col[b];
      return a < b;
    });
  }
  return cols;
}

Tree grow_classification_tree(const SortedColumns& cols, const std::vector<int>& class_ids, int n_classes,
                              const std::vector<int>* weights, const TreeGrowParams& params,
                              std::vector<double>* importance) {
  const Matrix& X = *cols.X;
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const int K = n_classes;
  const bool subset_features = params.max_features > 0 && params.max_features < d;

  Tree tree;
  tree.nodes.push_back({});
  std::vector<int> node_of(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n; ++r) {
    if (weights != nullptr && (*weights)[static_cast<std::size_t>(r)] == 0) node_of[static_cast<std::size_t>(r)] = -1;
  }

  // Per-node aggregates, indexed by node id.
  std::vector<std::vector<double>> node_counts;
  std::vector<double> node_n;
  node_counts.emplace_back(static_cast<std::size_t>(K), 0.0);
  node_n.push_back(0.0);
  for (int r = 0; r < n; ++r) {
    if (node_of[static_cast<std::size_t>(r)] < 0) continue;
    const double w = weights != nullptr ? (*weights)[static_cast<std::size_t>(r)] : 1.0;
    node_counts[0][static_cast<std::size_t>(class_ids[static_cast<std::size_t>(r)])] += w;
    node_n[0] += w;
  }

  const auto majority = [&](int node) {
    int best = 0;
    double best_count = -1;
    for (int c = 0; c < K; ++c) {
      const double count = node_counts[static_cast<std::size_t>(node)][static_cast<std::size_t>(c)];
      if (count > best_count) {
        best_count = count;
        best = c;
      }
    }
    return best;
  };

  const auto sum_sq_over_n = [&](const std::vector<double>& counts, double total) {
    double q = 0;
    for (const double c : counts) q += c * c;
    return q / total;
  };

  int level_begin = 0;
  int level_end = 1;
  for (int depth = 0; depth < params.max_depth && level_begin < level_end; ++depth) {
    const int level_count = level_end - level_begin;

    std::vector<std::uint8_t> splittable(static_cast<std::size_t>(level_count), 0);
    bool any = false;
    for (int li = 0; li < level_count; ++li) {
      const int node = level_begin + li;
      const double total = node_n[static_cast<std::size_t>(node)];
      bool pure = false;
      for (int c = 0; c < K; ++c) {
        if (node_counts[static_cast<std::size_t>(node)][static_cast<std::size_t>(c)] == total) pure = true;
      }
      if (total >= params.min_samples_split && !pure) {
        splittable[static_cast<std::size_t>(li)] = 1;
        any = true;
      }
    }
    if (!any) break;

    // Feature subsets drawn per splittable node, in node order.
    std::vector<std::uint8_t> feature_mask;
    if (subset_features) {
      feature_mask.assign(static_cast<std::size_t>(level_count) * static_cast<std::size_t>(d), 0);
      std::vector<int> scratch;
      for (int li = 0; li < level_count; ++li) {
        if (!splittable[static_cast<std::size_t>(li)]) continue;
        const auto picked = params.rng->sample_without_replacement(d, params.max_features, scratch);
        for (const int f : picked) {
          feature_mask[static_cast<std::size_t>(li) * static_cast<std::size_t>(d) + static_cast<std::size_t>(f)] = 1;
        }
      }
    }

    std::vector<BestSplit> best(static_cast<std::size_t>(level_count));
    std::vector<double> parent_q(static_cast<std::size_t>(level_count), 0.0);
    for (int li = 0; li < level_count; ++li) {
      if (splittable[static_cast<std::size_t>(li)]) {
        const int node = level_begin + li;
        parent_q[static_cast<std::size_t>(li)] =
            sum_sq_over_n(node_counts[static_cast<std::size_t>(node)], node_n[static_cast<std::size_t>(node)]);
      }
    }

    // Scan state per (node-in-level): left counts, left total, last value.
    std::vector<double> left_counts(static_cast<std::size_t>(level_count) * static_cast<std::size_t>(K));
    std::vector<double> left_n(static_cast<std::size_t>(level_count));
    std::vector<double> last_value(static_cast<std::size_t>(level_count));
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(level_count));

    for (int f = 0; f < d; ++f) {
      std::memset(left_counts.data(), 0, left_counts.size() * sizeof(double));
      std::memset(left_n.data(), 0, left_n.size() * sizeof(double));
      std::memset(seen.data(), 0, seen.size());

      const double* col = X.col(f).data();
      for (const int r : cols.order[static_cast<std::size_t>(f)]) {
        const int node = node_of[static_cast<std::size_t>(r)];
        if (node < level_begin) continue;
        const int li = node - level_begin;
        if (!splittable[static_cast<std::size_t>(li)]) continue;
        if (subset_features &&
            !feature_mask[static_cast<std::size_t>(li) * static_cast<std::size_t>(d) + static_cast<std::size_t>(f)]) {
          continue;
        }
        const double v = col[r];
        double* cl = left_counts.data() + static_cast<std::size_t>(li) * static_cast<std::size_t>(K);
        if (seen[static_cast<std::size_t>(li)] && v > last_value[static_cast<std::size_t>(li)]) {
          const double nl = left_n[static_cast<std::size_t>(li)];
          const double nr = node_n[static_cast<std::size_t>(level_begin + li)] - nl;
          double ql = 0, qr = 0;
          const double* pc = node_counts[static_cast<std::size_t>(level_begin + li)].data();
          for (int c = 0; c < K; ++c) {
            ql += cl[c] * cl[c];
            const double cr = pc[c] - cl[c];
            qr += cr * cr;
          }
          const double decrease = ql / nl + qr / nr - parent_q[static_cast<std::size_t>(li)];
          if (decrease > best[static_cast<std::size_t>(li)].decrease) {
            best[static_cast<std::size_t>(li)] = {decrease, f, (last_value[static_cast<std::size_t>(li)] + v) / 2.0};
          }
        }
        const double w = weights != nullptr ? (*weights)[static_cast<std::size_t>(r)] : 1.0;
        cl[class_ids[static_cast<std::size_t>(r)]] += w;
        left_n[static_cast<std::size_t>(li)] += w;
        last_value[static_cast<std::size_t>(li)] = v;
        seen[static_cast<std::size_t>(li)] = 1;
      }
    }

    // Materialize splits and advance the frontier.
    std::vector<int> left_child(static_cast<std::size_t>(level_count), -1);
    const int next_begin = static_cast<int>(tree.nodes.size());
    for (int li = 0; li < level_count; ++li) {
      const BestSplit& b = best[static_cast<std::size_t>(li)];
      if (!splittable[static_cast<std::size_t>(li)] || b.feature < 0 || b.decrease <= kMinDecrease) continue;
      const int node = level_begin + li;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];  // after growth: references stay valid
      nd.feature = b.feature;
      nd.threshold = b.threshold;
      nd.left = left;
      nd.right = left + 1;
      left_child[static_cast<std::size_t>(li)] = left;
      node_counts.emplace_back(static_cast<std::size_t>(K), 0.0);
      node_counts.emplace_back(static_cast<std::size_t>(K), 0.0);
      node_n.push_back(0.0);
      node_n.push_back(0.0);
      if (importance != nullptr) (*importance)[static_cast<std::size_t>(b.feature)] += b.decrease;
    }

    for (int r = 0; r < n; ++r) {
      const int node = node_of[static_cast<std::size_t>(r)];
      if (node < level_begin) continue;
      const int li = node - level_begin;
      if (left_child[static_cast<std::size_t>(li)] < 0) continue;
      const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      const int child = X(r, nd.feature) <= nd.threshold ? nd.left : nd.right;
      node_of[static_cast<std::size_t>(r)] = child;
      const double w = weights != nullptr ? (*weights)[static_cast<std::size_t>(r)] : 1.0;
      node_counts[static_cast<std::size_t>(child)][static_cast<std::size_t>(class_ids[static_cast<std::size_t>(r)])] += w;
      node_n[static_cast<std::size_t>(child)] += w;
    }

    level_begin = next_begin;
    level_end = static_cast<int>(tree.nodes.size());
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].feature < 0) tree.nodes[i].label = majority(static_cast<int>(i));
  }
  return tree;
}

Tree grow_regression_tree(const SortedColumns& cols, const Vector& targets, const TreeGrowParams& params,
                          const LeafValueFn& leaf_value, std::vector<double>* importance,
                          std::vector<double>* train_values) {
  const Matrix& X = *cols.X;
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const bool subset_features = params.max_features > 0 && params.max_features < d;

  Tree tree;
  tree.nodes.push_back({});
  std::vector<int> node_of(static_cast<std::size_t>(n), 0);

  std::vector<double> node_sum{targets.sum()};
  std::vector<double> node_sumsq{targets.array().square().sum()};
  std::vector<double> node_n{static_cast<double>(n)};

  int level_begin = 0;
  int level_end = 1;
  for (int depth = 0; depth < params.max_depth && level_begin < level_end; ++depth) {
    const int level_count = level_end - level_begin;

    std::vector<std::uint8_t> splittable(static_cast<std::size_t>(level_count), 0);
    bool any = false;
    for (int li = 0; li < level_count; ++li) {
      const int node = level_begin + li;
      const double total = node_n[static_cast<std::size_t>(node)];
      const double sse = node_sumsq[static_cast<std::size_t>(node)] -
                         node_sum[static_cast<std::size_t>(node)] * node_sum[static_cast<std::size_t>(node)] / total;
      if (total >= params.min_samples_split && sse > kMinDecrease) {
        splittable[static_cast<std::size_t>(li)] = 1;
        any = true;
      }
    }
    if (!any) break;

    std::vector<std::uint8_t> feature_mask;
    if (subset_features) {
      feature_mask.assign(static_cast<std::size_t>(level_count) * static_cast<std::size_t>(d), 0);
      std::vector<int> scratch;
      for (int li = 0; li < level_count; ++li) {
        if (!splittable[static_cast<std::size_t>(li)]) continue;
        const auto picked = params.rng->sample_without_replacement(d, params.max_features, scratch);
        for (const int f : picked) {
          feature_mask[static_cast<std::size_t>(li) * static_cast<std::size_t>(d) + static_cast<std::size_t>(f)] = 1;
        }
      }
    }

    std::vector<BestSplit> best(static_cast<std::size_t>(level_count));
    std::vector<double> parent_q(static_cast<std::size_t>(level_count), 0.0);
    for (int li = 0; li < level_count; ++li) {
      if (splittable[static_cast<std::size_t>(li)]) {
        const int node = level_begin + li;
        parent_q[static_cast<std::size_t>(li)] =
            node_sum[static_cast<std::size_t>(node)] * node_sum[static_cast<std::size_t>(node)] /
            node_n[static_cast<std::size_t>(node)];
      }
    }

    std::vector<double> left_sum(static_cast<std::size_t>(level_count));
    std::vector<double> left_n(static_cast<std::size_t>(level_count));
    std::vector<double> last_value(static_cast<std::size_t>(level_count));
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(level_count));

    for (int f = 0; f < d; ++f) {
      std::memset(left_sum.data(), 0, left_sum.size() * sizeof(double));
      std::memset(left_n.data(), 0, left_n.size() * sizeof(double));
      std::memset(seen.data(), 0, seen.size());

      const double* col = X.col(f).data();
      for (const int r : cols.order[static_cast<std::size_t>(f)]) {
        const int node = node_of[static_cast<std::size_t>(r)];
        if (node < level_begin) continue;
        const int li = node - level_begin;
        if (!splittable[static_cast<std::size_t>(li)]) continue;
        if (subset_features &&
            !feature_mask[static_cast<std::size_t>(li) * static_cast<std::size_t>(d) + static_cast<std::size_t>(f)]) {
          continue;
        }
        const double v = col[r];
        if (seen[static_cast<std::size_t>(li)] && v > last_value[static_cast<std::size_t>(li)]) {
          const double nl = left_n[static_cast<std::size_t>(li)];
          const double nr = node_n[static_cast<std::size_t>(level_begin + li)] - nl;
          const double sl = left_sum[static_cast<std::size_t>(li)];
          const double sr = node_sum[static_cast<std::size_t>(level_begin + li)] - sl;
          const double decrease = sl * sl / nl + sr * sr / nr - parent_q[static_cast<std::size_t>(li)];
          if (decrease > best[static_cast<std::size_t>(li)].decrease) {
            best[static_cast<std::size_t>(li)] = {decrease, f, (last_value[static_cast<std::size_t>(li)] + v) / 2.0};
          }
        }
        left_sum[static_cast<std::size_t>(li)] += targets(r);
        left_n[static_cast<std::size_t>(li)] += 1.0;
        last_value[static_cast<std::size_t>(li)] = v;
        seen[static_cast<std::size_t>(li)] = 1;
      }
    }

    std::vector<int> left_child(static_cast<std::size_t>(level_count), -1);
    const int next_begin = static_cast<int>(tree.nodes.size());
    for (int li = 0; li < level_count; ++li) {
      const BestSplit& b = best[static_cast<std::size_t>(li)];
      if (!splittable[static_cast<std::size_t>(li)] || b.feature < 0 || b.decrease <= kMinDecrease) continue;
      const int node = level_begin + li;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      nd.feature = b.feature;
      nd.threshold = b.threshold;
      nd.left = left;
      nd.right = left + 1;
      left_child[static_cast<std::size_t>(li)] = left;
      node_sum.push_back(0.0);
      node_sum.push_back(0.0);
      node_sumsq.push_back(0.0);
      node_sumsq.push_back(0.0);
      node_n.push_back(0.0);
      node_n.push_back(0.0);
      if (importance != nullptr) (*importance)[static_cast<std::size_t>(b.feature)] += b.decrease;
    }

    for (int r = 0; r < n; ++r) {
      const int node = node_of[static_cast<std::size_t>(r)];
      if (node < level_begin) continue;
      const int li = node - level_begin;
      if (left_child[static_cast<std::size_t>(li)] < 0) continue;
      const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      const int child = X(r, nd.feature) <= nd.threshold ? nd.left : nd.right;
      node_of[static_cast<std::size_t>(r)] = child;
      node_sum[static_cast<std::size_t>(child)] += targets(r);
      node_sumsq[static_cast<std::size_t>(child)] += targets(r) * targets(r);
      node_n[static_cast<std::size_t>(child)] += 1.0;
    }

    level_begin = next_begin;
    level_end = static_cast<int>(tree.nodes.size());
  }

  // Leaf values: rows grouped by their final node.
  std::vector<std::vector<int>> leaf_rows(tree.nodes.size());
  for (int r = 0; r < n; ++r) leaf_rows[static_cast<std::size_t>(node_of[static_cast<std::size_t>(r)])].push_back(r);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].feature >= 0) continue;
    if (leaf_value) {
      tree.nodes[i].value = leaf_value(leaf_rows[i]);
    } else {
      tree.nodes[i].value = node_n[i] > 0 ? node_sum[i] / node_n[i] : 0.0;
    }
  }
  if (train_values != nullptr) {
    train_values->resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      (*train_values)[static_cast<std::size_t>(r)] =
          tree.nodes[static_cast<std::size_t>(node_of[static_cast<std::size_t>(r)])].value;
    }
  }
  return tree;
}

}  // namespace concentra::detail

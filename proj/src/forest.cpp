#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "models_impl.hpp"
#include "tracker/parallel.hpp"
#include "tracker/rng.hpp"

namespace tracker::models {

double gini(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) throw std::invalid_argument("gini: zero total count");
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

namespace detail {
namespace {

struct TreeBuilder {
  const ForestConfig& config;
  const Problem& problem;
  Rng& rng;
  Tree tree;

  int majority(const std::vector<std::size_t>& indices) const {
    std::vector<int> counts(problem.class_count, 0);
    for (auto i : indices) ++counts[problem.labels[i]];
    return static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  bool pure(const std::vector<std::size_t>& indices) const {
    const int first = problem.labels[indices.front()];
    for (auto i : indices)
      if (problem.labels[i] != first) return false;
    return true;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  // Best Gini split for one feature, or nullopt if the feature is constant
  // over these indices.
  void try_feature(int feature, const std::vector<std::size_t>& indices,
                   Split& best) const {
    std::vector<std::pair<double, int>> values;
    values.reserve(indices.size());
    for (auto i : indices)
      values.emplace_back(problem.features[i][feature], problem.labels[i]);
    std::sort(values.begin(), values.end());

    const std::size_t n = values.size();
    std::vector<double> left(problem.class_count, 0.0);
    std::vector<double> right(problem.class_count, 0.0);
    for (const auto& [v, label] : values) right[label] += 1.0;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      left[values[i].second] += 1.0;
      right[values[i].second] -= 1.0;
      if (values[i].first == values[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = static_cast<double>(n - i - 1);
      if (nl < config.min_leaf || nr < config.min_leaf) continue;
      const double impurity = (nl * gini(left) + nr * gini(right)) / (nl + nr);
      if (impurity < best.impurity) {
        best.feature = feature;
        best.threshold = 0.5 * (values[i].first + values[i + 1].first);
        best.impurity = impurity;
      }
    }
  }

  int build(std::vector<std::size_t> indices, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    const bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
    if (indices.size() <= static_cast<std::size_t>(config.min_leaf) ||
        pure(indices) || depth_capped) {
      tree.nodes[node_id].label_index = majority(indices);
      return node_id;
    }

    // mtry features without replacement; if none of them splits, fall back
    // to scanning all features so nodes only become leaves when truly
    // unsplittable
    std::vector<int> candidates(6);
    std::iota(candidates.begin(), candidates.end(), 0);
    for (int i = 0; i < config.mtry; ++i) {
      const std::size_t j = i + rng.uniform_index(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }

    Split best;
    for (int i = 0; i < config.mtry; ++i)
      try_feature(candidates[i], indices, best);
    if (best.feature < 0)
      for (int f = 0; f < 6; ++f) try_feature(f, indices, best);
    if (best.feature < 0) {
      tree.nodes[node_id].label_index = majority(indices);
      return node_id;
    }

    std::vector<std::size_t> left_idx, right_idx;
    for (auto i : indices) {
      if (problem.features[i][best.feature] <= best.threshold)
        left_idx.push_back(i);
      else
        right_idx.push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    tree.nodes[node_id].feature = best.feature;
    tree.nodes[node_id].threshold = best.threshold;
    const int left = build(std::move(left_idx), depth + 1);
    tree.nodes[node_id].left = left;
    const int right = build(std::move(right_idx), depth + 1);
    tree.nodes[node_id].right = right;
    return node_id;
  }
};

}  // namespace

ForestParams train_forest(const ForestConfig& config, const Problem& problem,
                          std::uint64_t seed, int jobs) {
  const std::size_t n = problem.features.size();
  ForestParams params;
  params.trees.resize(config.n_trees);

  parallel_for(config.n_trees, jobs, [&](std::size_t t) {
    Rng rng(split_seed(seed, t));
    std::vector<std::size_t> indices;
    indices.reserve(n);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i)
        indices.push_back(rng.uniform_index(n));
    } else {
      indices.resize(n);
      std::iota(indices.begin(), indices.end(), 0);
    }
    TreeBuilder builder{config, problem, rng, {}};
    builder.build(std::move(indices), 0);
    params.trees[t] = std::move(builder.tree);
  });
  return params;
}

int forest_predict(const ForestParams& params, int class_count,
                   const FeatureVector& features) {
  std::vector<int> votes(class_count, 0);
  for (const auto& tree : params.trees) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
      const auto& nd = tree.nodes[node];
      node = features[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    ++votes[tree.nodes[node].label_index];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                          votes.begin());
}

}  // namespace detail
}  // namespace tracker::models

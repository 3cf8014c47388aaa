#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tracker/dataset.hpp"

namespace tracker::models {

using Sample = std::pair<FeatureVector, double>;

enum class ModelKind { RandomForest, LinearModel, Svm, NeuralNet };

std::string kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);

struct ForestConfig {
  int n_trees = 500;
  int mtry = 2;        // candidate features per split
  int max_depth = 0;   // 0 = unlimited
  int min_leaf = 1;
  bool bootstrap = true;
};

struct LinearConfig {
  int max_iterations = 1000;
  double tolerance = 1e-9;  // relative loss-improvement stop
};

struct SvmConfig {
  double gamma = 1.0 / 6.0;  // RBF width on standardized features
  double cost = 10.0;        // C
  double tolerance = 1e-3;   // KKT tolerance
  int max_sweeps = 2000;
};

struct NNetConfig {
  int hidden_units = 10;
  int max_iterations = 100;
  int max_weights = 10000;
};

struct ModelConfig {
  ModelKind kind = ModelKind::RandomForest;
  ForestConfig forest;
  LinearConfig linear;
  SvmConfig svm;
  NNetConfig nnet;
  std::uint64_t seed = 0;
};

// --- fitted-parameter payloads ---

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label_index = -1;  // into class_levels, leaves only
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestParams {
  std::vector<Tree> trees;
};

struct LinearParams {
  // class_count x 7 row-major; column 0 is the intercept
  std::vector<double> coef;
  // per-iteration negative log-likelihood (not persisted)
  std::vector<double> loss_trace;
};

struct SvmPairParams {
  int class_a = 0;  // y = +1
  int class_b = 0;  // y = -1
  double bias = 0.0;
  std::vector<double> alpha_y;            // alpha_i * y_i per support vector
  std::vector<FeatureVector> support;     // standardized features
};

struct SvmParams {
  double gamma = 0.0;
  std::array<double, 6> mean{};
  std::array<double, 6> stddev{};
  std::vector<SvmPairParams> pairs;
};

struct NNetParams {
  std::array<double, 6> mean{};
  std::array<double, 6> stddev{};
  int hidden_units = 0;
  // weights packed as W1 (hidden x 7) then W2 (classes x hidden+1),
  // column 0 of each block being the bias
  std::vector<double> weights;
};

class TrainedModel {
 public:
  ModelKind kind() const { return kind_; }
  const std::vector<double>& class_levels() const { return class_levels_; }

  double predict(const FeatureVector& features) const;
  std::vector<double> predict_all(const std::vector<FeatureVector>& features) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static TrainedModel load(std::istream& in);
  static TrainedModel load_file(const std::string& path);

  const ForestParams& forest() const { return forest_; }
  const LinearParams& linear() const { return linear_; }
  const SvmParams& svm() const { return svm_; }
  const NNetParams& nnet() const { return nnet_; }
  std::optional<double> constant_label() const { return constant_label_; }

 private:
  friend TrainedModel train(const ModelConfig&, const std::vector<Sample>&, int);
  friend class ModelReader;

  ModelKind kind_ = ModelKind::RandomForest;
  std::vector<double> class_levels_;  // ascending numeric order
  // degenerate-data fallback: always predict this label
  std::optional<double> constant_label_;
  ForestParams forest_;
  LinearParams linear_;
  SvmParams svm_;
  NNetParams nnet_;
};

// Deterministic for a fixed config seed regardless of `jobs`.
TrainedModel train(const ModelConfig& config, const std::vector<Sample>& data,
                   int jobs = 1);

// 1 - sum((c_k/n)^2)
double gini(const std::vector<double>& counts);

// Exposed for the finite-difference gradient check.
namespace nnet {
struct Shape {
  int inputs = 6;
  int hidden = 10;
  int classes = 2;
  int weight_count() const { return hidden * (inputs + 1) + classes * (hidden + 1); }
};

// Mean cross-entropy over the batch; fills `grad` (same layout as weights).
double loss_and_gradient(const Shape& shape, const std::vector<double>& weights,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<int>& labels,
                         std::vector<double>& grad);
}  // namespace nnet

// Binary C-SVC subproblem, exposed so the dual solution can be checked
// directly against the KKT conditions and an independent dual maximizer.
namespace svm {
struct BinarySolution {
  std::vector<double> alpha;
  double bias = 0.0;
};

BinarySolution solve_binary(const std::vector<FeatureVector>& points,
                            const std::vector<int>& labels_pm1,
                            const SvmConfig& config, std::uint64_t seed);

double decision_value(const std::vector<FeatureVector>& points,
                      const std::vector<int>& labels_pm1,
                      const BinarySolution& solution, double gamma,
                      const FeatureVector& query);

double dual_objective(const std::vector<FeatureVector>& points,
                      const std::vector<int>& labels_pm1,
                      const std::vector<double>& alpha, double gamma);

// Largest violation of the KKT conditions over all training points.
double kkt_violation(const std::vector<FeatureVector>& points,
                     const std::vector<int>& labels_pm1,
                     const BinarySolution& solution, const SvmConfig& config);
}  // namespace svm

}  // namespace tracker::models

#pragma once

// Internal interfaces between the per-kind trainers and the dispatcher.

#include <cstdint>
#include <vector>

#include "tracker/models.hpp"

namespace tracker::models::detail {

// Training view: features plus label indices into class_levels.
struct Problem {
  std::vector<FeatureVector> features;
  std::vector<int> labels;  // indices into class_levels
  int class_count = 0;
};

ForestParams train_forest(const ForestConfig& config, const Problem& problem,
                          std::uint64_t seed, int jobs);
int forest_predict(const ForestParams& params, int class_count,
                   const FeatureVector& features);

LinearParams train_linear(const LinearConfig& config, const Problem& problem);
int linear_predict(const LinearParams& params, int class_count,
                   const FeatureVector& features);

SvmParams train_svm(const SvmConfig& config, const Problem& problem,
                    std::uint64_t seed);
int svm_predict(const SvmParams& params, int class_count,
                const FeatureVector& features);

NNetParams train_nnet(const NNetConfig& config, const Problem& problem,
                      std::uint64_t seed);
int nnet_predict(const NNetParams& params, int class_count,
                 const FeatureVector& features);

// mean/stddev over the training features; zero-variance columns get sd 1
void standardize_stats(const std::vector<FeatureVector>& features,
                       std::array<double, 6>& mean, std::array<double, 6>& sd);
FeatureVector standardize(const FeatureVector& f,
                          const std::array<double, 6>& mean,
                          const std::array<double, 6>& sd);
bool all_features_identical(const std::vector<FeatureVector>& features);

}  // namespace tracker::models::detail

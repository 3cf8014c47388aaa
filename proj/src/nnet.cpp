#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "models_impl.hpp"
#include "tracker/rng.hpp"

namespace tracker::models {

namespace nnet {

double loss_and_gradient(const Shape& shape, const std::vector<double>& weights,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<int>& labels,
                         std::vector<double>& grad) {
  const int in = shape.inputs, h = shape.hidden, k = shape.classes;
  if (static_cast<int>(weights.size()) != shape.weight_count())
    throw std::invalid_argument("weight vector size mismatch");
  grad.assign(weights.size(), 0.0);

  const double* w1 = weights.data();                    // h x (in+1)
  const double* w2 = weights.data() + h * (in + 1);     // k x (h+1)
  double* g1 = grad.data();
  double* g2 = grad.data() + h * (in + 1);

  const std::size_t n = inputs.size();
  std::vector<double> hidden(h), scores(k), probs(k), delta_h(h);
  double loss = 0.0;

  for (std::size_t s = 0; s < n; ++s) {
    const auto& x = inputs[s];
    for (int i = 0; i < h; ++i) {
      double z = w1[i * (in + 1)];
      for (int j = 0; j < in; ++j) z += w1[i * (in + 1) + j + 1] * x[j];
      hidden[i] = 1.0 / (1.0 + std::exp(-z));
    }
    double max_score = -1e300;
    for (int c = 0; c < k; ++c) {
      double z = w2[c * (h + 1)];
      for (int i = 0; i < h; ++i) z += w2[c * (h + 1) + i + 1] * hidden[i];
      scores[c] = z;
      max_score = std::max(max_score, z);
    }
    double denom = 0.0;
    for (int c = 0; c < k; ++c) denom += std::exp(scores[c] - max_score);
    for (int c = 0; c < k; ++c) probs[c] = std::exp(scores[c] - max_score) / denom;
    loss += -std::log(std::max(probs[labels[s]], 1e-300));

    // backprop
    std::fill(delta_h.begin(), delta_h.end(), 0.0);
    for (int c = 0; c < k; ++c) {
      const double d = probs[c] - (c == labels[s] ? 1.0 : 0.0);
      g2[c * (h + 1)] += d;
      for (int i = 0; i < h; ++i) {
        g2[c * (h + 1) + i + 1] += d * hidden[i];
        delta_h[i] += d * w2[c * (h + 1) + i + 1];
      }
    }
    for (int i = 0; i < h; ++i) {
      const double d = delta_h[i] * hidden[i] * (1.0 - hidden[i]);
      g1[i * (in + 1)] += d;
      for (int j = 0; j < in; ++j) g1[i * (in + 1) + j + 1] += d * x[j];
    }
  }

  const double scale = 1.0 / static_cast<double>(n);
  for (auto& g : grad) g *= scale;
  return loss * scale;
}

}  // namespace nnet

namespace detail {

NNetParams train_nnet(const NNetConfig& config, const Problem& problem,
                      std::uint64_t seed) {
  NNetParams params;
  params.hidden_units = config.hidden_units;
  standardize_stats(problem.features, params.mean, params.stddev);

  nnet::Shape shape{6, config.hidden_units, problem.class_count};
  if (shape.weight_count() > config.max_weights)
    throw std::invalid_argument("network exceeds max_weights");

  std::vector<std::vector<double>> inputs;
  inputs.reserve(problem.features.size());
  for (const auto& f : problem.features) {
    const FeatureVector s = standardize(f, params.mean, params.stddev);
    inputs.emplace_back(s.begin(), s.end());
  }

  Rng rng(seed);
  std::vector<double> w(shape.weight_count());
  for (auto& v : w) v = rng.uniform(-0.5, 0.5);

  // iRPROP- full-batch training
  std::vector<double> grad, prev_grad(w.size(), 0.0), step(w.size(), 0.1);
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    nnet::loss_and_gradient(shape, w, inputs, problem.labels, grad);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double sign_change = grad[j] * prev_grad[j];
      if (sign_change > 0.0)
        step[j] = std::min(step[j] * 1.2, 50.0);
      else if (sign_change < 0.0) {
        step[j] = std::max(step[j] * 0.5, 1e-6);
        grad[j] = 0.0;
      }
      if (grad[j] > 0.0)
        w[j] -= step[j];
      else if (grad[j] < 0.0)
        w[j] += step[j];
      prev_grad[j] = grad[j];
    }
  }

  params.weights = std::move(w);
  return params;
}

int nnet_predict(const NNetParams& params, int class_count,
                 const FeatureVector& features) {
  const FeatureVector s = standardize(features, params.mean, params.stddev);
  const int h = params.hidden_units;
  const double* w1 = params.weights.data();
  const double* w2 = params.weights.data() + h * 7;

  std::vector<double> hidden(h);
  for (int i = 0; i < h; ++i) {
    double z = w1[i * 7];
    for (int j = 0; j < 6; ++j) z += w1[i * 7 + j + 1] * s[j];
    hidden[i] = 1.0 / (1.0 + std::exp(-z));
  }
  int best = 0;
  double best_score = -1e300;
  for (int c = 0; c < class_count; ++c) {
    double z = w2[c * (h + 1)];
    for (int i = 0; i < h; ++i) z += w2[c * (h + 1) + i + 1] * hidden[i];
    if (z > best_score) {
      best_score = z;
      best = c;
    }
  }
  return best;
}

}  // namespace detail
}  // namespace tracker::models

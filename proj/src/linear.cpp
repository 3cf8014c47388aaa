#include <algorithm>
#include <cmath>
#include <vector>

#include "models_impl.hpp"

namespace tracker::models::detail {

namespace {

constexpr int kCols = 7;  // intercept + six features

// negative log-likelihood and gradient of the multinomial logit, coef is
// class_count x 7 row-major
double nll_and_gradient(const Problem& problem, const std::vector<double>& coef,
                        std::vector<double>* grad) {
  const int k = problem.class_count;
  const std::size_t n = problem.features.size();
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);

  double loss = 0.0;
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < n; ++i) {
    double row[kCols] = {1.0};
    for (int j = 0; j < 6; ++j) row[j + 1] = problem.features[i][j];

    double max_score = -1e300;
    for (int c = 0; c < k; ++c) {
      double s = 0.0;
      for (int j = 0; j < kCols; ++j) s += coef[c * kCols + j] * row[j];
      scores[c] = s;
      max_score = std::max(max_score, s);
    }
    double denom = 0.0;
    for (int c = 0; c < k; ++c) denom += std::exp(scores[c] - max_score);
    const int y = problem.labels[i];
    loss += -(scores[y] - max_score) + std::log(denom);

    if (grad) {
      for (int c = 0; c < k; ++c) {
        const double p = std::exp(scores[c] - max_score) / denom;
        const double delta = p - (c == y ? 1.0 : 0.0);
        for (int j = 0; j < kCols; ++j) (*grad)[c * kCols + j] += delta * row[j];
      }
    }
  }
  return loss;
}

}  // namespace

LinearParams train_linear(const LinearConfig& config, const Problem& problem) {
  const int k = problem.class_count;
  std::vector<double> coef(static_cast<std::size_t>(k) * kCols, 0.0);
  std::vector<double> grad(coef.size());
  std::vector<double> trial(coef.size());

  double loss = nll_and_gradient(problem, coef, &grad);
  double step = 1.0 / static_cast<double>(problem.features.size());
  std::vector<double> loss_trace{loss};

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    double grad_norm_sq = 0.0;
    for (double g : grad) grad_norm_sq += g * g;
    if (grad_norm_sq == 0.0) break;

    // backtracking keeps the loss monotone non-increasing
    double trial_loss;
    while (true) {
      for (std::size_t j = 0; j < coef.size(); ++j)
        trial[j] = coef[j] - step * grad[j];
      trial_loss = nll_and_gradient(problem, trial, nullptr);
      if (trial_loss <= loss || step < 1e-18) break;
      step *= 0.5;
    }
    if (trial_loss > loss) break;

    coef.swap(trial);
    const double improvement = loss - trial_loss;
    loss = trial_loss;
    loss_trace.push_back(loss);
    nll_and_gradient(problem, coef, &grad);
    step *= 2.0;
    if (improvement <= config.tolerance * (1.0 + std::abs(loss))) break;
  }

  LinearParams params;
  params.coef = std::move(coef);
  params.loss_trace = std::move(loss_trace);
  return params;
}

int linear_predict(const LinearParams& params, int class_count,
                   const FeatureVector& features) {
  double row[kCols] = {1.0};
  for (int j = 0; j < 6; ++j) row[j + 1] = features[j];

  int best = 0;
  double best_score = -1e300;
  for (int c = 0; c < class_count; ++c) {
    double s = 0.0;
    for (int j = 0; j < kCols; ++j) s += params.coef[c * kCols + j] * row[j];
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

}  // namespace tracker::models::detail

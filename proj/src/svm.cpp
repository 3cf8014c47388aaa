#include <algorithm>
#include <cmath>
#include <vector>

#include "models_impl.hpp"
#include "tracker/rng.hpp"

namespace tracker::models {

namespace svm {

namespace {

double rbf(const FeatureVector& a, const FeatureVector& b, double gamma) {
  double d2 = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double d = a[j] - b[j];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

}  // namespace

double decision_value(const std::vector<FeatureVector>& points,
                      const std::vector<int>& labels_pm1,
                      const BinarySolution& solution, double gamma,
                      const FeatureVector& query) {
  double f = solution.bias;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (solution.alpha[i] != 0.0)
      f += solution.alpha[i] * labels_pm1[i] * rbf(points[i], query, gamma);
  return f;
}

double dual_objective(const std::vector<FeatureVector>& points,
                      const std::vector<int>& labels_pm1,
                      const std::vector<double>& alpha, double gamma) {
  const std::size_t n = points.size();
  double obj = 0.0;
  for (std::size_t i = 0; i < n; ++i) obj += alpha[i];
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] == 0.0) continue;
      obj -= 0.5 * alpha[i] * alpha[j] * labels_pm1[i] * labels_pm1[j] *
             rbf(points[i], points[j], gamma);
    }
  }
  return obj;
}

double kkt_violation(const std::vector<FeatureVector>& points,
                     const std::vector<int>& labels_pm1,
                     const BinarySolution& solution, const SvmConfig& config) {
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double margin =
        labels_pm1[i] *
        decision_value(points, labels_pm1, solution, config.gamma, points[i]);
    const double a = solution.alpha[i];
    double v = 0.0;
    if (a <= 0.0)
      v = std::max(0.0, 1.0 - margin);          // need margin >= 1
    else if (a >= config.cost)
      v = std::max(0.0, margin - 1.0);          // need margin <= 1
    else
      v = std::abs(margin - 1.0);               // free vector on the margin
    worst = std::max(worst, v);
  }
  return worst;
}

// Sequential minimal optimization; sweeps all points and terminates when a
// full sweep changes nothing.
BinarySolution solve_binary(const std::vector<FeatureVector>& points,
                            const std::vector<int>& labels_pm1,
                            const SvmConfig& config, std::uint64_t seed) {
  const std::size_t n = points.size();
  const double C = config.cost;
  const double tol = config.tolerance;
  Rng rng(seed);

  std::vector<std::vector<double>> K(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      K[i][j] = K[j][i] = rbf(points[i], points[j], config.gamma);

  BinarySolution sol;
  sol.alpha.assign(n, 0.0);
  sol.bias = 0.0;

  auto error = [&](std::size_t i) {
    double f = sol.bias;
    for (std::size_t j = 0; j < n; ++j)
      if (sol.alpha[j] != 0.0) f += sol.alpha[j] * labels_pm1[j] * K[j][i];
    return f - labels_pm1[i];
  };

  auto take_step = [&](std::size_t i, std::size_t j, double ei) {
    if (i == j) return false;
    const double ej = error(j);
    const double yi = labels_pm1[i], yj = labels_pm1[j];
    const double ai_old = sol.alpha[i], aj_old = sol.alpha[j];

    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj_old - ai_old);
      hi = std::min(C, C + aj_old - ai_old);
    } else {
      lo = std::max(0.0, ai_old + aj_old - C);
      hi = std::min(C, ai_old + aj_old);
    }
    if (lo >= hi) return false;

    const double eta = 2.0 * K[i][j] - K[i][i] - K[j][j];
    if (eta >= 0.0) return false;

    double aj = aj_old - yj * (ei - ej) / eta;
    aj = std::clamp(aj, lo, hi);
    if (std::abs(aj - aj_old) < 1e-12 * (aj + aj_old + 1e-12)) return false;
    const double ai = ai_old + yi * yj * (aj_old - aj);

    const double b1 = sol.bias - ei - yi * (ai - ai_old) * K[i][i] -
                      yj * (aj - aj_old) * K[i][j];
    const double b2 = sol.bias - ej - yi * (ai - ai_old) * K[i][j] -
                      yj * (aj - aj_old) * K[j][j];
    sol.alpha[i] = ai;
    sol.alpha[j] = aj;
    if (ai > 0.0 && ai < C)
      sol.bias = b1;
    else if (aj > 0.0 && aj < C)
      sol.bias = b2;
    else
      sol.bias = 0.5 * (b1 + b2);
    return true;
  };

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    int changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = error(i);
      const double ri = ei * labels_pm1[i];
      const bool violates = (ri < -tol && sol.alpha[i] < C) ||
                            (ri > tol && sol.alpha[i] > 0.0);
      if (!violates) continue;

      // second-choice heuristic: largest |Ei - Ej| among free vectors,
      // random fallback
      std::size_t j = n;
      double best_gap = -1.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == i || sol.alpha[c] <= 0.0 || sol.alpha[c] >= C) continue;
        const double gap = std::abs(ei - error(c));
        if (gap > best_gap) {
          best_gap = gap;
          j = c;
        }
      }
      if (j < n && take_step(i, j, ei)) {
        ++changed;
        continue;
      }
      const std::size_t start = rng.uniform_index(n);
      for (std::size_t off = 0; off < n; ++off) {
        j = (start + off) % n;
        if (j != i && take_step(i, j, ei)) {
          ++changed;
          break;
        }
      }
    }
    if (changed == 0) break;
  }
  return sol;
}

}  // namespace svm

namespace detail {

SvmParams train_svm(const SvmConfig& config, const Problem& problem,
                    std::uint64_t seed) {
  SvmParams params;
  params.gamma = config.gamma;
  standardize_stats(problem.features, params.mean, params.stddev);

  std::vector<FeatureVector> standardized(problem.features.size());
  for (std::size_t i = 0; i < problem.features.size(); ++i)
    standardized[i] =
        standardize(problem.features[i], params.mean, params.stddev);

  // one-vs-one over all class pairs
  for (int a = 0; a < problem.class_count; ++a) {
    for (int b = a + 1; b < problem.class_count; ++b) {
      std::vector<FeatureVector> pts;
      std::vector<int> y;
      for (std::size_t i = 0; i < standardized.size(); ++i) {
        if (problem.labels[i] == a) {
          pts.push_back(standardized[i]);
          y.push_back(+1);
        } else if (problem.labels[i] == b) {
          pts.push_back(standardized[i]);
          y.push_back(-1);
        }
      }
      auto sol = svm::solve_binary(
          pts, y, config,
          split_seed(seed, static_cast<std::uint64_t>(a) * 64 + b));

      SvmPairParams pair;
      pair.class_a = a;
      pair.class_b = b;
      pair.bias = sol.bias;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (sol.alpha[i] == 0.0) continue;
        pair.alpha_y.push_back(sol.alpha[i] * y[i]);
        pair.support.push_back(pts[i]);
      }
      params.pairs.push_back(std::move(pair));
    }
  }
  return params;
}

int svm_predict(const SvmParams& params, int class_count,
                const FeatureVector& features) {
  const FeatureVector q = standardize(features, params.mean, params.stddev);
  std::vector<int> votes(class_count, 0);
  for (const auto& pair : params.pairs) {
    double f = pair.bias;
    for (std::size_t i = 0; i < pair.support.size(); ++i) {
      double d2 = 0.0;
      for (int j = 0; j < 6; ++j) {
        const double d = pair.support[i][j] - q[j];
        d2 += d * d;
      }
      f += pair.alpha_y[i] * std::exp(-params.gamma * d2);
    }
    ++votes[f >= 0.0 ? pair.class_a : pair.class_b];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                          votes.begin());
}

}  // namespace detail
}  // namespace tracker::models

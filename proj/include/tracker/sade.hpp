#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tracker/dataset.hpp"
#include "tracker/rng.hpp"

namespace tracker::sade {

enum class Strategy : int {
  Rand1Bin = 0,
  RandToBest2Bin = 1,
  Rand2Bin = 2,
  CurrentToRand1 = 3,
};
inline constexpr int kNumStrategies = 4;

struct SadeConfig {
  int population_size = 50;
  int max_generations = 300;
  int learning_period = 50;      // LP, generations
  double scale_factor = 0.5;     // DE differential weight F
  double mutation_rate = 0.01;   // per-component random-reset probability
  double crossover_rate = 0.9;   // CR for binomial crossover
  double epsilon = 0.01;         // floor in the probability update
  std::vector<std::pair<double, double>> bounds;  // per-dimension [low, high]
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct Individual {
  std::vector<double> position;
  double fitness = 0.0;
};

// Success/failure memories are sliding windows over the last LP generations.
struct StrategyState {
  std::array<double, kNumStrategies> probabilities{0.25, 0.25, 0.25, 0.25};
  std::deque<std::array<int, kNumStrategies>> success_window;
  std::deque<std::array<int, kNumStrategies>> failure_window;
};

struct GenerationTrace {
  int generation = 0;
  double best_fitness = 0.0;
  std::array<double, kNumStrategies> probabilities{};
};

struct SadeResult {
  std::vector<double> best_position;
  double best_fitness = 0.0;
  std::vector<GenerationTrace> trace;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Sum of absolute residuals |T_m - w . P_m| over all records; weights are the
// six per-feature coefficients, each required in [0, 1].
double objective_eq1(const Dataset& dataset, Target target,
                     const std::vector<double>& weights);

// Canonical DE mutants. Donor indices are drawn distinct from each other and
// from target_index.
std::vector<double> mutate(const std::vector<Individual>& population,
                           std::size_t target_index, std::size_t best_index,
                           Strategy strategy, double scale_factor, Rng& rng);

enum class CrossoverKind { Binomial, ArithmeticNone };

std::vector<double> crossover(const std::vector<double>& target,
                              const std::vector<double>& mutant,
                              double crossover_rate, CrossoverKind kind,
                              Rng& rng);

Strategy select_strategy(const StrategyState& state, Rng& rng);

// Recomputes probabilities from the windowed success/failure counts:
// p_k proportional to ns_k/(ns_k+nf_k) + eps, renormalized.
void update_probabilities(StrategyState& state, double epsilon);

SadeResult run_sade(const Objective& objective, const SadeConfig& config);

struct RankingTable {
  // Feature order X,Y,Z,Roll,Yaw,Pitch; weights reported x100.
  std::array<double, 6> light_intensity_weights{};
  std::array<double, 6> distance_weights{};
  std::array<double, 6> average_weights{};
  std::array<int, 6> rank{};  // 1 = largest average weight
};

// Runs the optimizer `runs` times per target with derived seeds, averages the
// best weight vectors, and ranks features by descending average. Ties break
// by fixed feature order.
RankingTable rank_features(const Dataset& dataset, const SadeConfig& config,
                           int runs = 5);

void write_trace_csv(const std::vector<GenerationTrace>& trace,
                     std::ostream& out);
void write_ranking_csv(const RankingTable& table, std::ostream& out);

}  // namespace tracker::sade

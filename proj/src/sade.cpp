#include "tracker/sade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace tracker::sade {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// n indices distinct from each other and from `exclude`
std::vector<std::size_t> draw_distinct(std::size_t pop_size,
                                       std::size_t exclude, int n, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(n);
  while (static_cast<int>(out.size()) < n) {
    std::size_t r = rng.uniform_index(pop_size);
    if (r == exclude) continue;
    if (std::find(out.begin(), out.end(), r) != out.end()) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace

void SadeConfig::validate() const {
  if (population_size < 5)
    throw std::invalid_argument("population_size must be >= 5");
  if (learning_period < 1)
    throw std::invalid_argument("learning_period must be >= 1");
  if (crossover_rate <= 0.0 || crossover_rate > 1.0)
    throw std::invalid_argument("crossover_rate must be in (0, 1]");
  if (scale_factor <= 0.0)
    throw std::invalid_argument("scale_factor must be > 0");
  if (bounds.empty()) throw std::invalid_argument("bounds must be non-empty");
  for (auto [lo, hi] : bounds)
    if (!(lo < hi)) throw std::invalid_argument("bounds require low < high");
}

double objective_eq1(const Dataset& dataset, Target target,
                     const std::vector<double>& weights) {
  if (weights.size() != 6)
    throw std::invalid_argument("weights must have 6 components");
  for (double w : weights)
    if (w < 0.0 || w > 1.0)
      throw std::invalid_argument("weights must lie in [0, 1]");
  if (dataset.records.empty()) throw DataError("empty dataset");

  double total = 0.0;
  for (const auto& record : dataset.records) {
    auto [features, label] = extract(record, target);
    double dot = 0.0;
    for (std::size_t s = 0; s < 6; ++s) dot += weights[s] * features[s];
    total += std::abs(label - dot);
  }
  return total;
}

std::vector<double> mutate(const std::vector<Individual>& population,
                           std::size_t target_index, std::size_t best_index,
                           Strategy strategy, double scale_factor, Rng& rng) {
  const std::size_t n = population.size();
  const double F = scale_factor;
  const int needed = (strategy == Strategy::Rand1Bin) ? 4 : 5;
  if (static_cast<int>(n) < needed)
    throw std::invalid_argument("population too small for strategy");

  auto pos = [&](std::size_t i) -> const std::vector<double>& {
    return population[i].position;
  };
  const std::size_t dim = pos(target_index).size();
  std::vector<double> mutant(dim);

  switch (strategy) {
    case Strategy::Rand1Bin: {
      auto r = draw_distinct(n, target_index, 3, rng);
      for (std::size_t j = 0; j < dim; ++j)
        mutant[j] = pos(r[0])[j] + F * (pos(r[1])[j] - pos(r[2])[j]);
      break;
    }
    case Strategy::RandToBest2Bin: {
      auto r = draw_distinct(n, target_index, 4, rng);
      const auto& xi = pos(target_index);
      const auto& xb = pos(best_index);
      for (std::size_t j = 0; j < dim; ++j)
        mutant[j] = xi[j] + F * (xb[j] - xi[j]) +
                    F * (pos(r[0])[j] - pos(r[1])[j]) +
                    F * (pos(r[2])[j] - pos(r[3])[j]);
      break;
    }
    case Strategy::Rand2Bin: {
      auto r = draw_distinct(n, target_index, 5, rng);
      for (std::size_t j = 0; j < dim; ++j)
        mutant[j] = pos(r[0])[j] + F * (pos(r[1])[j] - pos(r[2])[j]) +
                    F * (pos(r[3])[j] - pos(r[4])[j]);
      break;
    }
    case Strategy::CurrentToRand1: {
      auto r = draw_distinct(n, target_index, 3, rng);
      const auto& xi = pos(target_index);
      const double K = rng.uniform();
      for (std::size_t j = 0; j < dim; ++j)
        mutant[j] = xi[j] + K * (pos(r[0])[j] - xi[j]) +
                    F * (pos(r[1])[j] - pos(r[2])[j]);
      break;
    }
  }
  return mutant;
}

std::vector<double> crossover(const std::vector<double>& target,
                              const std::vector<double>& mutant,
                              double crossover_rate, CrossoverKind kind,
                              Rng& rng) {
  if (target.size() != mutant.size())
    throw std::invalid_argument("dimension mismatch in crossover");
  if (kind == CrossoverKind::ArithmeticNone) return mutant;

  const std::size_t dim = target.size();
  std::vector<double> trial(dim);
  const std::size_t j_rand = rng.uniform_index(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    if (j == j_rand || rng.uniform() < crossover_rate)
      trial[j] = mutant[j];
    else
      trial[j] = target[j];
  }
  return trial;
}

Strategy select_strategy(const StrategyState& state, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (int k = 0; k < kNumStrategies; ++k) {
    cum += state.probabilities[k];
    if (u < cum) return static_cast<Strategy>(k);
  }
  return static_cast<Strategy>(kNumStrategies - 1);
}

void update_probabilities(StrategyState& state, double epsilon) {
  std::array<double, kNumStrategies> score{};
  for (int k = 0; k < kNumStrategies; ++k) {
    long ns = 0, nf = 0;
    for (const auto& g : state.success_window) ns += g[k];
    for (const auto& g : state.failure_window) nf += g[k];
    const double rate = (ns + nf > 0)
                            ? static_cast<double>(ns) / static_cast<double>(ns + nf)
                            : 0.0;
    score[k] = rate + epsilon;
  }
  const double sum = std::accumulate(score.begin(), score.end(), 0.0);
  for (int k = 0; k < kNumStrategies; ++k)
    state.probabilities[k] = score[k] / sum;
}

SadeResult run_sade(const Objective& objective, const SadeConfig& config) {
  config.validate();
  const std::size_t dim = config.bounds.size();
  const std::size_t pop_size = static_cast<std::size_t>(config.population_size);
  Rng rng(config.seed);

  auto clamp_to_bounds = [&](std::vector<double>& v) {
    for (std::size_t j = 0; j < dim; ++j)
      v[j] = std::clamp(v[j], config.bounds[j].first, config.bounds[j].second);
  };

  std::vector<Individual> population(pop_size);
  for (auto& ind : population) {
    ind.position.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      ind.position[j] =
          rng.uniform(config.bounds[j].first, config.bounds[j].second);
    ind.fitness = objective(ind.position);
  }

  auto best_index = [&]() {
    std::size_t b = 0;
    for (std::size_t i = 1; i < pop_size; ++i)
      if (population[i].fitness < population[b].fitness) b = i;
    return b;
  };

  StrategyState state;
  SadeResult result;

  for (int gen = 0; gen < config.max_generations; ++gen) {
    // Trials are generated from the generation-start snapshot and merged in
    // index order, so the trace does not depend on evaluation scheduling.
    const std::vector<Individual> snapshot = population;
    const std::size_t best = best_index();

    std::array<int, kNumStrategies> gen_success{};
    std::array<int, kNumStrategies> gen_failure{};

    for (std::size_t i = 0; i < pop_size; ++i) {
      const Strategy strategy = select_strategy(state, rng);
      auto mutant = mutate(snapshot, i, best, strategy, config.scale_factor, rng);
      const CrossoverKind kind = (strategy == Strategy::CurrentToRand1)
                                     ? CrossoverKind::ArithmeticNone
                                     : CrossoverKind::Binomial;
      auto trial = crossover(snapshot[i].position, mutant,
                             config.crossover_rate, kind, rng);
      for (std::size_t j = 0; j < dim; ++j)
        if (rng.uniform() < config.mutation_rate)
          trial[j] =
              rng.uniform(config.bounds[j].first, config.bounds[j].second);
      clamp_to_bounds(trial);

      const double trial_fitness = objective(trial);
      const int k = static_cast<int>(strategy);
      if (trial_fitness <= snapshot[i].fitness) {
        population[i].position = std::move(trial);
        population[i].fitness = trial_fitness;
        ++gen_success[k];
      } else {
        ++gen_failure[k];
      }
    }

    state.success_window.push_back(gen_success);
    state.failure_window.push_back(gen_failure);
    while (state.success_window.size() >
           static_cast<std::size_t>(config.learning_period)) {
      state.success_window.pop_front();
      state.failure_window.pop_front();
    }
    if (gen + 1 >= config.learning_period)
      update_probabilities(state, config.epsilon);

    GenerationTrace t;
    t.generation = gen;
    t.best_fitness = population[best_index()].fitness;
    t.probabilities = state.probabilities;
    result.trace.push_back(t);
  }

  const std::size_t b = best_index();
  result.best_position = population[b].position;
  result.best_fitness = population[b].fitness;
  return result;
}

RankingTable rank_features(const Dataset& dataset, const SadeConfig& config,
                           int runs) {
  for (Target t : {Target::LightIntensity, Target::Distance})
    if (class_levels(dataset, t).size() < 2)
      throw DataError("degenerate target: " + target_name(t) +
                      " has no variation");

  SadeConfig cfg = config;
  cfg.bounds.assign(6, {0.0, 1.0});

  auto average_best = [&](Target target, std::uint64_t stream) {
    std::array<double, 6> avg{};
    for (int r = 0; r < runs; ++r) {
      SadeConfig run_cfg = cfg;
      run_cfg.seed = split_seed(config.seed, stream * 1000 + r);
      auto result = run_sade(
          [&](const std::vector<double>& w) {
            return objective_eq1(dataset, target, w);
          },
          run_cfg);
      for (std::size_t j = 0; j < 6; ++j) avg[j] += result.best_position[j];
    }
    for (auto& v : avg) v /= runs;
    return avg;
  };

  RankingTable table;
  auto li = average_best(Target::LightIntensity, 0);
  auto d = average_best(Target::Distance, 1);
  for (std::size_t j = 0; j < 6; ++j) {
    table.light_intensity_weights[j] = 100.0 * li[j];
    table.distance_weights[j] = 100.0 * d[j];
    table.average_weights[j] =
        0.5 * (table.light_intensity_weights[j] + table.distance_weights[j]);
  }

  // rank 1 = largest average; ties broken by fixed feature order
  std::array<std::size_t, 6> order{0, 1, 2, 3, 4, 5};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.average_weights[a] > table.average_weights[b];
  });
  for (std::size_t pos = 0; pos < 6; ++pos)
    table.rank[order[pos]] = static_cast<int>(pos) + 1;
  return table;
}

void write_trace_csv(const std::vector<GenerationTrace>& trace,
                     std::ostream& out) {
  out << "generation,best_fitness,p1,p2,p3,p4\n";
  for (const auto& t : trace) {
    out << t.generation << ',' << fmt(t.best_fitness);
    for (double p : t.probabilities) out << ',' << fmt(p);
    out << '\n';
  }
}

void write_ranking_csv(const RankingTable& table, std::ostream& out) {
  out << "row";
  for (const char* name : kFeatureNames) out << ',' << name;
  out << '\n';
  auto row = [&](const char* label, const std::array<double, 6>& values) {
    out << label;
    for (double v : values) out << ',' << fmt(v);
    out << '\n';
  };
  row("distance", table.distance_weights);
  row("light_intensity", table.light_intensity_weights);
  row("average", table.average_weights);
  out << "rank";
  for (int r : table.rank) out << ',' << r;
  out << '\n';
}

}  // namespace tracker::sade

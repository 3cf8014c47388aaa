#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tracker/dataset.hpp"
#include "tracker/models.hpp"

namespace tracker::eval {

enum class Ratio { R50_50, R60_40, R70_30, R80_20 };
inline constexpr std::array<Ratio, 4> kAllRatios = {
    Ratio::R50_50, Ratio::R60_40, Ratio::R70_30, Ratio::R80_20};

double train_fraction(Ratio r);
std::string ratio_name(Ratio r);  // e.g. "70-30"
Ratio ratio_from_name(const std::string& name);

struct Partition {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  bool stratified = true;
};

// Exact-match accuracy in percent.
double accuracy(const std::vector<double>& predicted,
                const std::vector<double>& actual);

// Stratified by target class; falls back to an unstratified split (with a
// warning on stderr) when some stratum has fewer than 2 members.
Partition split(const Dataset& dataset, Target target, Ratio ratio,
                std::uint64_t seed);

// k partitions whose test sets are disjoint and cover the dataset.
std::vector<Partition> kfold(const Dataset& dataset, Target target, int k,
                             std::uint64_t seed);

struct ReportRow {
  std::string model;
  std::string target;
  std::string cell;  // ratio name or "fold-i" or aggregate tag
  double accuracy_percent = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;
};

// Trains and tests every (model x target x ratio) cell, model-major order.
EvaluationReport run_grid(const Dataset& dataset,
                          const std::vector<models::ModelConfig>& configs,
                          const std::vector<Target>& targets,
                          const std::vector<Ratio>& ratios, std::uint64_t seed,
                          int jobs = 1);

// k-fold accuracies per (model x target), with mean and sd aggregate rows.
EvaluationReport run_cv(const Dataset& dataset,
                        const std::vector<models::ModelConfig>& configs,
                        const std::vector<Target>& targets, int k,
                        std::uint64_t seed, int jobs = 1);

void write_report_csv(const EvaluationReport& report, std::ostream& out);

// Aligned plain-text rendering: one row per model, one column per cell.
void write_report_table(const EvaluationReport& report, std::ostream& out);

// Per (model, target) best accuracy over the grid cells.
EvaluationReport best_summary(const EvaluationReport& grid);

}  // namespace tracker::eval

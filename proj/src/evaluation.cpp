#include "tracker/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tracker/parallel.hpp"
#include "tracker/rng.hpp"

namespace tracker::eval {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double label_of(const TrackingRecord& r, Target target) {
  return target == Target::LightIntensity ? r.light_intensity : r.distance;
}

// per-class index lists, each shuffled with a seed derived from the stratum
std::vector<std::vector<std::size_t>> shuffled_strata(const Dataset& dataset,
                                                      Target target,
                                                      std::uint64_t seed) {
  std::map<double, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.records.size(); ++i)
    by_class[label_of(dataset.records[i], target)].push_back(i);

  std::vector<std::vector<std::size_t>> strata;
  std::size_t s = 0;
  for (auto& [level, indices] : by_class) {
    Rng rng(split_seed(seed, s++));
    for (std::size_t i = indices.size(); i > 1; --i)
      std::swap(indices[i - 1], indices[rng.uniform_index(i)]);
    strata.push_back(std::move(indices));
  }
  return strata;
}

std::vector<models::Sample> gather(const Dataset& dataset, Target target,
                                   const std::vector<std::size_t>& indices) {
  std::vector<models::Sample> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    auto [f, label] = extract(dataset.records[i], target);
    out.emplace_back(f, label);
  }
  return out;
}

double evaluate_cell(const Dataset& dataset, Target target,
                     const models::ModelConfig& config,
                     const Partition& partition, std::uint64_t seed,
                     int jobs) {
  models::ModelConfig cfg = config;
  cfg.seed = seed;
  auto train_set = gather(dataset, target, partition.train_indices);
  auto model = models::train(cfg, train_set, jobs);

  std::vector<double> predicted, actual;
  for (auto i : partition.test_indices) {
    auto [f, label] = extract(dataset.records[i], target);
    predicted.push_back(model.predict(f));
    actual.push_back(label);
  }
  return accuracy(predicted, actual);
}

}  // namespace

double train_fraction(Ratio r) {
  switch (r) {
    case Ratio::R50_50: return 0.5;
    case Ratio::R60_40: return 0.6;
    case Ratio::R70_30: return 0.7;
    case Ratio::R80_20: return 0.8;
  }
  throw std::invalid_argument("unknown ratio");
}

std::string ratio_name(Ratio r) {
  switch (r) {
    case Ratio::R50_50: return "50-50";
    case Ratio::R60_40: return "60-40";
    case Ratio::R70_30: return "70-30";
    case Ratio::R80_20: return "80-20";
  }
  throw std::invalid_argument("unknown ratio");
}

Ratio ratio_from_name(const std::string& name) {
  for (Ratio r : kAllRatios)
    if (ratio_name(r) == name) return r;
  throw std::invalid_argument("unknown ratio: " + name);
}

double accuracy(const std::vector<double>& predicted,
                const std::vector<double>& actual) {
  if (predicted.empty() || predicted.size() != actual.size())
    throw std::invalid_argument("accuracy: size mismatch or empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == actual[i]) ++hits;
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(predicted.size());
}

Partition split(const Dataset& dataset, Target target, Ratio ratio,
                std::uint64_t seed) {
  auto strata = shuffled_strata(dataset, target, seed);
  const double frac = train_fraction(ratio);

  bool stratified = true;
  for (const auto& s : strata)
    if (s.size() < 2) stratified = false;
  if (!stratified) {
    std::cerr << "warning: stratum with < 2 members, falling back to "
                 "unstratified split\n";
    std::vector<std::size_t> all;
    for (const auto& s : strata) all.insert(all.end(), s.begin(), s.end());
    Rng rng(split_seed(seed, 1000003));
    for (std::size_t i = all.size(); i > 1; --i)
      std::swap(all[i - 1], all[rng.uniform_index(i)]);
    strata.assign(1, std::move(all));
  }

  Partition p;
  p.stratified = stratified;
  for (const auto& s : strata) {
    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(frac * static_cast<double>(s.size())));
    for (std::size_t i = 0; i < s.size(); ++i)
      (i < n_train ? p.train_indices : p.test_indices).push_back(s[i]);
  }
  std::sort(p.train_indices.begin(), p.train_indices.end());
  std::sort(p.test_indices.begin(), p.test_indices.end());
  return p;
}

std::vector<Partition> kfold(const Dataset& dataset, Target target, int k,
                             std::uint64_t seed) {
  const std::size_t n = dataset.records.size();
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("k exceeds dataset size");

  // round-robin within each shuffled stratum keeps folds class-balanced
  std::vector<std::vector<std::size_t>> fold_members(k);
  std::size_t counter = 0;
  for (const auto& stratum : shuffled_strata(dataset, target, seed))
    for (auto idx : stratum) fold_members[counter++ % k].push_back(idx);

  std::vector<Partition> out(k);
  for (int f = 0; f < k; ++f) {
    for (int g = 0; g < k; ++g) {
      auto& dst = (g == f) ? out[f].test_indices : out[f].train_indices;
      dst.insert(dst.end(), fold_members[g].begin(), fold_members[g].end());
    }
    std::sort(out[f].train_indices.begin(), out[f].train_indices.end());
    std::sort(out[f].test_indices.begin(), out[f].test_indices.end());
  }
  return out;
}

EvaluationReport run_grid(const Dataset& dataset,
                          const std::vector<models::ModelConfig>& configs,
                          const std::vector<Target>& targets,
                          const std::vector<Ratio>& ratios, std::uint64_t seed,
                          int jobs) {
  struct Cell {
    std::size_t config_index, target_index, ratio_index;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < configs.size(); ++m)
    for (std::size_t t = 0; t < targets.size(); ++t)
      for (std::size_t r = 0; r < ratios.size(); ++r)
        cells.push_back({m, t, r});

  std::vector<ReportRow> rows(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t c) {
    const auto [m, t, r] = cells[c];
    const std::uint64_t cell_seed = split_seed(seed, c);
    const Partition part = split(dataset, targets[t], ratios[r], cell_seed);
    ReportRow row;
    row.model = models::kind_name(configs[m].kind);
    row.target = target_name(targets[t]);
    row.cell = ratio_name(ratios[r]);
    row.n_train = part.train_indices.size();
    row.n_test = part.test_indices.size();
    row.seed = cell_seed;
    row.accuracy_percent =
        evaluate_cell(dataset, targets[t], configs[m], part, cell_seed, 1);
    rows[c] = std::move(row);
  });
  return EvaluationReport{std::move(rows)};
}

EvaluationReport run_cv(const Dataset& dataset,
                        const std::vector<models::ModelConfig>& configs,
                        const std::vector<Target>& targets, int k,
                        std::uint64_t seed, int jobs) {
  EvaluationReport report;
  for (std::size_t m = 0; m < configs.size(); ++m) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const std::uint64_t suite_seed = split_seed(seed, m * 97 + t);
      auto partitions = kfold(dataset, targets[t], k, suite_seed);

      std::vector<double> fold_acc(partitions.size());
      parallel_for(partitions.size(), jobs, [&](std::size_t f) {
        fold_acc[f] = evaluate_cell(dataset, targets[t], configs[m],
                                    partitions[f], split_seed(suite_seed, f), 1);
      });

      for (std::size_t f = 0; f < partitions.size(); ++f) {
        ReportRow row;
        row.model = models::kind_name(configs[m].kind);
        row.target = target_name(targets[t]);
        row.cell = "fold-" + std::to_string(f);
        row.accuracy_percent = fold_acc[f];
        row.n_train = partitions[f].train_indices.size();
        row.n_test = partitions[f].test_indices.size();
        row.seed = split_seed(suite_seed, f);
        report.rows.push_back(std::move(row));
      }

      const double mean =
          std::accumulate(fold_acc.begin(), fold_acc.end(), 0.0) /
          static_cast<double>(fold_acc.size());
      double var = 0.0;
      for (double a : fold_acc) var += (a - mean) * (a - mean);
      const double sd = fold_acc.size() > 1
                            ? std::sqrt(var / static_cast<double>(fold_acc.size() - 1))
                            : 0.0;
      for (auto [tag, value] : {std::pair<const char*, double>{"mean", mean},
                                {"sd", sd}}) {
        ReportRow row;
        row.model = models::kind_name(configs[m].kind);
        row.target = target_name(targets[t]);
        row.cell = tag;
        row.accuracy_percent = value;
        row.seed = suite_seed;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

void write_report_csv(const EvaluationReport& report, std::ostream& out) {
  out << "model,target,ratio_or_fold,accuracy_percent,n_train,n_test,seed\n";
  for (const auto& r : report.rows)
    out << r.model << ',' << r.target << ',' << r.cell << ','
        << fmt(r.accuracy_percent) << ',' << r.n_train << ',' << r.n_test
        << ',' << r.seed << '\n';
}

void write_report_table(const EvaluationReport& report, std::ostream& out) {
  // rows: (model, target); columns: distinct cells in first-seen order
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& r : report.rows) {
    if (std::find(columns.begin(), columns.end(), r.cell) == columns.end())
      columns.push_back(r.cell);
    auto key = std::make_pair(r.model, r.target);
    if (std::find(groups.begin(), groups.end(), key) == groups.end())
      groups.push_back(key);
  }

  char buf[64];
  out << "model      target           ";
  for (const auto& c : columns) {
    std::snprintf(buf, sizeof(buf), "%10s", c.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& [model, target] : groups) {
    std::snprintf(buf, sizeof(buf), "%-10s %-16s", model.c_str(),
                  target.c_str());
    out << buf;
    for (const auto& c : columns) {
      bool found = false;
      for (const auto& r : report.rows) {
        if (r.model == model && r.target == target && r.cell == c) {
          std::snprintf(buf, sizeof(buf), "%10.2f", r.accuracy_percent);
          out << buf;
          found = true;
          break;
        }
      }
      if (!found) out << "         -";
    }
    out << '\n';
  }
}

EvaluationReport best_summary(const EvaluationReport& grid) {
  EvaluationReport out;
  for (const auto& r : grid.rows) {
    auto it = std::find_if(out.rows.begin(), out.rows.end(), [&](const ReportRow& s) {
      return s.model == r.model && s.target == r.target;
    });
    if (it == out.rows.end()) {
      ReportRow row = r;
      row.cell = "best";
      out.rows.push_back(std::move(row));
    } else if (r.accuracy_percent > it->accuracy_percent) {
      it->accuracy_percent = r.accuracy_percent;
      it->n_train = r.n_train;
      it->n_test = r.n_test;
      it->seed = r.seed;
    }
  }
  return out;
}

}  // namespace tracker::eval

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "tracker/dataset.hpp"
#include "tracker/evaluation.hpp"
#include "tracker/rng.hpp"

using namespace tracker;
using namespace tracker::eval;

namespace {

Dataset synthetic_grid(std::size_t n_per_condition, double noise_scale,
                       std::uint64_t seed) {
  NoiseModel noise;
  noise.sigma.fill(noise_scale);
  return synthesize(sample_conditions(), n_per_condition, noise, seed);
}

void check_partition(const Partition& p, std::size_t total) {
  std::set<std::size_t> seen(p.train_indices.begin(), p.train_indices.end());
  for (auto i : p.test_indices) {
    CHECK(seen.count(i) == 0);
    seen.insert(i);
  }
  CHECK(seen.size() == total);
}

}  // namespace

TEST_CASE("accuracy hand cases") {
  CHECK(accuracy({1, 2, 3}, {1, 2, 3}) == 100.0);
  CHECK(accuracy({1, 2, 3}, {4, 5, 6}) == 0.0);
  CHECK(accuracy({1, 2, 3, 4}, {1, 2, 3, 9}) == 75.0);
  CHECK_THROWS_AS(accuracy({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(accuracy({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("accuracy is invariant under joint permutation") {
  Rng rng(3);
  std::vector<double> pred, act;
  for (int i = 0; i < 50; ++i) {
    pred.push_back(static_cast<double>(rng.uniform_index(4)));
    act.push_back(static_cast<double>(rng.uniform_index(4)));
  }
  const double base = accuracy(pred, act);
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  std::vector<double> pred2, act2;
  for (auto i : order) {
    pred2.push_back(pred[i]);
    act2.push_back(act[i]);
  }
  CHECK(accuracy(pred2, act2) == base);
}

TEST_CASE("50/50 split of the sample data is 8/8, 2 per class per side") {
  auto ds = sample_dataset();
  auto p = split(ds, Target::LightIntensity, Ratio::R50_50, 9);
  CHECK(p.train_indices.size() == 8);
  CHECK(p.test_indices.size() == 8);
  check_partition(p, 16);

  std::map<double, int> train_counts;
  for (auto i : p.train_indices)
    ++train_counts[ds.records[i].light_intensity];
  for (auto [level, count] : train_counts) CHECK(count == 2);
}

TEST_CASE("80/20 split of 160 rows is 128/32 within one per stratum") {
  auto ds = synthetic_grid(10, 1.0, 4);
  auto p = split(ds, Target::Distance, Ratio::R80_20, 4);
  CHECK(p.train_indices.size() == 128);
  CHECK(p.test_indices.size() == 32);
  check_partition(p, 160);
}

TEST_CASE("split is deterministic in its seed") {
  auto ds = synthetic_grid(5, 1.0, 6);
  auto a = split(ds, Target::LightIntensity, Ratio::R70_30, 11);
  auto b = split(ds, Target::LightIntensity, Ratio::R70_30, 11);
  CHECK(a.train_indices == b.train_indices);
  CHECK(a.test_indices == b.test_indices);
  auto c = split(ds, Target::LightIntensity, Ratio::R70_30, 12);
  CHECK(a.train_indices != c.train_indices);
}

TEST_CASE("split falls back to unstratified when a stratum is too small") {
  Dataset ds;
  for (int i = 0; i < 9; ++i) {
    TrackingRecord r;
    r.light_intensity = i == 0 ? 1.0 : 2.0;  // singleton stratum
    r.distance = 10;
    r.x = i;
    ds.records.push_back(r);
  }
  auto p = split(ds, Target::LightIntensity, Ratio::R50_50, 1);
  CHECK_FALSE(p.stratified);
  check_partition(p, 9);
}

TEST_CASE("kfold partitions are exhaustive and disjoint") {
  auto ds = sample_dataset();
  for (int k : {2, 4, 10, 16}) {
    auto parts = kfold(ds, Target::LightIntensity, k, 21);
    REQUIRE(static_cast<int>(parts.size()) == k);
    std::vector<int> test_count(16, 0);
    std::size_t total_test = 0;
    for (const auto& p : parts) {
      check_partition(p, 16);
      total_test += p.test_indices.size();
      for (auto i : p.test_indices) ++test_count[i];
    }
    CHECK(total_test == 16);
    for (int c : test_count) CHECK(c == 1);

    // fold sizes differ by at most 1
    std::size_t lo = 16, hi = 0;
    for (const auto& p : parts) {
      lo = std::min(lo, p.test_indices.size());
      hi = std::max(hi, p.test_indices.size());
    }
    CHECK(hi - lo <= 1);
  }
  // leave-one-out
  for (const auto& p : kfold(ds, Target::Distance, 16, 3))
    CHECK(p.test_indices.size() == 1);
  CHECK_THROWS_AS(kfold(ds, Target::Distance, 17, 3), std::invalid_argument);
  CHECK_THROWS_AS(kfold(ds, Target::Distance, 1, 3), std::invalid_argument);
}

TEST_CASE("mean fold accuracy of a majority dummy equals the majority share") {
  // distance has classes 25 (x5), 50 (x4), 75 (x4), 100 (x3); a constant
  // "25" predictor averaged over exhaustive folds hits exactly 5/16
  auto ds = sample_dataset();
  auto parts = kfold(ds, Target::Distance, 4, 8);
  double weighted_hits = 0.0;
  for (const auto& p : parts) {
    std::vector<double> pred(p.test_indices.size(), 25.0), act;
    for (auto i : p.test_indices) act.push_back(ds.records[i].distance);
    weighted_hits += accuracy(pred, act) / 100.0 * p.test_indices.size();
  }
  CHECK(weighted_hits / 16.0 == doctest::Approx(5.0 / 16.0));
}

TEST_CASE("grid report shape and bounds") {
  auto ds = synthetic_grid(5, 1.0, 14);
  std::vector<models::ModelConfig> configs(2);
  configs[0].kind = models::ModelKind::RandomForest;
  configs[0].forest.n_trees = 20;
  configs[1].kind = models::ModelKind::LinearModel;

  auto report =
      run_grid(ds, configs, {Target::LightIntensity, Target::Distance},
               {Ratio::R50_50, Ratio::R80_20}, 31);
  CHECK(report.rows.size() == 2 * 2 * 2);
  for (const auto& r : report.rows) {
    CHECK(r.accuracy_percent >= 0.0);
    CHECK(r.accuracy_percent <= 100.0);
    CHECK(r.n_train + r.n_test == 80);
  }
  // model-major ordering
  CHECK(report.rows[0].model == "rforest");
  CHECK(report.rows[4].model == "linear");
}

TEST_CASE("single model and ratio yields one row per target") {
  auto ds = synthetic_grid(5, 1.0, 15);
  std::vector<models::ModelConfig> configs(1);
  configs[0].kind = models::ModelKind::LinearModel;
  auto report = run_grid(ds, configs, {Target::LightIntensity, Target::Distance},
                         {Ratio::R80_20}, 2);
  CHECK(report.rows.size() == 2);
}

TEST_CASE("grid is independent of the job count") {
  auto ds = synthetic_grid(4, 1.0, 16);
  std::vector<models::ModelConfig> configs(2);
  configs[0].kind = models::ModelKind::RandomForest;
  configs[0].forest.n_trees = 10;
  configs[1].kind = models::ModelKind::Svm;

  auto render = [&](int jobs) {
    auto report =
        run_grid(ds, configs, {Target::LightIntensity, Target::Distance},
                 {Ratio::R50_50, Ratio::R70_30}, 5, jobs);
    std::ostringstream out;
    write_report_csv(report, out);
    return out.str();
  };
  CHECK(render(1) == render(4));
}

TEST_CASE("forest memorizes separated clusters across all ratios") {
  auto ds = synthetic_grid(10, 0.05, 17);  // tiny noise: classes fully separated
  std::vector<models::ModelConfig> configs(1);
  configs[0].kind = models::ModelKind::RandomForest;
  configs[0].forest.n_trees = 100;
  auto report = run_grid(ds, configs, {Target::LightIntensity},
                         {Ratio::R50_50, Ratio::R60_40, Ratio::R70_30,
                          Ratio::R80_20},
                         23);
  for (const auto& r : report.rows) CHECK(r.accuracy_percent == 100.0);
}

TEST_CASE("cv report carries fold rows plus mean and sd") {
  auto ds = synthetic_grid(4, 1.0, 18);
  std::vector<models::ModelConfig> configs(1);
  configs[0].kind = models::ModelKind::LinearModel;
  auto report = run_cv(ds, configs, {Target::Distance}, 4, 7);
  REQUIRE(report.rows.size() == 6);  // 4 folds + mean + sd
  CHECK(report.rows[4].cell == "mean");
  CHECK(report.rows[5].cell == "sd");
  double mean = 0.0;
  for (int f = 0; f < 4; ++f) mean += report.rows[f].accuracy_percent;
  CHECK(report.rows[4].accuracy_percent == doctest::Approx(mean / 4.0));
}

TEST_CASE("report csv and table rendering") {
  EvaluationReport report;
  report.rows.push_back({"rforest", "distance", "70-30", 91.5, 112, 48, 9});
  std::ostringstream csv;
  write_report_csv(report, csv);
  CHECK(csv.str() ==
        "model,target,ratio_or_fold,accuracy_percent,n_train,n_test,seed\n"
        "rforest,distance,70-30,91.5,112,48,9\n");

  std::ostringstream table;
  write_report_table(report, table);
  CHECK(table.str().find("91.50") != std::string::npos);

  auto best = best_summary(report);
  REQUIRE(best.rows.size() == 1);
  CHECK(best.rows[0].cell == "best");
}

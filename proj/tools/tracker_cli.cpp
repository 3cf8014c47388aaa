// Command-line pipeline: ingest -> rank -> evaluate / cv, plus synthetic
// data generation and report rendering.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracker/dataset.hpp"
#include "tracker/evaluation.hpp"
#include "tracker/models.hpp"
#include "tracker/sade.hpp"

namespace fs = std::filesystem;
using namespace tracker;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct CommonOptions {
  std::string data_path;
  std::string target = "both";
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int jobs = 1;
};

std::vector<Target> parse_targets(const std::string& t) {
  if (t == "light") return {Target::LightIntensity};
  if (t == "distance") return {Target::Distance};
  if (t == "both") return {Target::LightIntensity, Target::Distance};
  throw CLI::ValidationError("--target must be light, distance or both");
}

std::vector<models::ModelConfig> parse_models(
    const std::vector<std::string>& names, std::uint64_t seed) {
  std::vector<models::ModelConfig> out;
  for (const auto& name : names) {
    models::ModelConfig cfg;
    cfg.kind = models::kind_from_name(name);
    cfg.seed = seed;
    out.push_back(cfg);
  }
  return out;
}

std::vector<eval::Ratio> parse_ratios(const std::vector<std::string>& names) {
  std::vector<eval::Ratio> out;
  for (const auto& name : names) out.push_back(eval::ratio_from_name(name));
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

Dataset load_clean(const std::string& path) {
  auto [ds, report] = clean(ingest_csv(path));
  return ds;
}

int cmd_ingest(const CommonOptions& opt) {
  Dataset raw = ingest_csv(opt.data_path);
  auto [cleaned, report] = clean(raw);

  fs::create_directories(opt.out_dir);
  write_csv(cleaned, (fs::path(opt.out_dir) / "cleaned.csv").string());

  std::ostringstream summary;
  summary << report.rows_in << " rows read, " << report.duplicates_removed
          << " duplicates removed, " << report.missing_removed
          << " missing removed, " << cleaned.records.size() << " rows kept\n";
  std::cerr << summary.str();
  write_text_file(fs::path(opt.out_dir) / "ingest_summary.txt", summary.str());
  return 0;
}

int cmd_synth(const CommonOptions& opt, std::size_t n_per_condition,
              double noise_scale) {
  NoiseModel noise;
  noise.sigma.fill(noise_scale);
  Dataset ds = synthesize(sample_conditions(), n_per_condition, noise, opt.seed);
  fs::create_directories(opt.out_dir);
  write_csv(ds, (fs::path(opt.out_dir) / "synthetic.csv").string());
  std::cerr << ds.records.size() << " synthetic rows written\n";
  return 0;
}

int cmd_rank(const CommonOptions& opt, const sade::SadeConfig& base,
             int runs) {
  Dataset ds = load_clean(opt.data_path);
  sade::SadeConfig cfg = base;
  cfg.seed = opt.seed;
  cfg.bounds.assign(6, {0.0, 1.0});

  fs::create_directories(opt.out_dir);

  // per-run traces for both targets
  int stream = 0;
  for (Target target : {Target::LightIntensity, Target::Distance}) {
    for (int r = 0; r < runs; ++r) {
      sade::SadeConfig run_cfg = cfg;
      run_cfg.seed = split_seed(opt.seed, stream * 1000 + r);
      auto result = sade::run_sade(
          [&](const std::vector<double>& w) {
            return sade::objective_eq1(ds, target, w);
          },
          run_cfg);
      std::ostringstream name;
      name << "trace_" << target_name(target) << "_run" << r << ".csv";
      std::ofstream out(fs::path(opt.out_dir) / name.str());
      sade::write_trace_csv(result.trace, out);
    }
    ++stream;
  }

  auto table = sade::rank_features(ds, cfg, runs);
  std::ofstream out(fs::path(opt.out_dir) / "ranking.csv");
  sade::write_ranking_csv(table, out);
  std::cerr << "ranking written for " << ds.records.size() << " records\n";
  return 0;
}

int cmd_evaluate(const CommonOptions& opt,
                 const std::vector<std::string>& model_names,
                 const std::vector<std::string>& ratio_names) {
  Dataset ds = load_clean(opt.data_path);
  auto configs = parse_models(model_names, opt.seed);
  auto targets = parse_targets(opt.target);
  auto ratios = parse_ratios(ratio_names);

  auto report = eval::run_grid(ds, configs, targets, ratios, opt.seed, opt.jobs);

  fs::create_directories(opt.out_dir);
  {
    std::ofstream out(fs::path(opt.out_dir) / "grid.csv");
    eval::write_report_csv(report, out);
  }
  {
    std::ofstream out(fs::path(opt.out_dir) / "summary.txt");
    out << "Accuracy (%) per training-testing partition\n\n";
    eval::write_report_table(report, out);
    out << "\nBest accuracy per model and target\n\n";
    eval::write_report_table(eval::best_summary(report), out);
  }
  std::cerr << report.rows.size() << " grid cells evaluated\n";
  return 0;
}

int cmd_cv(const CommonOptions& opt, const std::vector<std::string>& model_names,
           int k) {
  Dataset ds = load_clean(opt.data_path);
  auto configs = parse_models(model_names, opt.seed);
  auto targets = parse_targets(opt.target);

  auto report = eval::run_cv(ds, configs, targets, k, opt.seed, opt.jobs);

  fs::create_directories(opt.out_dir);
  {
    std::ofstream out(fs::path(opt.out_dir) / "cv.csv");
    eval::write_report_csv(report, out);
  }
  {
    std::ofstream out(fs::path(opt.out_dir) / "cv_summary.txt");
    out << k << "-fold cross-validation accuracy (%)\n\n";
    eval::write_report_table(report, out);
  }
  std::cerr << k << "-fold cross-validation done\n";
  return 0;
}

int cmd_report(const std::string& grid_path) {
  std::ifstream in(grid_path);
  if (!in) throw DataError("cannot open " + grid_path);

  eval::EvaluationReport report;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    eval::ReportRow row;
    std::string field;
    std::getline(ss, row.model, ',');
    std::getline(ss, row.target, ',');
    std::getline(ss, row.cell, ',');
    std::getline(ss, field, ',');
    row.accuracy_percent = std::stod(field);
    if (std::getline(ss, field, ',')) row.n_train = std::stoul(field);
    if (std::getline(ss, field, ',')) row.n_test = std::stoul(field);
    if (std::getline(ss, field, ',')) row.seed = std::stoull(field);
    report.rows.push_back(std::move(row));
  }
  if (report.rows.empty()) throw DataError("no rows in " + grid_path);
  eval::write_report_table(report, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"6-DoF head-tracker condition prediction pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // common flags may follow the subcommand name
  app.set_config("--config", "", "Configuration file (INI format)");

  CommonOptions opt;
  app.add_option("--data", opt.data_path, "Input CSV path");
  app.add_option("--target", opt.target, "light | distance | both");
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--seed", opt.seed, "Master seed; sub-seeds are derived");
  app.add_option("--jobs", opt.jobs, "Worker threads for parallel stages");

  auto* ingest = app.add_subcommand("ingest", "Clean a raw CSV");

  auto* synth = app.add_subcommand("synth", "Generate synthetic records");
  std::size_t n_per = 10;
  double noise_scale = 1.0;
  synth->add_option("--n", n_per, "Records per condition");
  synth->add_option("--noise", noise_scale, "Noise standard deviation");

  auto* rank = app.add_subcommand("rank", "Rank features by optimized weights");
  sade::SadeConfig sade_cfg;
  int runs = 5;
  rank->add_option("--runs", runs, "Optimizer runs to average");
  rank->add_option("--pop", sade_cfg.population_size, "Population size");
  rank->add_option("--gens", sade_cfg.max_generations, "Generations");
  rank->add_option("--lp", sade_cfg.learning_period, "Learning period");

  auto* evaluate = app.add_subcommand("evaluate", "Train/test partition grid");
  std::vector<std::string> model_names = {"rforest", "linear", "svm", "nnet"};
  std::vector<std::string> ratio_names = {"50-50", "60-40", "70-30", "80-20"};
  evaluate->add_option("--models", model_names,
                       "Subset of rforest linear svm nnet");
  evaluate->add_option("--ratios", ratio_names,
                       "Subset of 50-50 60-40 70-30 80-20");

  auto* cv = app.add_subcommand("cv", "K-fold cross-validation");
  int k = 10;
  cv->add_option("--k", k, "Number of folds");
  cv->add_option("--models", model_names, "Subset of rforest linear svm nnet");

  auto* report = app.add_subcommand("report", "Render a grid CSV as a table");
  std::string grid_path;
  report->add_option("--grid", grid_path, "Grid CSV to render")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(opt);
    if (synth->parsed()) return cmd_synth(opt, n_per, noise_scale);
    if (rank->parsed()) return cmd_rank(opt, sade_cfg, runs);
    if (evaluate->parsed()) return cmd_evaluate(opt, model_names, ratio_names);
    if (cv->parsed()) return cmd_cv(opt, model_names, k);
    if (report->parsed()) return cmd_report(grid_path);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

#include "tracker/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "models_impl.hpp"

namespace tracker::models {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr const char* kMagic = "tracker-model";
constexpr int kFormatVersion = 1;

}  // namespace

std::string kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::RandomForest: return "rforest";
    case ModelKind::LinearModel: return "linear";
    case ModelKind::Svm: return "svm";
    case ModelKind::NeuralNet: return "nnet";
  }
  throw std::invalid_argument("unknown model kind");
}

ModelKind kind_from_name(const std::string& name) {
  if (name == "rforest") return ModelKind::RandomForest;
  if (name == "linear") return ModelKind::LinearModel;
  if (name == "svm") return ModelKind::Svm;
  if (name == "nnet") return ModelKind::NeuralNet;
  throw std::invalid_argument("unknown model kind: " + name);
}

namespace detail {

void standardize_stats(const std::vector<FeatureVector>& features,
                       std::array<double, 6>& mean, std::array<double, 6>& sd) {
  const double n = static_cast<double>(features.size());
  mean.fill(0.0);
  for (const auto& f : features)
    for (int j = 0; j < 6; ++j) mean[j] += f[j];
  for (auto& m : mean) m /= n;

  sd.fill(0.0);
  for (const auto& f : features)
    for (int j = 0; j < 6; ++j) sd[j] += (f[j] - mean[j]) * (f[j] - mean[j]);
  for (auto& s : sd) {
    s = std::sqrt(s / n);
    if (s <= 0.0) s = 1.0;
  }
}

FeatureVector standardize(const FeatureVector& f,
                          const std::array<double, 6>& mean,
                          const std::array<double, 6>& sd) {
  FeatureVector out;
  for (int j = 0; j < 6; ++j) out[j] = (f[j] - mean[j]) / sd[j];
  return out;
}

bool all_features_identical(const std::vector<FeatureVector>& features) {
  for (const auto& f : features)
    if (f != features.front()) return false;
  return true;
}

}  // namespace detail

TrainedModel train(const ModelConfig& config, const std::vector<Sample>& data,
                   int jobs) {
  if (data.size() < 2) throw DataError("need at least 2 training samples");
  for (const auto& [f, label] : data)
    for (double v : f)
      if (!std::isfinite(v)) throw DataError("non-finite training feature");

  std::set<double> levels;
  for (const auto& [f, label] : data) levels.insert(label);
  if (levels.size() < 2) throw DataError("training data has a single class");

  TrainedModel model;
  model.kind_ = config.kind;
  model.class_levels_.assign(levels.begin(), levels.end());

  detail::Problem problem;
  problem.class_count = static_cast<int>(model.class_levels_.size());
  std::map<double, int> index;
  for (std::size_t i = 0; i < model.class_levels_.size(); ++i)
    index[model.class_levels_[i]] = static_cast<int>(i);
  for (const auto& [f, label] : data) {
    problem.features.push_back(f);
    problem.labels.push_back(index.at(label));
  }

  // identical features cannot be separated by the distance/gradient models;
  // fall back to the majority class
  if ((config.kind == ModelKind::Svm || config.kind == ModelKind::NeuralNet) &&
      detail::all_features_identical(problem.features)) {
    std::vector<int> counts(problem.class_count, 0);
    for (int y : problem.labels) ++counts[y];
    const int majority = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    model.constant_label_ = model.class_levels_[majority];
    return model;
  }

  switch (config.kind) {
    case ModelKind::RandomForest:
      model.forest_ = detail::train_forest(config.forest, problem, config.seed, jobs);
      break;
    case ModelKind::LinearModel:
      model.linear_ = detail::train_linear(config.linear, problem);
      break;
    case ModelKind::Svm:
      model.svm_ = detail::train_svm(config.svm, problem, config.seed);
      break;
    case ModelKind::NeuralNet:
      model.nnet_ = detail::train_nnet(config.nnet, problem, config.seed);
      break;
  }
  return model;
}

double TrainedModel::predict(const FeatureVector& features) const {
  for (double v : features)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature");
  if (constant_label_) return *constant_label_;

  const int k = static_cast<int>(class_levels_.size());
  int idx = 0;
  switch (kind_) {
    case ModelKind::RandomForest:
      idx = detail::forest_predict(forest_, k, features);
      break;
    case ModelKind::LinearModel:
      idx = detail::linear_predict(linear_, k, features);
      break;
    case ModelKind::Svm:
      idx = detail::svm_predict(svm_, k, features);
      break;
    case ModelKind::NeuralNet:
      idx = detail::nnet_predict(nnet_, k, features);
      break;
  }
  return class_levels_[idx];
}

std::vector<double> TrainedModel::predict_all(
    const std::vector<FeatureVector>& features) const {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(predict(f));
  return out;
}

// --- persistence ---

void TrainedModel::save(std::ostream& out) const {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "kind " << kind_name(kind_) << '\n';
  out << "classes " << class_levels_.size();
  for (double v : class_levels_) out << ' ' << fmt(v);
  out << '\n';
  if (constant_label_) {
    out << "constant " << fmt(*constant_label_) << '\n';
    out << "end\n";
    return;
  }

  auto write_array6 = [&](const char* tag, const std::array<double, 6>& a) {
    out << tag;
    for (double v : a) out << ' ' << fmt(v);
    out << '\n';
  };

  switch (kind_) {
    case ModelKind::RandomForest: {
      out << "trees " << forest_.trees.size() << '\n';
      for (const auto& tree : forest_.trees) {
        out << "tree " << tree.nodes.size() << '\n';
        for (const auto& n : tree.nodes) {
          if (n.feature < 0)
            out << "l " << n.label_index << '\n';
          else
            out << "n " << n.feature << ' ' << fmt(n.threshold) << ' ' << n.left
                << ' ' << n.right << '\n';
        }
      }
      break;
    }
    case ModelKind::LinearModel: {
      out << "coef " << class_levels_.size() << " 7\n";
      for (std::size_t c = 0; c < class_levels_.size(); ++c) {
        for (int j = 0; j < 7; ++j)
          out << (j ? " " : "") << fmt(linear_.coef[c * 7 + j]);
        out << '\n';
      }
      break;
    }
    case ModelKind::Svm: {
      out << "gamma " << fmt(svm_.gamma) << '\n';
      write_array6("mean", svm_.mean);
      write_array6("sd", svm_.stddev);
      out << "pairs " << svm_.pairs.size() << '\n';
      for (const auto& p : svm_.pairs) {
        out << "pair " << p.class_a << ' ' << p.class_b << ' '
            << p.support.size() << ' ' << fmt(p.bias) << '\n';
        for (std::size_t i = 0; i < p.support.size(); ++i) {
          out << fmt(p.alpha_y[i]);
          for (double v : p.support[i]) out << ' ' << fmt(v);
          out << '\n';
        }
      }
      break;
    }
    case ModelKind::NeuralNet: {
      write_array6("mean", nnet_.mean);
      write_array6("sd", nnet_.stddev);
      out << "hidden " << nnet_.hidden_units << '\n';
      out << "weights " << nnet_.weights.size() << '\n';
      for (double w : nnet_.weights) out << fmt(w) << '\n';
      break;
    }
  }
  out << "end\n";
}

void TrainedModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  save(out);
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  TrainedModel read() {
    std::string magic;
    int version = 0;
    in_ >> magic >> version;
    if (magic != kMagic || version != kFormatVersion)
      throw DataError("unrecognized model file format");

    TrainedModel m;
    expect("kind");
    std::string kind;
    in_ >> kind;
    m.kind_ = kind_from_name(kind);

    expect("classes");
    std::size_t k;
    in_ >> k;
    m.class_levels_.resize(k);
    for (auto& v : m.class_levels_) in_ >> v;

    std::string tag;
    in_ >> tag;
    if (tag == "constant") {
      double v;
      in_ >> v;
      m.constant_label_ = v;
      return m;
    }

    switch (m.kind_) {
      case ModelKind::RandomForest: {
        check(tag == "trees", "trees");
        std::size_t t;
        in_ >> t;
        m.forest_.trees.resize(t);
        for (auto& tree : m.forest_.trees) {
          expect("tree");
          std::size_t nn;
          in_ >> nn;
          tree.nodes.resize(nn);
          for (auto& node : tree.nodes) {
            std::string c;
            in_ >> c;
            if (c == "l")
              in_ >> node.label_index;
            else
              in_ >> node.feature >> node.threshold >> node.left >> node.right;
          }
        }
        break;
      }
      case ModelKind::LinearModel: {
        check(tag == "coef", "coef");
        std::size_t rows, cols;
        in_ >> rows >> cols;
        m.linear_.coef.resize(rows * cols);
        for (auto& v : m.linear_.coef) in_ >> v;
        break;
      }
      case ModelKind::Svm: {
        check(tag == "gamma", "gamma");
        in_ >> m.svm_.gamma;
        expect("mean");
        for (auto& v : m.svm_.mean) in_ >> v;
        expect("sd");
        for (auto& v : m.svm_.stddev) in_ >> v;
        expect("pairs");
        std::size_t np;
        in_ >> np;
        m.svm_.pairs.resize(np);
        for (auto& p : m.svm_.pairs) {
          expect("pair");
          std::size_t nsv;
          in_ >> p.class_a >> p.class_b >> nsv >> p.bias;
          p.alpha_y.resize(nsv);
          p.support.resize(nsv);
          for (std::size_t i = 0; i < nsv; ++i) {
            in_ >> p.alpha_y[i];
            for (auto& v : p.support[i]) in_ >> v;
          }
        }
        break;
      }
      case ModelKind::NeuralNet: {
        check(tag == "mean", "mean");
        for (auto& v : m.nnet_.mean) in_ >> v;
        expect("sd");
        for (auto& v : m.nnet_.stddev) in_ >> v;
        expect("hidden");
        in_ >> m.nnet_.hidden_units;
        expect("weights");
        std::size_t nw;
        in_ >> nw;
        m.nnet_.weights.resize(nw);
        for (auto& v : m.nnet_.weights) in_ >> v;
        break;
      }
    }
    if (!in_) throw DataError("truncated model file");
    return m;
  }

 private:
  void expect(const std::string& want) {
    std::string got;
    in_ >> got;
    check(got == want, want);
  }
  void check(bool ok, const std::string& want) {
    if (!ok) throw DataError("model file parse error, expected '" + want + "'");
  }
  std::istream& in_;
};

TrainedModel TrainedModel::load(std::istream& in) {
  return ModelReader(in).read();
}

TrainedModel TrainedModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  return load(in);
}

}  // namespace tracker::models

#include "tracker/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tracker/rng.hpp"

namespace tracker {

namespace {

constexpr const char* kHeader = "light_intensity,distance,yaw,pitch,roll,x,y,z";

double parse_field(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    return std::numeric_limits<double>::quiet_NaN();
  return v;
}

std::string format_field(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

bool TrackingRecord::has_missing() const {
  for (double v : {light_intensity, distance, yaw, pitch, roll, x, y, z})
    if (!std::isfinite(v)) return true;
  return false;
}

std::string target_name(Target t) {
  return t == Target::LightIntensity ? "light_intensity" : "distance";
}

Dataset ingest_csv_stream(std::istream& in, const std::string& provenance) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: " + provenance);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw DataError("malformed header in " + provenance + ": expected '" +
                    kHeader + "', got '" + line + "'");

  Dataset ds;
  ds.provenance = provenance;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    TrackingRecord r;
    if (fields.size() != 8) {
      // wrong arity: keep the row but mark it missing so clean drops it
      r.light_intensity = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.light_intensity = parse_field(fields[0]);
      r.distance = parse_field(fields[1]);
      r.yaw = parse_field(fields[2]);
      r.pitch = parse_field(fields[3]);
      r.roll = parse_field(fields[4]);
      r.x = parse_field(fields[5]);
      r.y = parse_field(fields[6]);
      r.z = parse_field(fields[7]);
    }
    ds.records.push_back(r);
  }
  if (ds.records.empty()) throw DataError("no data rows in " + provenance);
  return ds;
}

Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return ingest_csv_stream(in, path);
}

void write_csv_stream(const Dataset& dataset, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& r : dataset.records) {
    out << format_field(r.light_intensity) << ',' << format_field(r.distance)
        << ',' << format_field(r.yaw) << ',' << format_field(r.pitch) << ','
        << format_field(r.roll) << ',' << format_field(r.x) << ','
        << format_field(r.y) << ',' << format_field(r.z) << '\n';
  }
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  write_csv_stream(dataset, out);
}

std::pair<Dataset, CleanReport> clean(const Dataset& dataset) {
  CleanReport report;
  report.rows_in = dataset.records.size();

  Dataset out;
  out.provenance = dataset.provenance;
  for (const auto& r : dataset.records) {
    if (r.has_missing()) {
      ++report.missing_removed;
      continue;
    }
    bool dup = std::find(out.records.begin(), out.records.end(), r) !=
               out.records.end();
    if (dup) {
      ++report.duplicates_removed;
      continue;
    }
    out.records.push_back(r);
  }
  if (out.records.empty())
    throw DataError("dataset empty after cleaning: " + dataset.provenance);
  return {std::move(out), report};
}

std::pair<FeatureVector, double> extract(const TrackingRecord& record,
                                         Target target) {
  FeatureVector f{record.x, record.y, record.z,
                  record.roll, record.yaw, record.pitch};
  double label =
      target == Target::LightIntensity ? record.light_intensity : record.distance;
  return {f, label};
}

std::vector<double> class_levels(const Dataset& dataset, Target target) {
  std::set<double> levels;
  for (const auto& r : dataset.records)
    levels.insert(target == Target::LightIntensity ? r.light_intensity
                                                   : r.distance);
  return {levels.begin(), levels.end()};
}

Matrix3 rotation_matrix(double yaw_deg, double pitch_deg, double roll_deg) {
  for (double a : {yaw_deg, pitch_deg, roll_deg})
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite angle");

  constexpr double deg = M_PI / 180.0;
  const double cy = std::cos(yaw_deg * deg), sy = std::sin(yaw_deg * deg);
  const double cp = std::cos(pitch_deg * deg), sp = std::sin(pitch_deg * deg);
  const double cr = std::cos(roll_deg * deg), sr = std::sin(roll_deg * deg);

  // Rz(yaw) * Ry(pitch) * Rx(roll), expanded
  return Matrix3{{
      {{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr}},
      {{sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr}},
      {{-sp, cp * sr, cp * cr}},
  }};
}

Dataset synthesize(const std::vector<Condition>& conditions,
                   std::size_t n_per_condition, const NoiseModel& noise,
                   std::uint64_t seed) {
  if (conditions.empty()) throw DataError("no conditions to synthesize");
  if (n_per_condition < 1) throw DataError("n_per_condition must be >= 1");

  Dataset ds;
  ds.provenance = "synthetic";
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    Rng rng(split_seed(seed, c));
    const auto& cond = conditions[c];
    for (std::size_t i = 0; i < n_per_condition; ++i) {
      FeatureVector f;
      for (std::size_t j = 0; j < 6; ++j)
        f[j] = cond.mean[j] + noise.sigma[j] * rng.normal();
      TrackingRecord r;
      r.light_intensity = cond.light_intensity;
      r.distance = cond.distance;
      r.x = f[0];
      r.y = f[1];
      r.z = f[2];
      r.roll = f[3];
      r.yaw = f[4];
      r.pitch = f[5];
      ds.records.push_back(r);
    }
  }
  return ds;
}

Dataset sample_dataset() {
  // 16-row sample capture: {li, d, yaw, pitch, roll, x, y, z}
  static const TrackingRecord rows[] = {
      {3, 25, -18.2, 3.8, -17.8, -4.5, 4.1, 13.47},
      {3, 50, -20.5, -1.7, -7.8, 0.2, 0.7, -10.3},
      {3, 75, -23.5, -12.78, -2.67, -13.6, -0.2, 3.97},
      {3, 100, 5.1, -14.44, -2.9, 6, 0.7, -5.13},
      {75, 25, -54.3, 1.1, -0.6, -2.8, 0.51, 6.05},
      {75, 50, -49, -1.4, -1.8, -1.2, 1.4, 2.95},
      {75, 75, -8.8, 2, -4.5, -1.9, 1.3, -0.16},
      {75, 100, -11.6, 1, -3.8, 0.3, -1.9, -12.36},
      {111, 25, -13.1, -2.8, 0.1, -7.6, 3.2, 5.66},
      {111, 50, -7.4, -3, 0, -6.2, 3.3, 5.38},
      {111, 75, -2, -2.8, -0.4, -1.1, 3, 6.46},
      {111, 25, -16, -2.8, -0.4, 2, 2.9, -2.15},
      {165, 50, 9.3, -6.6, 2.4, 0.6, 2.5, -9.43},
      {165, 25, 9.7, -6.1, 2, 1, 2, -11.21},
      {165, 75, 9.43, -6.67, 2.4, 0.6, 2.5, -9.43},
      {165, 100, -10.22, -7.99, -1.8, 5, 2, -7.76},
  };
  Dataset ds;
  ds.provenance = "sample";
  ds.records.assign(std::begin(rows), std::end(rows));
  return ds;
}

std::vector<Condition> sample_conditions() {
  std::vector<Condition> out;
  for (const auto& r : sample_dataset().records) {
    Condition c;
    c.light_intensity = r.light_intensity;
    c.distance = r.distance;
    c.mean = extract(r, Target::LightIntensity).first;
    out.push_back(c);
  }
  return out;
}

}  // namespace tracker

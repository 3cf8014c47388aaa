#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tracker {

// Raised for problems with the input data itself (as opposed to usage or
// internal errors); the CLI maps it to exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// One observation: the two condition labels plus the six motion coordinates.
// A missing field is stored as NaN until `clean` removes the record.
struct TrackingRecord {
  double light_intensity = 0.0;  // lux, > 0
  double distance = 0.0;         // cm, > 0
  double yaw = 0.0;              // degrees, about Z
  double pitch = 0.0;            // degrees, about Y
  double roll = 0.0;             // degrees, about X
  double x = 0.0;                // forward/back translation
  double y = 0.0;                // left/right translation
  double z = 0.0;                // up/down translation

  bool has_missing() const;
  bool operator==(const TrackingRecord&) const = default;
};

struct Dataset {
  std::vector<TrackingRecord> records;
  std::string provenance;
};

enum class Target { LightIntensity, Distance };

std::string target_name(Target t);

// Feature order is fixed: X, Y, Z, Roll, Yaw, Pitch.
using FeatureVector = std::array<double, 6>;
inline constexpr std::array<const char*, 6> kFeatureNames = {
    "X", "Y", "Z", "Roll", "Yaw", "Pitch"};

struct CleanReport {
  std::size_t rows_in = 0;
  std::size_t missing_removed = 0;
  std::size_t duplicates_removed = 0;
};

// CSV header: light_intensity,distance,yaw,pitch,roll,x,y,z
// Empty or unparseable fields become NaN; `clean` drops those rows.
Dataset ingest_csv(const std::string& path);
Dataset ingest_csv_stream(std::istream& in, const std::string& provenance);

void write_csv(const Dataset& dataset, const std::string& path);
void write_csv_stream(const Dataset& dataset, std::ostream& out);

// Drops records with any missing field, then collapses exact duplicates to
// their first occurrence. Order otherwise preserved. Throws DataError if
// nothing survives.
std::pair<Dataset, CleanReport> clean(const Dataset& dataset);

std::pair<FeatureVector, double> extract(const TrackingRecord& record,
                                         Target target);

// Distinct values of the chosen condition, sorted ascending.
std::vector<double> class_levels(const Dataset& dataset, Target target);

// Composed rotation R = Rz(yaw) * Ry(pitch) * Rx(roll), angles in degrees.
using Matrix3 = std::array<std::array<double, 3>, 3>;
Matrix3 rotation_matrix(double yaw_deg, double pitch_deg, double roll_deg);

// One experimental condition with the mean coordinates its records scatter
// around.
struct Condition {
  double light_intensity = 0.0;
  double distance = 0.0;
  FeatureVector mean{};
};

struct NoiseModel {
  // Per-coordinate standard deviation, feature order X,Y,Z,Roll,Yaw,Pitch.
  std::array<double, 6> sigma{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

// Deterministic synthetic records: n_per_condition per condition, coordinates
// drawn normal around the condition mean.
Dataset synthesize(const std::vector<Condition>& conditions,
                   std::size_t n_per_condition, const NoiseModel& noise,
                   std::uint64_t seed);

// The 16-row sample capture bundled with the project (4 light levels x 4
// distances, one record each).
Dataset sample_dataset();

// The 16 sample rows turned into synthesis conditions (means = sample
// coordinates).
std::vector<Condition> sample_conditions();

}  // namespace tracker

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "tracker/dataset.hpp"
#include "tracker/rng.hpp"

using namespace tracker;

namespace {

Dataset from_csv(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv_stream(in, "test");
}

// elementary rotations built independently of the library's composed form
Matrix3 elem_z(double deg) {
  const double c = std::cos(deg * M_PI / 180.0), s = std::sin(deg * M_PI / 180.0);
  return {{{{c, -s, 0}}, {{s, c, 0}}, {{0, 0, 1}}}};
}
Matrix3 elem_y(double deg) {
  const double c = std::cos(deg * M_PI / 180.0), s = std::sin(deg * M_PI / 180.0);
  return {{{{c, 0, s}}, {{0, 1, 0}}, {{-s, 0, c}}}};
}
Matrix3 elem_x(double deg) {
  const double c = std::cos(deg * M_PI / 180.0), s = std::sin(deg * M_PI / 180.0);
  return {{{{1, 0, 0}}, {{0, c, -s}}, {{0, s, c}}}};
}
Matrix3 matmul(const Matrix3& a, const Matrix3& b) {
  Matrix3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

double max_abs_diff(const Matrix3& a, const Matrix3& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

}  // namespace

TEST_CASE("ingest parses the first sample row field for field") {
  auto ds = from_csv(sample_csv());
  REQUIRE(ds.records.size() == 16);
  const auto& r = ds.records[0];
  CHECK(r.light_intensity == 3.0);
  CHECK(r.distance == 25.0);
  CHECK(r.yaw == -18.2);
  CHECK(r.pitch == 3.8);
  CHECK(r.roll == -17.8);
  CHECK(r.x == -4.5);
  CHECK(r.y == 4.1);
  CHECK(r.z == 13.47);
}

TEST_CASE("ingest rejects header-only and malformed-header input") {
  CHECK_THROWS_AS(from_csv("light_intensity,distance,yaw,pitch,roll,x,y,z\n"),
                  DataError);
  CHECK_THROWS_AS(from_csv("lux,distance,yaw,pitch,roll,x,y,z\n1,2,3,4,5,6,7,8\n"),
                  DataError);
}

TEST_CASE("ingest keeps duplicates; dedup belongs to clean") {
  auto ds = from_csv(
      "light_intensity,distance,yaw,pitch,roll,x,y,z\n"
      "3,25,-18.2,3.8,-17.8,-4.5,4.1,13.47\n"
      "3,25,-18.2,3.8,-17.8,-4.5,4.1,13.47\n");
  CHECK(ds.records.size() == 2);
}

TEST_CASE("clean keeps 16 distinct sample rows untouched") {
  auto [cleaned, report] = clean(from_csv(sample_csv()));
  CHECK(cleaned.records.size() == 16);
  CHECK(report.duplicates_removed == 0);
  CHECK(report.missing_removed == 0);
}

TEST_CASE("clean collapses duplicates to first occurrence") {
  auto ds = from_csv(
      "light_intensity,distance,yaw,pitch,roll,x,y,z\n"
      "3,25,1,2,3,4,5,6\n"
      "3,25,1,2,3,4,5,6\n"
      "3,50,1,2,3,4,5,6\n");
  auto [cleaned, report] = clean(ds);
  CHECK(cleaned.records.size() == 2);
  CHECK(report.duplicates_removed == 1);
  CHECK(cleaned.records[0].distance == 25.0);
  CHECK(cleaned.records[1].distance == 50.0);
}

TEST_CASE("clean drops rows with missing fields and errors when empty") {
  auto ds = from_csv(
      "light_intensity,distance,yaw,pitch,roll,x,y,z\n"
      "3,25,,2,3,4,5,6\n");
  CHECK_THROWS_AS(clean(ds), DataError);
}

TEST_CASE("clean is idempotent and preserves surviving values") {
  auto ds = from_csv(
      "light_intensity,distance,yaw,pitch,roll,x,y,z\n"
      "3,25,1,2,3,4,5,6\n"
      "3,25,1,2,3,4,5,6\n"
      "3,50,,2,3,4,5,6\n"
      "75,25,9,8,7,6,5,4\n");
  auto [once, r1] = clean(ds);
  auto [twice, r2] = clean(once);
  CHECK(once.records == twice.records);
  CHECK(r2.duplicates_removed == 0);
  CHECK(r2.missing_removed == 0);
  CHECK(once.records[1] == ds.records[3]);
}

TEST_CASE("extract returns fixed-order features and requested label") {
  auto ds = sample_dataset();
  auto [f_li, li] = extract(ds.records[0], Target::LightIntensity);
  CHECK(f_li == FeatureVector{-4.5, 4.1, 13.47, -17.8, -18.2, 3.8});
  CHECK(li == 3.0);
  auto [f_d, d] = extract(ds.records[0], Target::Distance);
  CHECK(f_d == f_li);
  CHECK(d == 25.0);

  TrackingRecord zero{1, 1, 0, 0, 0, 0, 0, 0};
  CHECK(extract(zero, Target::Distance).first == FeatureVector{0, 0, 0, 0, 0, 0});
}

TEST_CASE("class levels are data-driven and sorted") {
  auto ds = sample_dataset();
  CHECK(class_levels(ds, Target::LightIntensity) ==
        std::vector<double>{3, 75, 111, 165});
  CHECK(class_levels(ds, Target::Distance) ==
        std::vector<double>{25, 50, 75, 100});
}

TEST_CASE("rotation_matrix identity and 90-degree yaw") {
  Matrix3 eye{{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}}};
  CHECK(max_abs_diff(rotation_matrix(0, 0, 0), eye) < 1e-15);

  // Rz(90): unit-x maps to unit-y
  auto r = rotation_matrix(90, 0, 0);
  CHECK(std::abs(r[0][0]) < 1e-12);
  CHECK(std::abs(r[1][0] - 1.0) < 1e-12);
  CHECK(std::abs(r[2][0]) < 1e-12);
}

TEST_CASE("rotation_matrix equals elementary-matrix product") {
  auto composed = rotation_matrix(10, 20, 30);
  auto product = matmul(elem_z(10), matmul(elem_y(20), elem_x(30)));
  CHECK(max_abs_diff(composed, product) < 1e-12);
}

TEST_CASE("rotation_matrix orthogonality and determinant, 1000 random triples") {
  Rng rng(42);
  double worst_orth = 0.0, worst_det = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto r = rotation_matrix(rng.uniform(-180, 180), rng.uniform(-90, 90),
                             rng.uniform(-180, 180));
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += r[k][a] * r[k][b];
        worst_orth = std::max(worst_orth, std::abs(dot - (a == b ? 1.0 : 0.0)));
      }
    }
    const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                       r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                       r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    worst_det = std::max(worst_det, std::abs(det - 1.0));
  }
  CHECK(worst_orth <= 1e-12);
  CHECK(worst_det <= 1e-12);
}

TEST_CASE("rotation_matrix rejects non-finite angles") {
  CHECK_THROWS_AS(rotation_matrix(std::nan(""), 0, 0), std::invalid_argument);
}

TEST_CASE("synthesize honors count, determinism and zero-noise collapse") {
  auto conditions = sample_conditions();
  REQUIRE(conditions.size() == 16);

  NoiseModel noise;
  auto a = synthesize(conditions, 10, noise, 7);
  CHECK(a.records.size() == 160);
  auto b = synthesize(conditions, 10, noise, 7);
  CHECK(a.records == b.records);
  CHECK_FALSE(clean(a).first.records.empty());
  CHECK(clean(a).first.records.size() == 160);

  NoiseModel silent;
  silent.sigma.fill(0.0);
  auto c = synthesize(conditions, 10, silent, 7);
  CHECK(clean(c).first.records.size() == 16);
}

TEST_CASE("synthesize rejects empty condition list") {
  CHECK_THROWS_AS(synthesize({}, 10, NoiseModel{}, 1), DataError);
}

TEST_CASE("csv round trip reproduces every field bit-equal") {
  NoiseModel noise;
  auto ds = synthesize(sample_conditions(), 3, noise, 11);
  std::ostringstream out;
  write_csv_stream(ds, out);
  std::istringstream in(out.str());
  auto back = ingest_csv_stream(in, "roundtrip");
  CHECK(back.records == ds.records);
}

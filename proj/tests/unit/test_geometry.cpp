#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include "fps/geometry.hpp"

using namespace fps;
using namespace fps::geometry;

namespace {

const double kPi = std::acos(-1.0);

TriangleMesh unit_cube() {
  TriangleMesh m;
  for (int k = 0; k < 8; ++k) m.vertices.emplace_back(k & 1, (k >> 1) & 1, (k >> 2) & 1);
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rule; });
}

// Straight tube with a spherical-cap tip, no thread, no slot.
ScrewSpec plain_tube() {
  ScrewSpec s = prototype_screw();
  s.thread_height = 0.0;
  s.slot_starts = 0;
  return s;
}

double tube_oracle(const ScrewSpec& s) {
  const double r = s.core_d / 2.0, b = s.cannula_d / 2.0, R = s.tip_r();
  const double h = std::sqrt(R * R - b * b);
  return kPi * (r * r - b * b) * s.total_length() + kPi * (R * R - b * b) * h - kPi * h * h * h / 3.0;
}

}  // namespace

TEST(ValidateSpec, PrototypeDimensionsAreValid) {
  const ScrewSpec s = prototype_screw();
  EXPECT_DOUBLE_EQ(s.od, 9.0);
  EXPECT_DOUBLE_EQ(s.core_d, 6.0);
  EXPECT_DOUBLE_EQ(s.pitch, 4.0);
  EXPECT_DOUBLE_EQ(s.thread_height, 3.0);
  EXPECT_DOUBLE_EQ(s.len_flexible, 30.8);
  EXPECT_DOUBLE_EQ(s.len_rigid, 18.0);
  EXPECT_DOUBLE_EQ(s.cannula_d, 3.0);
  EXPECT_TRUE(validate_spec(s).empty());
}

TEST(ValidateSpec, CannulaEqualToCore) {
  ScrewSpec s = prototype_screw();
  s.cannula_d = 6.0;
  const auto v = validate_spec(s);
  ASSERT_TRUE(has_rule(v, "cannula_d < core_d"));
  for (const auto& x : v) {
    if (x.rule == "cannula_d < core_d") {
      EXPECT_NE(std::find(x.fields.begin(), x.fields.end(), "cannula_d"), x.fields.end());
    }
  }
}

TEST(ValidateSpec, SlotWiderThanPitch) {
  ScrewSpec s = prototype_screw();
  s.slot_width = 5.0;
  EXPECT_TRUE(has_rule(validate_spec(s), "slot_width < slot_pitch"));
}

TEST(ValidateSpec, ReportsEveryViolation) {
  ScrewSpec s = prototype_screw();
  s.len_rigid = 0.0;
  s.pitch = -1.0;
  s.thread_height = 4.0;
  const auto v = validate_spec(s);
  EXPECT_TRUE(has_rule(v, "len_rigid > 0"));
  EXPECT_TRUE(has_rule(v, "pitch > 0"));
  EXPECT_TRUE(has_rule(v, "thread_height <= od - core_d"));
}

TEST(ValidateSpec, TipRadiusRange) {
  ScrewSpec s = prototype_screw();
  s.tip_radius = 3.5;
  EXPECT_FALSE(validate_spec(s).empty());
  s.tip_radius = 1.0;
  EXPECT_FALSE(validate_spec(s).empty());
  s.tip_radius = 2.5;
  EXPECT_TRUE(validate_spec(s).empty());
}

TEST(BuildProfile, PrototypeSpec) {
  const ScrewSpec s = prototype_screw();
  const auto p = build_profile(s);
  ASSERT_FALSE(p.stations.empty());
  EXPECT_DOUBLE_EQ(p.stations.front().z, 0.0);
  double last_body = 0.0;
  for (std::size_t k = 0; k < p.stations.size(); ++k) {
    const auto& st = p.stations[k];
    if (k > 0) {
      EXPECT_GT(st.z, p.stations[k - 1].z);
    }
    EXPECT_LT(st.inner_d, st.outer_d);
    if (st.region != Region::tip) last_body = st.z;
    if (st.region == Region::flexible) {
      EXPECT_DOUBLE_EQ(st.outer_d, 6.0);
      EXPECT_DOUBLE_EQ(st.inner_d, 3.0);
    }
  }
  EXPECT_NEAR(last_body, 48.8, 1e-12);
  EXPECT_EQ(p.stations.back().region, Region::tip);
  EXPECT_LT(p.stations.back().z, s.total_length() + s.tip_r());
}

TEST(BuildProfile, RejectsZeroRigidLength) {
  ScrewSpec s = prototype_screw();
  s.len_rigid = 0.0;
  try {
    build_profile(s);
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_TRUE(has_rule(e.violations(), "len_rigid > 0"));
  }
}

TEST(SectionProperties, Annulus) {
  const auto p = section_properties(6.0, 3.0);
  EXPECT_NEAR(p.area, kPi * (36.0 - 9.0) / 4.0, 1e-12);
  EXPECT_NEAR(p.second_moment, kPi * (1296.0 - 81.0) / 64.0, 1e-12);
  EXPECT_NEAR(p.area, 21.206, 5e-4);
  EXPECT_NEAR(p.second_moment, 59.641, 5e-4);
  EXPECT_NEAR(p.second_moment / 59.64117303, 1.0, 1e-6);
}

TEST(SectionProperties, SolidCircle) {
  for (double d : {0.5, 3.0, 9.0}) {
    const auto p = section_properties(d, 0.0);
    EXPECT_NEAR(p.area, kPi * d * d / 4.0, 1e-12 * d * d);
    EXPECT_NEAR(p.second_moment, kPi * std::pow(d, 4) / 64.0, 1e-12 * std::pow(d, 4));
  }
}

TEST(SectionProperties, VanishingWall) {
  const auto p = section_properties(6.0, 6.0 - 1e-9);
  EXPECT_GT(p.area, 0.0);
  EXPECT_LT(p.area, 1e-7);
  EXPECT_LT(p.second_moment, 1e-6);
}

TEST(SectionProperties, RejectsInvertedDiameters) {
  EXPECT_THROW(section_properties(3.0, 6.0), DomainError);
  EXPECT_THROW(section_properties(6.0, 6.0), DomainError);
  EXPECT_THROW(section_properties(6.0, -1.0), DomainError);
}

TEST(MeshVolume, UnitCube) {
  const auto cube = unit_cube();
  const auto check = check_mesh(cube);
  EXPECT_TRUE(check.closed);
  EXPECT_TRUE(check.consistent);
  EXPECT_NEAR(mesh_volume(cube), 1.0, 1e-15);
}

TEST(MeshVolume, FlippedTriangleIsRejected) {
  auto cube = unit_cube();
  std::swap(cube.triangles[3][0], cube.triangles[3][1]);
  EXPECT_FALSE(check_mesh(cube).consistent);
  EXPECT_THROW(mesh_volume(cube), IntegrityError);
}

TEST(MeshVolume, OpenMeshIsRejected) {
  auto cube = unit_cube();
  cube.triangles.pop_back();
  EXPECT_FALSE(check_mesh(cube).closed);
  EXPECT_THROW(mesh_volume(cube), IntegrityError);
}

TEST(MeshVolume, Cylinder) {
  const auto cyl = make_cylinder(6.0, 10.0, 128);
  const double exact = kPi * 9.0 * 10.0;
  EXPECT_NEAR(exact, 282.74, 5e-3);
  EXPECT_LT(std::abs(mesh_volume(cyl) - exact) / exact, 0.005);
}

TEST(SurfaceMesh, PrototypeSpecIsWatertightWithinBounds) {
  const auto mesh = generate_surface_mesh(prototype_screw(), 64);
  const auto check = check_mesh(mesh);
  EXPECT_TRUE(check.closed) << check.detail;
  EXPECT_TRUE(check.consistent) << check.detail;
  EXPECT_EQ(check.degenerate, 0u);
  const double inner = kPi * (9.0 - 2.25) * 48.8;
  const double outer = kPi * 4.5 * 4.5 * 48.8;
  EXPECT_NEAR(inner, 1034.8, 0.05);
  EXPECT_NEAR(outer, 3104.5, 0.05);
  const double v = mesh_volume(mesh);
  EXPECT_GT(v, inner);
  EXPECT_LT(v, outer);
}

TEST(SurfaceMesh, PlainTubeMatchesClosedForm) {
  const ScrewSpec s = plain_tube();
  const auto mesh = generate_surface_mesh(s, 256, 16);
  ASSERT_TRUE(check_mesh(mesh).closed);
  const double exact = tube_oracle(s);
  EXPECT_LT(std::abs(mesh_volume(mesh) - exact) / exact, 0.005);
}

TEST(SurfaceMesh, RejectsLowResolution) {
  EXPECT_THROW(generate_surface_mesh(prototype_screw(), 4), ResolutionError);
  EXPECT_THROW(generate_surface_mesh(prototype_screw(), 64, 2), ResolutionError);
}

TEST(SurfaceMesh, RejectsInvalidSpec) {
  ScrewSpec s = prototype_screw();
  s.cannula_d = 7.0;
  EXPECT_THROW(generate_surface_mesh(s), SpecError);
}

TEST(SurfaceMesh, VariantsStayWatertight) {
  std::vector<ScrewSpec> specs;
  ScrewSpec a = prototype_screw();
  a.slot_starts = 2;
  a.slot_pitch = 8.0;
  specs.push_back(a);
  ScrewSpec b = prototype_screw();
  b.tip_radius = 2.0;
  specs.push_back(b);
  ScrewSpec c = prototype_screw();
  c.slot_starts = 0;
  specs.push_back(c);
  ScrewSpec d = prototype_screw();
  d.thread_height = 1.0;
  d.pitch = 2.5;
  specs.push_back(d);
  for (const auto& s : specs) {
    const auto mesh = generate_surface_mesh(s, 48, 16);
    const auto check = check_mesh(mesh);
    EXPECT_TRUE(check.closed && check.consistent) << check.detail;
    EXPECT_GT(mesh_volume(mesh), 0.0);
  }
}

TEST(SurfaceMesh, VolumeMonotoneInThreadHeightAndCannula) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> height(0.0, 3.0), bore(1.0, 4.0);
  for (int trial = 0; trial < 4; ++trial) {
    double h1 = height(rng), h2 = height(rng);
    if (h1 > h2) std::swap(h1, h2);
    ScrewSpec s = prototype_screw();
    s.thread_height = h1;
    const double v1 = mesh_volume(generate_surface_mesh(s, 32, 8));
    s.thread_height = h2 + 0.05;
    const double v2 = mesh_volume(generate_surface_mesh(s, 32, 8));
    EXPECT_LT(v1, v2);

    double c1 = bore(rng), c2 = bore(rng);
    if (c1 > c2) std::swap(c1, c2);
    s = prototype_screw();
    s.cannula_d = c1;
    const double w1 = mesh_volume(generate_surface_mesh(s, 32, 8));
    s.cannula_d = c2 + 0.05;
    const double w2 = mesh_volume(generate_surface_mesh(s, 32, 8));
    EXPECT_GT(w1, w2);
  }
}

TEST(BuildTransform, AngleZeroKeepsVolume) {
  const auto mesh = make_cylinder(6.0, 10.0, 64);
  const auto t = transform_for_build(mesh, 0.0);
  const Eigen::Vector3d axis = build_rotation(0.0) * Eigen::Vector3d::UnitZ();
  EXPECT_NEAR(axis.z(), 0.0, 1e-12);
  EXPECT_NEAR(mesh_volume(t) / mesh_volume(mesh), 1.0, 1e-9);
}

TEST(BuildTransform, ThirtyFiveDegrees) {
  const auto mesh = generate_surface_mesh(prototype_screw(), 32, 8);
  const auto t = transform_for_build(mesh, 35.0);
  const Eigen::Vector3d axis = build_rotation(35.0) * Eigen::Vector3d::UnitZ();
  EXPECT_NEAR(axis.dot(Eigen::Vector3d::UnitZ()), std::sin(35.0 * kPi / 180.0), 1e-9);
  double min_z = t.vertices[0].z();
  for (const auto& v : t.vertices) min_z = std::min(min_z, v.z());
  EXPECT_NEAR(min_z, 0.0, 1e-12);
  EXPECT_NEAR(mesh_volume(t) / mesh_volume(mesh), 1.0, 1e-9);
}

TEST(BuildTransform, NinetyDegreesIsVertical) {
  const Eigen::Vector3d axis = build_rotation(90.0) * Eigen::Vector3d::UnitZ();
  EXPECT_NEAR(axis.z(), 1.0, 1e-12);
}

TEST(BuildTransform, PreservesPairwiseDistances) {
  const auto mesh = make_cylinder(4.0, 7.0, 24);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(-90.0, 90.0);
  std::uniform_int_distribution<std::size_t> pick(0, mesh.vertices.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = transform_for_build(mesh, angle(rng));
    for (int k = 0; k < 50; ++k) {
      const std::size_t a = pick(rng), b = pick(rng);
      const double d0 = (mesh.vertices[a] - mesh.vertices[b]).norm();
      const double d1 = (t.vertices[a] - t.vertices[b]).norm();
      EXPECT_NEAR(d1, d0, 1e-9 * std::max(1.0, d0));
    }
    EXPECT_NEAR(mesh_volume(t) / mesh_volume(mesh), 1.0, 1e-9);
  }
}

TEST(Stl, TwoTriangleSquareIs184Bytes) {
  TriangleMesh square;
  square.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  square.triangles = {{0, 1, 2}, {0, 2, 3}};
  std::ostringstream os;
  export_stl(square, os);
  EXPECT_EQ(os.str().size(), 184u);
  EXPECT_NE(os.str().rfind("solid", 0), 0u);
}

TEST(Stl, RoundTripPreservesCountAndVolume) {
  const auto mesh = generate_surface_mesh(prototype_screw(), 64);
  std::stringstream buf;
  export_stl(mesh, buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 84 + 50 * mesh.triangles.size());
  std::uint32_t count = 0;
  for (int k = 0; k < 4; ++k) count |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[80 + k])) << (8 * k);
  EXPECT_EQ(count, mesh.triangles.size());

  const auto back = import_stl(buf);
  EXPECT_EQ(back.triangles.size(), mesh.triangles.size());
  const auto check = check_mesh(back);
  EXPECT_TRUE(check.closed && check.consistent) << check.detail;
  const double v0 = mesh_volume(mesh), v1 = mesh_volume(back);
  EXPECT_LT(std::abs(v1 - v0) / v0, 1e-6);
}

TEST(Stl, RejectsBadIndexAndTruncatedInput) {
  TriangleMesh bad;
  bad.vertices = {{0, 0, 0}};
  bad.triangles = {{0, 1, 2}};
  std::ostringstream os;
  EXPECT_THROW(export_stl(bad, os), IntegrityError);

  std::istringstream empty(std::string(40, '\0'));
  EXPECT_THROW(import_stl(empty), IoError);
}

TEST(Stl, WriteFailureNamesDestination) {
  const auto cube = unit_cube();
  try {
    export_stl(cube, std::filesystem::path("/nonexistent-dir/cube.stl"));
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.destination(), "/nonexistent-dir/cube.stl");
  }
}

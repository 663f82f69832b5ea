#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <Eigen/Geometry>

#include "fps/geometry.hpp"

namespace fps::geometry {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

MeshCheck check_mesh(const TriangleMesh& mesh) {
  MeshCheck check;
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  const auto nv = static_cast<std::uint32_t>(mesh.vertices.size());

  for (const auto& t : mesh.triangles) {
    if (t[0] >= nv || t[1] >= nv || t[2] >= nv) {
      check.detail = "triangle references a missing vertex";
      return check;
    }
    const Eigen::Vector3d n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                                  .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || n.squaredNorm() == 0.0) {
      ++check.degenerate;
    }
    for (int k = 0; k < 3; ++k) ++directed[edge_key(t[k], t[(k + 1) % 3])];
  }

  check.closed = true;
  check.consistent = true;
  for (const auto& [key, count] : directed) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    const auto twin = directed.find(edge_key(b, a));
    const int twin_count = twin == directed.end() ? 0 : twin->second;
    if (count + twin_count != 2) {
      if (check.closed) {
        std::ostringstream os;
        os << "edge (" << a << ", " << b << ") used by " << count + twin_count << " triangles";
        check.detail = os.str();
      }
      check.closed = false;
    }
    if (count != 1 || twin_count != 1) {
      if (check.detail.empty()) {
        std::ostringstream os;
        os << "edge (" << a << ", " << b << ") has inconsistent winding";
        check.detail = os.str();
      }
      check.consistent = false;
    }
  }
  return check;
}

double mesh_volume(const TriangleMesh& mesh) {
  const MeshCheck check = check_mesh(mesh);
  if (!check.closed || !check.consistent) {
    throw IntegrityError("mesh_volume: mesh is not a closed oriented surface (" + check.detail +
                         ")");
  }
  // sum in long double; the screw mesh has ~1e5 triangles of mixed sign
  long double six_v = 0.0L;
  for (const auto& t : mesh.triangles) {
    const auto& a = mesh.vertices[t[0]];
    const auto& b = mesh.vertices[t[1]];
    const auto& c = mesh.vertices[t[2]];
    six_v += a.dot(b.cross(c));
  }
  return static_cast<double>(six_v / 6.0L);
}

Eigen::Matrix3d build_rotation(double angle_deg) {
  // tilt +z toward +x about the y axis; the axis then rises angle_deg above the plate
  const double tilt = (90.0 - angle_deg) * std::numbers::pi / 180.0;
  return Eigen::AngleAxisd(tilt, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

TriangleMesh transform_for_build(const TriangleMesh& mesh, double angle_deg) {
  const Eigen::Matrix3d rot = build_rotation(angle_deg);
  TriangleMesh out;
  out.triangles = mesh.triangles;
  out.vertices.reserve(mesh.vertices.size());
  double min_z = std::numeric_limits<double>::infinity();
  for (const auto& v : mesh.vertices) {
    out.vertices.push_back(rot * v);
    min_z = std::min(min_z, out.vertices.back().z());
  }
  if (!out.vertices.empty()) {
    for (auto& v : out.vertices) v.z() -= min_z;
  }
  return out;
}

}  // namespace fps::geometry

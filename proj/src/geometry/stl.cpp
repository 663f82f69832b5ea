#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <Eigen/Geometry>

#include "fps/geometry.hpp"

namespace fps::geometry {

namespace {

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kFacetBytes = 50;

void put_u32(char* dst, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
}

std::uint32_t get_u32(const char* src) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(src[i])) << (8 * i);
  return v;
}

void put_f32(char* dst, float f) { put_u32(dst, std::bit_cast<std::uint32_t>(f)); }
float get_f32(const char* src) { return std::bit_cast<float>(get_u32(src)); }

}  // namespace

void export_stl(const TriangleMesh& mesh, std::ostream& out, const std::string& destination) {
  for (const auto& t : mesh.triangles) {
    for (auto v : t) {
      if (v >= mesh.vertices.size()) throw IntegrityError("export_stl: vertex index out of range");
    }
  }

  std::array<char, kHeaderBytes + 4> head{};
  // must not start with "solid": readers take that as ASCII STL
  constexpr char title[] = "binary STL: flexible pedicle screw, units mm";
  std::memcpy(head.data(), title, sizeof(title) - 1);
  put_u32(head.data() + kHeaderBytes, static_cast<std::uint32_t>(mesh.triangles.size()));
  out.write(head.data(), head.size());

  std::array<char, kFacetBytes> facet{};
  for (const auto& t : mesh.triangles) {
    std::array<Eigen::Vector3f, 3> p;
    for (int k = 0; k < 3; ++k) p[k] = mesh.vertices[t[k]].cast<float>();
    Eigen::Vector3f n = (p[1] - p[0]).cross(p[2] - p[0]);
    const float len = n.norm();
    if (len > 0.0f) n /= len;
    char* cur = facet.data();
    for (int k = 0; k < 3; ++k, cur += 4) put_f32(cur, n[k]);
    for (const auto& v : p) {
      for (int k = 0; k < 3; ++k, cur += 4) put_f32(cur, v[k]);
    }
    cur[0] = cur[1] = 0;  // attribute byte count
    out.write(facet.data(), facet.size());
  }
  out.flush();
  if (!out) throw IoError("export_stl: write failed", destination);
}

void export_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("export_stl: cannot open for writing", path.string());
  export_stl(mesh, file, path.string());
}

TriangleMesh import_stl(std::istream& in, const std::string& source) {
  std::array<char, kHeaderBytes + 4> head{};
  if (!in.read(head.data(), head.size())) throw IoError("import_stl: truncated header", source);
  const std::uint32_t count = get_u32(head.data() + kHeaderBytes);

  TriangleMesh mesh;
  mesh.triangles.reserve(count);
  std::map<std::array<std::uint32_t, 3>, std::uint32_t> weld;
  std::array<char, kFacetBytes> facet{};
  for (std::uint32_t f = 0; f < count; ++f) {
    if (!in.read(facet.data(), facet.size())) {
      throw IoError("import_stl: truncated at facet " + std::to_string(f), source);
    }
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      const char* base = facet.data() + 12 + 12 * k;
      std::array<std::uint32_t, 3> bits{get_u32(base), get_u32(base + 4), get_u32(base + 8)};
      for (auto& b : bits) {
        if (b == 0x80000000u) b = 0;  // -0.0f welds with +0.0f
      }
      auto [it, fresh] = weld.try_emplace(bits, static_cast<std::uint32_t>(mesh.vertices.size()));
      if (fresh) {
        mesh.vertices.emplace_back(get_f32(base), get_f32(base + 4), get_f32(base + 8));
      }
      tri[k] = it->second;
    }
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

TriangleMesh import_stl(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("import_stl: cannot open", path.string());
  return import_stl(file, path.string());
}

}  // namespace fps::geometry

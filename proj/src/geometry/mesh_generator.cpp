// Structured surface mesher for hollow, threaded, helically slotted tubes.
//
// The surface lives on a (theta, z) parameter grid: columns are equal angular
// steps, rows are axial stations. Outer and bore surfaces share one
// triangulation of that grid, so every boundary edge of the outer surface has
// a twin on the bore and the two are joined by a wall quad. Slot cuts are
// straight lines in parameter space (helices in 3D); cells are clipped against
// them marching-squares style, with crossing points keyed by grid edge so that
// neighbouring cells agree on them.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "fps/geometry.hpp"

namespace fps::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Row {
  double z = 0.0;
  Region region = Region::rigid;
  double cap_radius = 0.0;  // used by tip rows only
};

struct SlotBand {
  double lead = 0.0;    // axial advance per turn
  double period = 0.0;  // axial distance between adjacent slot turns
  double width = 0.0;
  double phase = 0.0;   // band occupies phase in (0, width) mod period
  int row_begin = 0;    // cells with row index in [row_begin, row_end) are cut
  int row_end = 0;
};

struct ThreadShape {
  double core_r = 0.0;
  double depth = 0.0;
  double pitch = 1.0;
  double flank = 0.0;  // axial run of one flank
  double crest = 0.0;
  double runout_end = 0.0;  // thread fades to zero over one pitch before this z
};

struct SolidLayout {
  int columns = 0;
  std::vector<Row> rows;
  ThreadShape thread;
  double bore_r = 0.0;
  std::optional<SlotBand> slot;
};

// Trapezoid height in [0, 1] at axial offset s within one pitch.
double thread_profile(const ThreadShape& t, double s) {
  if (t.depth <= 0.0) return 0.0;
  if (s < t.flank) return t.flank > 0.0 ? s / t.flank : 1.0;
  if (s < t.flank + t.crest) return 1.0;
  if (s < 2.0 * t.flank + t.crest) return t.flank > 0.0 ? (2.0 * t.flank + t.crest - s) / t.flank : 0.0;
  return 0.0;
}

double outer_radius(const SolidLayout& L, double theta, double z, const Row& row) {
  if (row.region == Region::tip) return row.cap_radius;
  const ThreadShape& t = L.thread;
  if (t.depth <= 0.0) return t.core_r;
  const double helix = z - t.pitch * theta / kTwoPi;
  double s = std::fmod(helix, t.pitch);
  if (s < 0.0) s += t.pitch;
  const double fade = std::clamp((t.runout_end - z) / t.pitch, 0.0, 1.0);
  return t.core_r + t.depth * fade * thread_profile(t, s);
}

class SurfaceBuilder {
 public:
  explicit SurfaceBuilder(const SolidLayout& layout) : L_(layout), n_(layout.columns) {}

  TriangleMesh build();

 private:
  struct PVert {
    std::uint32_t outer = 0;
    std::uint32_t inner = 0;
    double theta = 0.0;  // unwrapped within the owning cell
    double z = 0.0;
  };

  std::uint32_t add_vertex(double r, double theta, double z) {
    mesh_.vertices.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
    return static_cast<std::uint32_t>(mesh_.vertices.size() - 1);
  }

  double theta_of(int i) const { return kTwoPi * i / n_; }
  bool in_zone_cell(int j) const {
    return L_.slot && j >= L_.slot->row_begin && j < L_.slot->row_end;
  }
  bool zone_row(int j) const {
    return L_.slot && j >= L_.slot->row_begin && j <= L_.slot->row_end;
  }
  double phase(double theta, double z) const {
    return z - L_.slot->phase - L_.slot->lead * theta / kTwoPi;
  }
  bool is_cut(double theta, double z) const {
    double p = std::fmod(phase(theta, z), L_.slot->period);
    if (p < 0.0) p += L_.slot->period;
    return p < L_.slot->width;
  }

  void make_grid_vertices();
  std::optional<PVert> crossing(int i0, int j0, int i1, int j1, std::map<std::uint64_t, std::optional<PVert>>& cache,
                                std::uint64_t key);
  std::optional<PVert> h_cross(int i, int j);
  std::optional<PVert> v_cross(int i, int j);
  PVert corner(int i, int j) const;
  void emit(std::uint32_t a, std::uint32_t b, std::uint32_t c);
  void emit_polygon(const std::vector<PVert>& poly, bool plain_quad);
  PVert steiner(const std::vector<PVert>& poly);

  const SolidLayout& L_;
  int n_;
  TriangleMesh mesh_;
  std::vector<std::uint32_t> outer_ids_;  // (rows) x (columns)
  std::vector<std::uint32_t> inner_ids_;
  std::map<std::uint64_t, std::optional<PVert>> h_cache_;
  std::map<std::uint64_t, std::optional<PVert>> v_cache_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> boundary_;  // directed outer edge -> use
  std::map<std::uint32_t, std::uint32_t> outer_to_inner_;
};

void SurfaceBuilder::make_grid_vertices() {
  const int rows = static_cast<int>(L_.rows.size());
  outer_ids_.assign(static_cast<std::size_t>(rows) * n_, 0);
  inner_ids_.assign(static_cast<std::size_t>(rows) * n_, 0);
  for (int j = 0; j < rows; ++j) {
    const Row& row = L_.rows[j];
    std::optional<std::uint32_t> axis;
    if (L_.bore_r <= 0.0) axis = add_vertex(0.0, 0.0, row.z);
    // a ring that closes onto the bore (tip apex) or the axis shares vertices
    bool closed = true;
    for (int i = 0; i < n_; ++i) {
      if (outer_radius(L_, theta_of(i), row.z, row) != L_.bore_r) closed = false;
    }
    for (int i = 0; i < n_; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n_ + i;
      inner_ids_[k] = axis ? *axis : add_vertex(L_.bore_r, theta_of(i), row.z);
      outer_ids_[k] = closed ? inner_ids_[k]
                             : add_vertex(outer_radius(L_, theta_of(i), row.z, row), theta_of(i), row.z);
    }
  }
}

SurfaceBuilder::PVert SurfaceBuilder::corner(int i, int j) const {
  const std::size_t k = static_cast<std::size_t>(j) * n_ + (i % n_);
  return {outer_ids_[k], inner_ids_[k], theta_of(i), L_.rows[j].z};
}

std::optional<SurfaceBuilder::PVert> SurfaceBuilder::crossing(
    int i0, int j0, int i1, int j1, std::map<std::uint64_t, std::optional<PVert>>& cache,
    std::uint64_t key) {
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const PVert a = corner(i0, j0);
  const PVert b = corner(i1, j1);
  std::optional<PVert> result;
  if (is_cut(a.theta, a.z) != is_cut(b.theta, b.z)) {
    const auto& band = *L_.slot;
    const double pa = phase(a.theta, a.z);
    const double pb = phase(b.theta, b.z);
    const double lo = std::min(pa, pb);
    const double hi = std::max(pa, pb);
    // exactly one band edge lies strictly inside (lo, hi) at a resolved grid
    double level = std::floor(hi / band.period) * band.period;
    if (!(level > lo)) level = std::floor((hi - band.width) / band.period) * band.period + band.width;
    const double t = (level - pa) / (pb - pa);
    PVert v;
    v.theta = a.theta + t * (b.theta - a.theta);
    v.z = a.z + t * (b.z - a.z);
    const Row& row = L_.rows[j0];
    v.outer = add_vertex(outer_radius(L_, v.theta, v.z, row), v.theta, v.z);
    v.inner = add_vertex(L_.bore_r, v.theta, v.z);
    result = v;
  }
  cache.emplace(key, result);
  return result;
}

std::optional<SurfaceBuilder::PVert> SurfaceBuilder::h_cross(int i, int j) {
  if (!zone_row(j)) return std::nullopt;
  const std::uint64_t key = static_cast<std::uint64_t>(j) * n_ + (i % n_);
  return crossing(i, j, i + 1, j, h_cache_, key);
}

std::optional<SurfaceBuilder::PVert> SurfaceBuilder::v_cross(int i, int j) {
  if (!in_zone_cell(j)) return std::nullopt;
  const std::uint64_t key = static_cast<std::uint64_t>(j) * n_ + (i % n_);
  // compute with the canonical column so the seam column agrees with column 0
  auto v = crossing(i % n_, j, i % n_, j + 1, v_cache_, key);
  if (v && i >= n_) v->theta += kTwoPi;
  return v;
}

void SurfaceBuilder::emit(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  if (a == b || b == c || a == c) return;
  mesh_.triangles.push_back({a, b, c});
}

SurfaceBuilder::PVert SurfaceBuilder::steiner(const std::vector<PVert>& poly) {
  PVert c;
  for (const auto& p : poly) {
    c.theta += p.theta;
    c.z += p.z;
  }
  c.theta /= static_cast<double>(poly.size());
  c.z /= static_cast<double>(poly.size());
  // find the row for the outer radius: steiner points only arise in cut cells
  auto it = std::upper_bound(L_.rows.begin(), L_.rows.end(), c.z,
                             [](double z, const Row& r) { return z < r.z; });
  const Row& row = *(it == L_.rows.begin() ? it : std::prev(it));
  c.outer = add_vertex(outer_radius(L_, c.theta, c.z, row), c.theta, c.z);
  c.inner = add_vertex(L_.bore_r, c.theta, c.z);
  return c;
}

void SurfaceBuilder::emit_polygon(const std::vector<PVert>& poly, bool plain_quad) {
  const std::size_t m = poly.size();
  if (m < 3) return;

  for (std::size_t k = 0; k < m; ++k) {
    ++boundary_[{poly[k].outer, poly[(k + 1) % m].outer}];
    outer_to_inner_[poly[k].outer] = poly[k].inner;
  }

  auto fan = [&](const PVert& apex, std::size_t first, std::size_t count) {
    for (std::size_t k = 0; k + 1 < count; ++k) {
      const PVert& b = poly[(first + k) % m];
      const PVert& c = poly[(first + k + 1) % m];
      emit(apex.outer, b.outer, c.outer);
      emit(apex.inner, c.inner, b.inner);
    }
  };

  if (plain_quad) {
    fan(poly[0], 1, m - 1);
    return;
  }

  // fan from a vertex that gives no zero-area triangle in parameter space
  auto area2 = [](const PVert& a, const PVert& b, const PVert& c) {
    return (b.theta - a.theta) * (c.z - a.z) - (b.z - a.z) * (c.theta - a.theta);
  };
  for (std::size_t apex = 0; apex < m; ++apex) {
    bool ok = true;
    for (std::size_t k = 1; k + 1 < m && ok; ++k) {
      ok = area2(poly[apex], poly[(apex + k) % m], poly[(apex + k + 1) % m]) > 1e-14;
    }
    if (ok) {
      fan(poly[apex], apex + 1, m - 1);
      return;
    }
  }
  const PVert c = steiner(poly);
  for (std::size_t k = 0; k < m; ++k) {
    const PVert& a = poly[k];
    const PVert& b = poly[(k + 1) % m];
    emit(c.outer, a.outer, b.outer);
    emit(c.inner, b.inner, a.inner);
  }
}

TriangleMesh SurfaceBuilder::build() {
  make_grid_vertices();
  const int rows = static_cast<int>(L_.rows.size());

  for (int j = 0; j + 1 < rows; ++j) {
    const bool cut_cell = in_zone_cell(j);
    for (int i = 0; i < n_; ++i) {
      // counter-clockwise in (theta, z): maps to the outward normal on the outer surface
      const PVert c[4] = {corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)};
      const std::optional<PVert> x[4] = {h_cross(i, j), v_cross(i + 1, j), h_cross(i, j + 1),
                                         v_cross(i, j)};
      bool solid[4] = {true, true, true, true};
      if (cut_cell) {
        for (int k = 0; k < 4; ++k) solid[k] = !is_cut(c[k].theta, c[k].z);
      }
      std::vector<PVert> poly;
      poly.reserve(6);
      bool plain = true;
      for (int k = 0; k < 4; ++k) {
        if (solid[k]) poly.push_back(c[k]);
        if (x[k]) {
          poly.push_back(*x[k]);
          plain = false;
        }
      }
      emit_polygon(poly, plain && poly.size() == 4);
    }
  }

  // walls: every outer edge used once in parameter space bounds the solid
  for (const auto& [edge, count] : boundary_) {
    if (count != 1) continue;
    if (boundary_.count({edge.second, edge.first})) continue;
    const std::uint32_t oa = edge.first;
    const std::uint32_t ob = edge.second;
    const std::uint32_t ia = outer_to_inner_.at(oa);
    const std::uint32_t ib = outer_to_inner_.at(ob);
    emit(ob, oa, ia);
    emit(ob, ia, ib);
  }

  // drop unused vertices (axis points between the end caps)
  std::vector<std::int64_t> remap(mesh_.vertices.size(), -1);
  for (const auto& t : mesh_.triangles) {
    for (auto v : t) remap[v] = 0;
  }
  TriangleMesh out;
  for (std::size_t v = 0; v < remap.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<std::int64_t>(out.vertices.size());
    out.vertices.push_back(mesh_.vertices[v]);
  }
  out.triangles.reserve(mesh_.triangles.size());
  for (const auto& t : mesh_.triangles) {
    out.triangles.push_back({static_cast<std::uint32_t>(remap[t[0]]),
                             static_cast<std::uint32_t>(remap[t[1]]),
                             static_cast<std::uint32_t>(remap[t[2]])});
  }
  return out;
}

// Uniform rows on [z0, z1] with spacing no larger than dz; appends the interior
// and end stations, never z0.
void append_rows(std::vector<Row>& rows, double z0, double z1, double dz, Region region) {
  const int n = std::max(1, static_cast<int>(std::ceil((z1 - z0) / dz - 1e-9)));
  for (int k = 1; k <= n; ++k) rows.push_back({k == n ? z1 : z0 + (z1 - z0) * k / n, region, 0.0});
}

// Phase offset that keeps every grid vertex away from the slot edges. Vertex
// phases fall on a lattice of spacing g; the two band edges sit at 0 and width.
double resolve_phase(double nominal, double zone_start, double period, double width, int rows_per_period,
                     int columns) {
  const long long lattice = std::lcm(static_cast<long long>(rows_per_period), static_cast<long long>(columns));
  const double g = period / static_cast<double>(lattice);
  const double r = std::fmod(width, g);
  const double target = r / 2.0 >= (g - r) / 2.0 ? r / 2.0 : (r + g) / 2.0;
  double d = std::fmod(zone_start - nominal - target, g);
  if (d < 0.0) d += g;
  return nominal + d;
}

TriangleMesh build_layout(const SolidLayout& layout) {
  SurfaceBuilder builder(layout);
  return builder.build();
}

}  // namespace

TriangleMesh generate_surface_mesh(const ScrewSpec& spec, int segments_per_turn, int axial_segments) {
  if (auto v = validate_spec(spec); !v.empty()) throw SpecError(std::move(v));
  if (segments_per_turn < 16) {
    throw ResolutionError("generate_surface_mesh: segments_per_turn must be at least 16, got " +
                          std::to_string(segments_per_turn));
  }
  if (axial_segments < 4) {
    throw ResolutionError("generate_surface_mesh: axial_segments must be at least 4, got " +
                          std::to_string(axial_segments));
  }

  SolidLayout L;
  L.columns = segments_per_turn;
  L.bore_r = spec.cannula_d / 2.0;
  L.thread.core_r = spec.core_d / 2.0;
  L.thread.depth = spec.radial_thread_depth();
  L.thread.pitch = spec.pitch;
  L.thread.flank = L.thread.depth * std::tan(spec.thread_flank_deg * std::numbers::pi / 180.0);
  L.thread.crest = spec.thread_crest_fraction * spec.pitch;
  L.thread.runout_end = spec.total_length();

  const bool slotted = spec.slot_starts > 0;
  const double dz = (slotted ? std::min(spec.pitch, spec.slot_pitch) : spec.pitch) / axial_segments;

  auto& rows = L.rows;
  rows.push_back({0.0, Region::rigid, 0.0});
  append_rows(rows, 0.0, spec.len_rigid, dz, Region::rigid);

  const double flex_begin = spec.len_rigid;
  const double flex_end = spec.total_length();
  if (slotted) {
    SlotBand band;
    band.period = spec.slot_pitch;
    band.lead = spec.slot_pitch * spec.slot_starts;
    band.width = spec.slot_width;
    const int per_period = std::max(1, static_cast<int>(std::ceil(spec.slot_pitch / dz - 1e-9)));
    const double zone_dz = spec.slot_pitch / per_period;

    const double cell_span = zone_dz + band.lead / segments_per_turn;
    const double feature = std::min(band.width, band.period - band.width);
    if (!(cell_span < feature)) {
      std::ostringstream os;
      os << "generate_surface_mesh: grid cell spans " << cell_span
         << " mm of slot phase, needs < " << feature
         << " mm to resolve slot_width; raise segments_per_turn or axial_segments";
      throw ResolutionError(os.str());
    }

    const double zone_begin = flex_begin + spec.slot_width;
    const int zone_cells = static_cast<int>(std::floor((flex_end - spec.slot_width - zone_begin) / zone_dz + 1e-9));
    const double zone_end = zone_begin + zone_cells * zone_dz;

    append_rows(rows, flex_begin, zone_begin, dz, Region::flexible);
    band.row_begin = static_cast<int>(rows.size()) - 1;
    for (int k = 1; k <= zone_cells; ++k) rows.push_back({zone_begin + zone_dz * k, Region::flexible, 0.0});
    band.row_end = static_cast<int>(rows.size()) - 1;
    append_rows(rows, zone_end, flex_end, dz, Region::flexible);

    // centre the slot in the thread root where the thread meets it
    const double root_mid = (2.0 * L.thread.flank + L.thread.crest + spec.pitch) / 2.0;
    band.phase = resolve_phase(root_mid - band.width / 2.0, zone_begin, band.period, band.width,
                               per_period, segments_per_turn);
    L.slot = band;
  } else {
    append_rows(rows, flex_begin, flex_end, dz, Region::flexible);
  }

  // rounded tip: spherical cap from the core ring down to the bore
  const double r_tip = spec.tip_r();
  const double apex = std::acos(std::min(1.0, L.bore_r / r_tip));
  const int n_cap = std::max(4, static_cast<int>(std::ceil(r_tip * apex / dz)));
  if (r_tip < L.thread.core_r) rows.push_back({flex_end, Region::tip, r_tip});
  for (int k = 1; k <= n_cap; ++k) {
    const double a = apex * k / n_cap;
    const double radius = k == n_cap ? L.bore_r : r_tip * std::cos(a);
    rows.push_back({flex_end + r_tip * std::sin(a), Region::tip, radius});
  }

  return build_layout(L);
}

TriangleMesh make_cylinder(double diameter, double length, int segments) {
  if (!(diameter > 0.0) || !(length > 0.0)) throw DomainError("make_cylinder: need positive size");
  if (segments < 3) throw ResolutionError("make_cylinder: need at least 3 segments");
  SolidLayout L;
  L.columns = segments;
  L.bore_r = 0.0;
  L.thread.core_r = diameter / 2.0;
  L.thread.depth = 0.0;
  L.rows = {{0.0, Region::rigid, 0.0}, {length, Region::rigid, 0.0}};
  return build_layout(L);
}

}  // namespace fps::geometry

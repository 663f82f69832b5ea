#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fps/errors.hpp"

namespace fps::geometry {

/// Parametric dimensions of the flexible pedicle screw, all lengths in mm.
///
/// `thread_height` is diametral: the radial thread depth is thread_height / 2,
/// so the stock values (od 9, core 6, height 3) describe a 1.5 mm deep thread.
struct ScrewSpec {
  double od = 9.0;
  double core_d = 6.0;
  double pitch = 4.0;
  double thread_height = 3.0;
  double len_flexible = 30.8;
  double len_rigid = 18.0;
  double cannula_d = 3.0;
  /// Hemispherical tip radius; unset means core_d / 2.
  std::optional<double> tip_radius;
  double slot_width = 1.0;
  double slot_pitch = 4.0;
  /// Number of helical slot starts; 0 leaves the flexible region uncut.
  int slot_starts = 1;
  /// Crest width of the trapezoidal thread as a fraction of pitch.
  double thread_crest_fraction = 0.125;
  /// Flank angle measured from the radial plane.
  double thread_flank_deg = 30.0;

  double tip_r() const { return tip_radius.value_or(core_d / 2.0); }
  double radial_thread_depth() const { return thread_height / 2.0; }
  double total_length() const { return len_rigid + len_flexible; }
};

/// The 9 mm prototype with default values for the open thread and slot details.
ScrewSpec prototype_screw();

struct Violation {
  std::vector<std::string> fields;
  std::string rule;
};

/// Every violated invariant of `spec`; empty when the spec is usable.
std::vector<Violation> validate_spec(const ScrewSpec& spec);

/// Thrown when an operation receives a spec that fails validate_spec.
class SpecError : public DomainError {
 public:
  explicit SpecError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

enum class Region { rigid, flexible, tip };

const char* to_string(Region region);

struct Station {
  double z = 0.0;
  double outer_d = 0.0;
  double inner_d = 0.0;
  Region region = Region::rigid;
};

/// Axial decomposition of the load-bearing section. The outer diameter is the
/// thread-root (core) diameter; thread material is not part of the section.
struct SectionProfile {
  std::vector<Station> stations;
};

SectionProfile build_profile(const ScrewSpec& spec);

struct SectionProperties {
  double area = 0.0;           // mm^2
  double second_moment = 0.0;  // mm^4
};

/// Annulus properties. Throws DomainError unless 0 <= inner_d < outer_d.
SectionProperties section_properties(double outer_d, double inner_d);

using Triangle = std::array<std::uint32_t, 3>;

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Triangle> triangles;
};

struct MeshCheck {
  bool closed = false;      // every undirected edge in exactly two triangles
  bool consistent = false;  // each directed edge used once, opposite its twin
  std::size_t degenerate = 0;
  std::string detail;       // first problem found, empty when clean
};

MeshCheck check_mesh(const TriangleMesh& mesh);

/// Signed volume by the divergence theorem. Throws IntegrityError when the
/// mesh is not closed or not consistently oriented.
double mesh_volume(const TriangleMesh& mesh);

/// Surface mesh of the screw with its axis on +z, head end at z = 0.
///
/// `segments_per_turn` is the circumferential resolution (>= 16) and
/// `axial_segments` the number of axial rows per thread or slot pitch,
/// whichever is shorter (>= 4). Throws SpecError for an invalid spec and
/// ResolutionError when the grid cannot resolve the flexure slot.
TriangleMesh generate_surface_mesh(const ScrewSpec& spec, int segments_per_turn = 64,
                                   int axial_segments = 32);

/// Plain solid cylinder on +z from 0 to `length`, flat ends.
TriangleMesh make_cylinder(double diameter, double length, int segments);

/// Rotation taking the screw axis (+z) to make `angle_deg` with the XY plane.
Eigen::Matrix3d build_rotation(double angle_deg);

/// Rotates by build_rotation(angle_deg) and lifts the result to min z = 0.
TriangleMesh transform_for_build(const TriangleMesh& mesh, double angle_deg);

/// Binary STL. Watertightness is the caller's concern; out-of-range indices
/// raise IntegrityError and write failures raise IoError naming the destination.
void export_stl(const TriangleMesh& mesh, std::ostream& out,
                const std::string& destination = "<stream>");
void export_stl(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Reads binary STL and welds vertices with identical 32-bit coordinates.
TriangleMesh import_stl(std::istream& in, const std::string& source = "<stream>");
TriangleMesh import_stl(const std::filesystem::path& path);

}  // namespace fps::geometry

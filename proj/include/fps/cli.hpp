#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fps/geometry.hpp"
#include "fps/material.hpp"
#include "fps/solver.hpp"
#include "fps/validation.hpp"

namespace fps::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kDataError = 4 };

/// Invalid run configuration; carries every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct CalibrationTarget {
  double delta_mm = 6.0;
  double force_n = 4.67;
};

struct SolverConfig {
  int n_elements = 64;
  solver::SolverSettings settings;
  std::optional<material::BendingPolicy> bending_policy;
  std::optional<double> kappa_f;
  std::optional<CalibrationTarget> calibration;
  solver::Protocol protocol;
};

struct MeshConfig {
  int segments_per_turn = 64;
  int axial_segments = 32;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  std::string stl = "screw.stl";
  std::string sections = "sections.csv";
  std::string figure = "overlay.svg";
};

struct RunConfig {
  std::optional<geometry::ScrewSpec> screw;
  MeshConfig mesh;
  /// Inline material, or the sensitivity set when `paper_sweep` is set.
  std::vector<material::MaterialModel> materials;
  bool paper_sweep = false;
  std::optional<SolverConfig> solver;
  OutputConfig output;
};

/// Parses JSON text. Unknown keys, wrong types and violated invariants are
/// collected into a single ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Materials with the solver's bending policy applied when one is configured.
std::vector<material::MaterialModel> resolved_materials(const RunConfig& config);

/// kappa_f from the config, calibrating against the first material when a
/// target is given instead.
double resolve_kappa(const RunConfig& config);

/// "155_150" -> "155/150"; other stems are returned unchanged.
std::string label_from_stem(const std::string& stem);

struct ValidateInputs {
  std::vector<std::filesystem::path> fe;
  std::vector<std::filesystem::path> experimental;
};

/// Zero-offsets and averages the experimental runs on their common grid,
/// resamples every FE curve onto it and returns one report row per FE curve.
std::vector<validation::MetricsReport> validate_curves(const ValidateInputs& inputs);

/// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fps::cli

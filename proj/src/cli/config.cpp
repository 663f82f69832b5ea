#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fps/cli.hpp"

namespace fps::cli {

namespace {

using nlohmann::json;

std::string join_problems(const std::vector<std::string>& problems) {
  std::string text = "invalid configuration";
  for (const auto& p : problems) text += "\n  " + p;
  return text;
}

// Reads the keys of one JSON object, recording type errors and unknown keys.
class Reader {
 public:
  Reader(const json& object, std::string path, std::vector<std::string>& problems)
      : object_(object), path_(std::move(path)), problems_(problems) {}

  bool has(const char* key) const { return object_.contains(key); }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& dst) {
    const json* v = raw(key);
    if (!v) return;
    if (!v->is_number()) {
      problem(key, "expected a number");
      return;
    }
    dst = v->get<double>();
  }

  void number(const char* key, std::optional<double>& dst) {
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    double value = 0.0;
    const std::size_t before = problems_.size();
    number(key, value);
    if (problems_.size() == before) dst = value;
  }

  void integer(const char* key, int& dst) {
    const json* v = raw(key);
    if (!v) return;
    if (!v->is_number_integer()) {
      problem(key, "expected an integer");
      return;
    }
    dst = v->get<int>();
  }

  void text(const char* key, std::string& dst) {
    const json* v = raw(key);
    if (!v) return;
    if (!v->is_string()) {
      problem(key, "expected a string");
      return;
    }
    dst = v->get<std::string>();
  }

  void problem(const std::string& key, const std::string& what) {
    problems_.push_back(path_ + "." + key + ": " + what);
  }

  void finish() {
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) problems_.push_back(path_ + "." + item.key() + ": unknown key");
    }
  }

 private:
  const json& object_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

bool expect_object(const json& v, const std::string& path, std::vector<std::string>& problems) {
  if (v.is_object()) return true;
  problems.push_back(path + ": expected an object");
  return false;
}

geometry::ScrewSpec read_screw(const json& v, std::vector<std::string>& problems) {
  geometry::ScrewSpec spec;
  Reader r(v, "screw", problems);
  r.number("od", spec.od);
  r.number("core_d", spec.core_d);
  r.number("pitch", spec.pitch);
  r.number("thread_height", spec.thread_height);
  r.number("len_flexible", spec.len_flexible);
  r.number("len_rigid", spec.len_rigid);
  r.number("cannula_d", spec.cannula_d);
  r.number("tip_radius", spec.tip_radius);
  r.number("slot_width", spec.slot_width);
  r.number("slot_pitch", spec.slot_pitch);
  r.integer("slot_starts", spec.slot_starts);
  r.number("thread_crest_fraction", spec.thread_crest_fraction);
  r.number("thread_flank_deg", spec.thread_flank_deg);
  r.finish();
  for (const auto& violation : geometry::validate_spec(spec)) {
    std::string fields;
    for (const auto& f : violation.fields) fields += (fields.empty() ? "" : ", ") + f;
    problems.push_back("screw: violates " + violation.rule + " (" + fields + ")");
  }
  return spec;
}

MeshConfig read_mesh(const json& v, std::vector<std::string>& problems) {
  MeshConfig mesh;
  Reader r(v, "mesh", problems);
  r.integer("segments_per_turn", mesh.segments_per_turn);
  r.integer("axial_segments", mesh.axial_segments);
  r.finish();
  if (mesh.segments_per_turn < 16) problems.push_back("mesh.segments_per_turn: need at least 16");
  if (mesh.axial_segments < 4) problems.push_back("mesh.axial_segments: need at least 4");
  return mesh;
}

void read_policy(Reader& r, const std::string& path, std::optional<material::BendingPolicy>& dst,
                 std::vector<std::string>& problems) {
  if (!r.has("bending_policy")) {
    r.raw("bending_policy");
    return;
  }
  std::string name;
  const std::size_t before = problems.size();
  r.text("bending_policy", name);
  if (problems.size() != before) return;
  try {
    dst = material::parse_bending_policy(name);
  } catch (const DomainError& e) {
    problems.push_back(path + ".bending_policy: " + e.what());
  }
}

void read_material(const json& v, RunConfig& config, std::vector<std::string>& problems) {
  if (v.is_string()) {
    if (v.get<std::string>() != "paper-sweep") {
      problems.push_back("material: expected an object or \"paper-sweep\"");
      return;
    }
    config.paper_sweep = true;
    config.materials = material::sensitivity_set();
    return;
  }
  if (!expect_object(v, "material", problems)) return;
  material::MaterialModel m;
  Reader r(v, "material", problems);
  r.number("e_xy", m.e_xy);
  r.number("e_z", m.e_z);
  r.number("nu", m.nu);
  r.number("g", m.g);
  std::optional<material::BendingPolicy> policy;
  read_policy(r, "material", policy, problems);
  if (policy) m.bending_policy = *policy;
  r.finish();
  try {
    material::validate(m);
  } catch (const DomainError& e) {
    problems.push_back(std::string("material: ") + e.what());
  }
  config.materials = {m};
}

SolverConfig read_solver(const json& v, std::vector<std::string>& problems) {
  SolverConfig s;
  Reader r(v, "solver", problems);
  r.integer("n_elements", s.n_elements);
  r.number("tol", s.settings.tol);
  r.integer("max_iterations", s.settings.max_iterations);
  r.number("increment", s.settings.increment);
  r.integer("max_halvings", s.settings.max_halvings);
  read_policy(r, "solver", s.bending_policy, problems);
  r.number("kappa_f", s.kappa_f);

  if (const json* cal = r.raw("calibration")) {
    if (expect_object(*cal, "solver.calibration", problems)) {
      CalibrationTarget target;
      Reader c(*cal, "solver.calibration", problems);
      c.number("delta_mm", target.delta_mm);
      c.number("force_n", target.force_n);
      c.finish();
      if (!(target.delta_mm > 0.0)) problems.push_back("solver.calibration.delta_mm: must be positive");
      if (!(target.force_n > 0.0)) problems.push_back("solver.calibration.force_n: must be positive");
      s.calibration = target;
    }
  }
  if (const json* protocol = r.raw("protocol")) {
    if (expect_object(*protocol, "solver.protocol", problems)) {
      Reader p(*protocol, "solver.protocol", problems);
      p.number("step", s.protocol.step);
      p.number("maximum", s.protocol.maximum);
      p.finish();
      if (!(s.protocol.step > 0.0)) problems.push_back("solver.protocol.step: must be positive");
      if (!(s.protocol.maximum >= s.protocol.step)) {
        problems.push_back("solver.protocol.maximum: must be at least one step");
      }
    }
  }
  r.finish();

  if (s.kappa_f.has_value() == s.calibration.has_value()) {
    problems.push_back("solver: exactly one of kappa_f and calibration is required");
  }
  if (s.kappa_f && !(*s.kappa_f > 0.0 && *s.kappa_f <= 1.0)) {
    problems.push_back("solver.kappa_f: need 0 < kappa_f <= 1");
  }
  if (s.n_elements < 8) problems.push_back("solver.n_elements: need at least 8");
  if (!(s.settings.tol > 0.0)) problems.push_back("solver.tol: must be positive");
  if (s.settings.max_iterations < 1) problems.push_back("solver.max_iterations: need at least 1");
  if (!(s.settings.increment > 0.0)) problems.push_back("solver.increment: must be positive");
  if (s.settings.max_halvings < 0) problems.push_back("solver.max_halvings: must not be negative");
  return s;
}

OutputConfig read_output(const json& v, std::vector<std::string>& problems) {
  OutputConfig out;
  Reader r(v, "output", problems);
  std::string dir = out.dir.string();
  r.text("dir", dir);
  r.text("stl", out.stl);
  r.text("sections", out.sections);
  r.text("figure", out.figure);
  r.finish();
  out.dir = dir;
  for (const auto& [name, value] :
       {std::pair{"dir", dir}, {"stl", out.stl}, {"sections", out.sections}, {"figure", out.figure}}) {
    if (value.empty()) problems.push_back(std::string("output.") + name + ": path must not be empty");
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  RunConfig config;
  if (!root.is_object()) throw ConfigError({"top level: expected an object"});

  for (const auto& item : root.items()) {
    const std::string& key = item.key();
    const json& v = item.value();
    if (key == "screw") {
      if (expect_object(v, key, problems)) config.screw = read_screw(v, problems);
    } else if (key == "mesh") {
      if (expect_object(v, key, problems)) config.mesh = read_mesh(v, problems);
    } else if (key == "material") {
      read_material(v, config, problems);
    } else if (key == "solver") {
      if (expect_object(v, key, problems)) config.solver = read_solver(v, problems);
    } else if (key == "output") {
      if (expect_object(v, key, problems)) config.output = read_output(v, problems);
    } else {
      problems.push_back(key + ": unknown key");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError({"cannot read config " + path.string()});
  std::ostringstream text;
  text << file.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    std::vector<std::string> problems;
    for (const auto& p : e.problems()) problems.push_back(path.string() + ": " + p);
    throw ConfigError(std::move(problems));
  }
}

std::vector<material::MaterialModel> resolved_materials(const RunConfig& config) {
  std::vector<material::MaterialModel> out = config.materials;
  if (config.solver && config.solver->bending_policy) {
    for (auto& m : out) m.bending_policy = *config.solver->bending_policy;
  }
  return out;
}

double resolve_kappa(const RunConfig& config) {
  if (!config.solver) throw ConfigError({"solver: block is required"});
  if (!config.screw) throw ConfigError({"screw: block is required"});
  if (config.materials.empty()) throw ConfigError({"material: block is required"});
  const SolverConfig& s = *config.solver;
  if (s.kappa_f) return *s.kappa_f;
  solver::CalibrationOptions options;
  options.n_elements = s.n_elements;
  options.settings = s.settings;
  return solver::calibrate_kappa(*config.screw, resolved_materials(config).front(), s.calibration->delta_mm,
                                 s.calibration->force_n, options);
}

}  // namespace fps::cli

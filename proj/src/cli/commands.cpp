#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <regex>
#include <sstream>

#include "CLI11.hpp"

#include "fps/cli.hpp"

namespace fps::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory", dir.string());
}

const geometry::ScrewSpec& need_screw(const RunConfig& config) {
  if (!config.screw) throw ConfigError({"screw: block is required"});
  return *config.screw;
}

const SolverConfig& need_solver(const RunConfig& config) {
  need_screw(config);
  if (config.materials.empty()) throw ConfigError({"material: block is required"});
  if (!config.solver) throw ConfigError({"solver: block is required"});
  return *config.solver;
}

void write_sections(const geometry::SectionProfile& profile, const fs::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write sections", path.string());
  file << "z_mm,outer_d_mm,inner_d_mm,region,area_mm2,second_moment_mm4\n";
  for (const auto& st : profile.stations) {
    const auto props = geometry::section_properties(st.outer_d, st.inner_d);
    char row[256];
    std::snprintf(row, sizeof row, "%.10g,%.10g,%.10g,%s,%.10g,%.10g\n", st.z, st.outer_d, st.inner_d,
                  geometry::to_string(st.region), props.area, props.second_moment);
    file << row;
  }
  if (!file.flush()) throw IoError("write failed", path.string());
}

struct Options {
  fs::path config;
  std::optional<double> orient;
  std::optional<fs::path> out;
  std::optional<int> elements;
  std::vector<fs::path> fe;
  std::vector<fs::path> experimental;
  std::vector<fs::path> curves;
};

RunConfig configured(const Options& opt) {
  RunConfig config = load_config(opt.config);
  if (opt.out) config.output.dir = *opt.out;
  if (opt.elements) {
    if (*opt.elements < 8) throw ConfigError({"--elements: need at least 8"});
    if (config.solver) config.solver->n_elements = *opt.elements;
  }
  return config;
}

int cmd_generate(const Options& opt, std::ostream& out) {
  const RunConfig config = configured(opt);
  const geometry::ScrewSpec& spec = need_screw(config);
  geometry::TriangleMesh mesh;
  try {
    mesh = geometry::generate_surface_mesh(spec, config.mesh.segments_per_turn, config.mesh.axial_segments);
  } catch (const ResolutionError& e) {
    throw ConfigError({std::string("mesh: ") + e.what()});
  }
  if (opt.orient) mesh = geometry::transform_for_build(mesh, *opt.orient);
  if (const auto check = geometry::check_mesh(mesh); !check.closed || !check.consistent) {
    throw IntegrityError("generate: mesh is not watertight (" + check.detail + ")");
  }
  const auto profile = geometry::build_profile(spec);

  make_dir(config.output.dir);
  const fs::path stl = config.output.dir / config.output.stl;
  const fs::path sections = config.output.dir / config.output.sections;
  geometry::export_stl(mesh, stl);
  write_sections(profile, sections);
  out << "generate: " << stl.string() << " (" << mesh.triangles.size() << " triangles, "
      << fmt("%.2f", geometry::mesh_volume(mesh)) << " mm^3";
  if (opt.orient) out << ", oriented " << fmt("%g", *opt.orient) << " deg";
  out << "), " << sections.string() << " (" << profile.stations.size() << " stations)\n";
  return kOk;
}

int cmd_calibrate(const Options& opt, std::ostream& out) {
  const RunConfig config = configured(opt);
  const SolverConfig& s = need_solver(config);
  if (!s.calibration) throw ConfigError({"solver.calibration: required by calibrate"});
  const double kappa = resolve_kappa(config);
  const auto m = resolved_materials(config).front();
  out << "calibrate: kappa_f = " << fmt("%.9g", kappa) << " for " << fmt("%g", s.calibration->force_n)
      << " N at " << fmt("%g", s.calibration->delta_mm) << " mm, " << m.label() << " GPa, "
      << s.n_elements << " elements\n";
  return kOk;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig config = configured(opt);
  const SolverConfig& s = need_solver(config);
  if (config.paper_sweep) throw ConfigError({"material: simulate needs one inline material; use sweep"});
  const double kappa = resolve_kappa(config);
  const auto m = resolved_materials(config).front();
  auto curve = solver::run_protocol(solver::discretize(*config.screw, m, kappa, s.n_elements), s.settings,
                                    s.protocol);
  curve.label = m.label();
  make_dir(config.output.dir);
  const fs::path path = config.output.dir / (m.file_stem() + ".csv");
  validation::write_curve_csv(curve, path);
  const auto& last = curve.samples.back();
  out << "simulate: " << m.label() << " F(" << fmt("%g", last.displacement) << " mm) = " << fmt("%.3f", last.force)
      << " N, kappa_f = " << fmt("%.9g", kappa) << ", " << path.string() << '\n';
  return kOk;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const RunConfig config = configured(opt);
  const SolverConfig& s = need_solver(config);
  if (!config.paper_sweep) throw ConfigError({"material: sweep needs \"paper-sweep\""});
  const double kappa = resolve_kappa(config);
  const auto result =
      solver::sweep(*config.screw, resolved_materials(config), kappa, s.n_elements, s.settings, s.protocol);

  make_dir(config.output.dir);
  std::vector<validation::FDCurve> curves;
  out << "sweep: kappa_f = " << fmt("%.9g", kappa) << ",";
  for (const auto& [m, curve] : result) {
    validation::FDCurve labelled = curve;
    labelled.label = m.label();
    validation::write_curve_csv(labelled, config.output.dir / (m.file_stem() + ".csv"));
    out << ' ' << m.label() << ' ' << fmt("%.3f", curve.samples.back().force) << " N";
    curves.push_back(std::move(labelled));
  }
  const fs::path figure = config.output.dir / config.output.figure;
  validation::emit_overlay_svg(curves, figure);
  out << ", " << result.size() << " curves and " << figure.string() << '\n';
  return kOk;
}

int cmd_validate(const Options& opt, std::ostream& out) {
  const auto reports = validate_curves({opt.fe, opt.experimental});
  const std::string table = validation::render_report(reports);
  out << table;
  if (opt.out) {
    std::ofstream file(*opt.out, std::ios::binary | std::ios::trunc);
    if (!file || !(file << table) || !file.flush()) throw IoError("cannot write report", opt.out->string());
    out << "validate: " << reports.size() << " rows, " << opt.out->string() << '\n';
  }
  return kOk;
}

int cmd_plot(const Options& opt, std::ostream& out) {
  std::vector<validation::FDCurve> curves;
  for (const auto& path : opt.curves) {
    auto curve = validation::load_curve_csv(path);
    curve.label = label_from_stem(curve.label);
    curves.push_back(std::move(curve));
  }
  const fs::path figure = opt.out.value_or("overlay.svg");
  validation::emit_overlay_svg(curves, figure);
  out << "plot: " << curves.size() << " curves, " << figure.string() << '\n';
  return kOk;
}

std::string trace_summary(const solver::SolveTrace& trace) {
  if (trace.increments.empty()) return "no increment converged";
  const auto& last = trace.increments.back();
  std::ostringstream os;
  os << trace.increments.size() << " increments converged, last at " << last.delta << " mm (force "
     << last.force << " N, " << last.iterations << " iterations)";
  return os.str();
}

}  // namespace

std::string label_from_stem(const std::string& stem) {
  static const std::regex pair(R"(^(\d+(?:\.\d+)?)_(\d+(?:\.\d+)?)$)");
  std::smatch match;
  if (std::regex_match(stem, match, pair)) return match[1].str() + "/" + match[2].str();
  return stem;
}

std::vector<validation::MetricsReport> validate_curves(const ValidateInputs& inputs) {
  if (inputs.fe.empty()) throw DomainError("validate: at least one FE curve is required");
  if (inputs.experimental.empty()) throw DomainError("validate: at least one experimental run is required");

  std::vector<validation::FDCurve> runs;
  for (const auto& path : inputs.experimental) runs.push_back(validation::zero_offset(validation::load_curve_csv(path)));
  std::vector<validation::FDCurve> fe;
  for (const auto& path : inputs.fe) fe.push_back(validation::load_curve_csv(path));

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto* set : {&runs, &fe}) {
    for (const auto& c : *set) {
      lo = std::max(lo, c.samples.front().displacement);
      hi = std::min(hi, c.samples.back().displacement);
    }
  }
  std::vector<double> grid;
  for (double x : runs.front().displacements()) {
    if (x >= lo && x <= hi) grid.push_back(x);
  }
  if (grid.size() < 2) {
    std::ostringstream os;
    os << "validate: curves share fewer than two grid points in [" << lo << ", " << hi << "] mm";
    throw GridError(os.str());
  }

  std::vector<validation::FDCurve> on_grid;
  for (const auto& run : runs) on_grid.push_back(validation::resample(run, grid));
  const auto measured = validation::average_runs(on_grid);

  std::vector<validation::MetricsReport> reports;
  for (const auto& curve : fe) {
    reports.push_back(validation::compute_metrics(validation::resample(curve, grid), measured,
                                                  label_from_stem(curve.label)));
  }
  return reports;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flexible pedicle screw design and verification workbench", "fps"};
  app.require_subcommand(1);
  Options opt;
  int (*command)(const Options&, std::ostream&) = nullptr;
  bool data_command = false;

  auto with_config = [&](CLI::App* sub) { sub->add_option("config", opt.config, "JSON run configuration")->required(); };

  auto* generate = app.add_subcommand("generate", "Write the screw STL and section-property CSV");
  with_config(generate);
  generate->add_option("--orient", opt.orient, "Rotate the axis to this build angle in degrees");
  generate->add_option("--out", opt.out, "Output directory");
  generate->callback([&] { command = cmd_generate; });

  auto* simulate = app.add_subcommand("simulate", "Run the loading protocol for one material");
  with_config(simulate);
  simulate->add_option("--out", opt.out, "Output directory");
  simulate->add_option("--elements", opt.elements, "Number of beam elements");
  simulate->callback([&] { command = cmd_simulate; });

  auto* sweep = app.add_subcommand("sweep", "Run the loading protocol for the material sensitivity set");
  with_config(sweep);
  sweep->add_option("--out", opt.out, "Output directory");
  sweep->add_option("--elements", opt.elements, "Number of beam elements");
  sweep->callback([&] { command = cmd_sweep; });

  auto* calibrate = app.add_subcommand("calibrate", "Fit kappa_f to the configured force target");
  with_config(calibrate);
  calibrate->add_option("--elements", opt.elements, "Number of beam elements");
  calibrate->callback([&] { command = cmd_calibrate; });

  auto* validate = app.add_subcommand("validate", "Compare FE curves with experimental runs");
  validate->add_option("--fe", opt.fe, "FE curve CSVs, named by moduli pair")->required();
  validate->add_option("--exp", opt.experimental, "Experimental run CSVs")->required();
  validate->add_option("--out", opt.out, "Report file");
  validate->callback([&] {
    command = cmd_validate;
    data_command = true;
  });

  auto* plot = app.add_subcommand("plot", "Overlay curve CSVs in one SVG");
  plot->add_option("curves", opt.curves, "Curve CSVs")->required();
  plot->add_option("--out", opt.out, "SVG file (default overlay.svg)");
  plot->callback([&] {
    command = cmd_plot;
    data_command = true;
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return command(opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const geometry::SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const solver::NonConvergenceError& e) {
    err << "error: " << e.what() << "\n  " << trace_summary(e.trace()) << '\n';
    return kSolverError;
  } catch (const solver::CalibrationError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return data_command ? kDataError : kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace fps::cli

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fps/curve.hpp"
#include "fps/geometry.hpp"
#include "fps/material.hpp"

namespace fps::solver {

/// Two-node planar beam element. Stiffnesses are in N and N*mm^2.
struct BeamElement {
  double length = 0.0;
  double ea = 0.0;
  double ei = 0.0;
  geometry::Region region = geometry::Region::flexible;
  /// Shear stiffness kappa_s*G*A in N; zero keeps the element shear-rigid.
  double gas = 0.0;
};

/// Cantilever along +x, clamped at x = 0, loaded at the free end.
struct BeamModel {
  std::vector<BeamElement> elements;
  double span = 0.0;
  double kappa_f = 1.0;

  /// Uniform prismatic cantilever; used for closed-form checks.
  static BeamModel prismatic(double length, double ea, double ei, int n_elements);
};

/// Throws DomainError when lengths do not sum to the span or a stiffness is not positive.
void check_model(const BeamModel& model);

struct SolverSettings {
  double tol = 1e-6;          // residual norm on free DOFs, N (moments in N*mm)
  int max_iterations = 25;    // Newton iterations per increment
  double increment = 0.5;     // nominal displacement increment, mm
  int max_halvings = 6;       // smallest increment = increment / 2^max_halvings
};

struct IncrementRecord {
  double delta = 0.0;     // prescribed tip displacement, mm
  double force = 0.0;     // reaction at the controlled DOF, N
  int iterations = 0;
  double residual = 0.0;  // final residual norm
};

struct SolveTrace {
  std::vector<IncrementRecord> increments;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, SolveTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const noexcept { return trace_; }

 private:
  SolveTrace trace_;
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double force_at_unity)
      : std::runtime_error(what), force_at_unity_(force_at_unity) {}
  /// Reaction force with no knock-down (kappa_f = 1).
  double force_at_unity() const noexcept { return force_at_unity_; }

 private:
  double force_at_unity_;
};

/// Cantilever for the flexible region plus tip, clamped at the rigid junction.
/// Flexible elements carry kappa_f times the annular core stiffness; threads add none.
BeamModel discretize(const geometry::ScrewSpec& spec, const material::MaterialModel& m,
                     double kappa_f, int n_elements = 64);

/// Displacement-controlled corotational solver. Holds the equilibrium state
/// between calls so a protocol can be walked one increment at a time.
class TipDisplacementSolver {
 public:
  explicit TipDisplacementSolver(BeamModel model, SolverSettings settings = {});

  /// Walks the prescribed tip displacement from its current value to `delta`.
  /// Throws NonConvergenceError once increment halving is exhausted.
  void advance_to(double delta);

  double delta() const { return delta_; }
  /// Reaction force at the controlled degree of freedom.
  double force() const;
  /// Elastic strain energy of the current configuration, N*mm.
  double stored_energy() const;
  const SolveTrace& trace() const { return trace_; }
  /// Nodal (u, w, rotation) triples, node 0 at the clamp.
  Eigen::VectorXd displacements() const { return u_.cast<double>(); }

 private:
  using State = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

  bool newton(double target, IncrementRecord& record);
  void assemble(const State& u, State& f_int, Eigen::MatrixXd* k_t) const;

  BeamModel model_;
  SolverSettings settings_;
  std::vector<int> free_;   // free DOF indices
  int tip_dof_ = 0;
  State u_;  // extended precision keeps the residual floor well under tol
  double delta_ = 0.0;
  SolveTrace trace_;
};

struct TipSolution {
  double force = 0.0;
  SolveTrace trace;
};

TipSolution solve_tip_displacement(const BeamModel& model, double delta,
                                   const SolverSettings& settings = {});

struct Protocol {
  double step = 0.5;     // mm
  double maximum = 6.0;  // mm
};

/// Samples force at 0, step, 2 step, ... maximum.
validation::FDCurve run_protocol(const BeamModel& model, const SolverSettings& settings = {},
                                 const Protocol& protocol = {});

struct CalibrationOptions {
  int n_elements = 64;
  double force_tol = 1e-3;  // N
  int max_evaluations = 60;
  SolverSettings settings;
};

/// Knock-down factor in (0, 1] at which the tip force at target_delta equals
/// target_force. Throws CalibrationError when kappa_f = 1 cannot reach it.
double calibrate_kappa(const geometry::ScrewSpec& spec, const material::MaterialModel& m,
                       double target_delta, double target_force,
                       const CalibrationOptions& options = {});

using SweepResult = std::vector<std::pair<material::MaterialModel, validation::FDCurve>>;

/// One protocol curve per material at a shared kappa_f, in input order.
/// Cases run concurrently; a failure is rethrown tagged with its material.
SweepResult sweep(const geometry::ScrewSpec& spec, const std::vector<material::MaterialModel>& materials,
                  double kappa_f, int n_elements = 64, const SolverSettings& settings = {},
                  const Protocol& protocol = {});

}  // namespace fps::solver

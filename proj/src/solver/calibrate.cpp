#include <cmath>
#include <sstream>

#include "fps/solver.hpp"

namespace fps::solver {

namespace {

double tip_force(const geometry::ScrewSpec& spec, const material::MaterialModel& m, double kappa,
                 double delta, const CalibrationOptions& options) {
  return solve_tip_displacement(discretize(spec, m, kappa, options.n_elements), delta, options.settings).force;
}

}  // namespace

double calibrate_kappa(const geometry::ScrewSpec& spec, const material::MaterialModel& m,
                       double target_delta, double target_force, const CalibrationOptions& options) {
  if (!(target_force > 0.0)) throw DomainError("calibrate_kappa: target force must be positive");
  if (!(target_delta > 0.0)) throw DomainError("calibrate_kappa: target displacement must be positive");

  const double f_unity = tip_force(spec, m, 1.0, target_delta, options);
  if (std::abs(f_unity - target_force) < options.force_tol) return 1.0;
  if (f_unity < target_force) {
    std::ostringstream os;
    os << "calibrate_kappa: target " << target_force << " N at " << target_delta
       << " mm is unreachable; kappa_f = 1 gives " << f_unity << " N";
    throw CalibrationError(os.str(), f_unity);
  }

  // Illinois-modified regula falsi on g(k) = F(k) - target. F vanishes with the
  // flexure stiffness, so k = 0 brackets from below without a solve.
  double k_lo = 0.0, g_lo = -target_force;
  double k_hi = 1.0, g_hi = f_unity - target_force;
  int last_side = 0;
  for (int eval = 0; eval < options.max_evaluations; ++eval) {
    double k = k_lo - g_lo * (k_hi - k_lo) / (g_hi - g_lo);
    if (!(k > k_lo && k < k_hi)) k = 0.5 * (k_lo + k_hi);
    const double g = tip_force(spec, m, k, target_delta, options) - target_force;
    if (std::abs(g) < options.force_tol) return k;
    if (g < 0.0) {
      k_lo = k;
      g_lo = g;
      if (last_side == -1) g_hi *= 0.5;
      last_side = -1;
    } else {
      k_hi = k;
      g_hi = g;
      if (last_side == 1) g_lo *= 0.5;
      last_side = 1;
    }
  }
  throw CalibrationError("calibrate_kappa: no convergence within the evaluation budget", f_unity);
}

}  // namespace fps::solver

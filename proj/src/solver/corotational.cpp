// Planar two-node corotational beam (Crisfield's formulation): each element
// carries a rigid rotation of its chord plus small local strains (axial
// stretch and two end rotations relative to the chord), which are resolved
// with the linear element stiffness. The global equilibrium is solved by
// Newton-Raphson with the tip transverse displacement prescribed.

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "fps/solver.hpp"

namespace fps::solver {

namespace {

// Kinematics are evaluated in extended precision: at full section stiffness
// one ulp of a double tip coordinate moves the residual by ~1e-6 N, the
// default tolerance.
using Real = long double;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct LocalState {
  Real l = 0.0;   // current chord length
  Real c = 1.0;   // chord direction cosines
  Real s = 0.0;
  Real stretch = 0.0;
  Real theta1 = 0.0;  // end rotations relative to the chord
  Real theta2 = 0.0;
};

LocalState local_state(const BeamElement& e, const Real* ua, const Real* ub) {
  LocalState st;
  const Real length = e.length;
  const Real dx = length + ub[0] - ua[0];
  const Real dy = ub[1] - ua[1];
  st.l = std::hypot(dx, dy);
  st.c = dx / st.l;
  st.s = dy / st.l;
  // stretch as (l^2 - L^2) / (l + L) avoids cancellation for tiny strains
  st.stretch = (dx * dx + dy * dy - length * length) / (st.l + length);
  const Real chord = std::atan2(dy, dx);
  st.theta1 = ua[2] - chord;
  st.theta2 = ub[2] - chord;
  return st;
}

// Local bending stiffness, with the Timoshenko shear factor when gas > 0.
Eigen::Matrix2d bending_stiffness(const BeamElement& e) {
  const double phi = e.gas > 0.0 ? 12.0 * e.ei / (e.gas * e.length * e.length) : 0.0;
  const double k = e.ei / (e.length * (1.0 + phi));
  Eigen::Matrix2d kb;
  kb << 4.0 + phi, 2.0 - phi, 2.0 - phi, 4.0 + phi;
  return k * kb;
}

}  // namespace

TipDisplacementSolver::TipDisplacementSolver(BeamModel model, SolverSettings settings)
    : model_(std::move(model)), settings_(settings) {
  check_model(model_);
  if (!(settings_.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (settings_.max_iterations < 1 || !(settings_.increment > 0.0) || settings_.max_halvings < 0) {
    throw DomainError("invalid solver settings");
  }
  const int n_nodes = static_cast<int>(model_.elements.size()) + 1;
  u_ = State::Zero(3 * n_nodes);
  tip_dof_ = 3 * (n_nodes - 1) + 1;
  for (int d = 3; d < 3 * n_nodes; ++d) {
    if (d != tip_dof_) free_.push_back(d);
  }
}

void TipDisplacementSolver::assemble(const State& u, State& f_int, Eigen::MatrixXd* k_t) const {
  const int nd = static_cast<int>(u.size());
  f_int.setZero(nd);
  if (k_t) k_t->setZero(nd, nd);

  for (std::size_t n = 0; n < model_.elements.size(); ++n) {
    const BeamElement& e = model_.elements[n];
    const int a = 3 * static_cast<int>(n);
    const LocalState st = local_state(e, u.data() + a, u.data() + a + 3);
    const Eigen::Matrix2d kb = bending_stiffness(e);

    const Real axial = static_cast<Real>(e.ea) * st.stretch / static_cast<Real>(e.length);
    const Real m1 = kb(0, 0) * st.theta1 + kb(0, 1) * st.theta2;
    const Real m2 = kb(1, 0) * st.theta1 + kb(1, 1) * st.theta2;

    // f = B^T (N, M1, M2)
    const Real shear = (m1 + m2) / st.l;
    f_int[a + 0] += -st.c * axial - st.s * shear;
    f_int[a + 1] += -st.s * axial + st.c * shear;
    f_int[a + 2] += m1;
    f_int[a + 3] += st.c * axial + st.s * shear;
    f_int[a + 4] += st.s * axial - st.c * shear;
    f_int[a + 5] += m2;

    if (k_t) {
      const double c = static_cast<double>(st.c);
      const double s = static_cast<double>(st.s);
      const double l = static_cast<double>(st.l);
      Eigen::Matrix<double, 6, 1> r, z;
      r << -c, -s, 0.0, c, s, 0.0;
      z << s, -c, 0.0, -s, c, 0.0;
      Eigen::Matrix<double, 3, 6> b;
      b.row(0) = r.transpose();
      b.row(1) << -s / l, c / l, 1.0, s / l, -c / l, 0.0;
      b.row(2) << -s / l, c / l, 0.0, s / l, -c / l, 1.0;
      Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
      d(0, 0) = e.ea / e.length;
      d.block<2, 2>(1, 1) = kb;
      const double msum = static_cast<double>(m1 + m2);
      k_t->block<6, 6>(a, a) += b.transpose() * d * b + (static_cast<double>(axial) / l) * z * z.transpose() +
                                (msum / (l * l)) * (r * z.transpose() + z * r.transpose());
    }
  }
}

bool TipDisplacementSolver::newton(double target, IncrementRecord& record) {
  State u = u_;
  const int nf = static_cast<int>(free_.size());
  State f;
  Eigen::MatrixXd k;
  Eigen::VectorXd r(nf);
  Eigen::MatrixXd kff(nf, nf);

  auto gather_tangent = [&] {
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < nf; ++j) kff(i, j) = k(free_[i], free_[j]);
    }
  };
  auto apply = [&](const Eigen::VectorXd& du) {
    for (int i = 0; i < nf; ++i) u[free_[i]] += du[i];
  };

  // tangent predictor: carry the prescribed increment into the free DOFs
  // through the coupling column instead of loading the tip element alone
  assemble(u, f, &k);
  const double jump = target - static_cast<double>(u[tip_dof_]);
  for (int i = 0; i < nf; ++i) r[i] = static_cast<double>(f[free_[i]]) + k(free_[i], tip_dof_) * jump;
  gather_tangent();
  {
    const Eigen::VectorXd du = kff.partialPivLu().solve(-r);
    if (!du.allFinite()) return false;
    apply(du);
    u[tip_dof_] = target;
  }

  for (int it = 1;; ++it) {
    assemble(u, f, &k);
    Real sq = 0.0;
    for (int i = 0; i < nf; ++i) {
      sq += f[free_[i]] * f[free_[i]];
      r[i] = static_cast<double>(f[free_[i]]);
    }
    const double norm = static_cast<double>(std::sqrt(sq));
    if (!std::isfinite(norm)) return false;
    if (norm < settings_.tol) {
      u_ = u;
      record = {target, static_cast<double>(f[tip_dof_]), it, norm};
      return true;
    }
    if (it >= settings_.max_iterations) return false;
    gather_tangent();
    const Eigen::VectorXd du = kff.partialPivLu().solve(-r);
    if (!du.allFinite()) return false;
    apply(du);
  }
}

void TipDisplacementSolver::advance_to(double target) {
  if (!std::isfinite(target)) throw DomainError("advance_to: non-finite displacement");
  const double full = settings_.increment;
  const double smallest = std::ldexp(full, -settings_.max_halvings);
  double step = full;

  while (delta_ != target) {
    const double remaining = target - delta_;
    const bool last = std::abs(remaining) <= step * (1.0 + 1e-12);
    const double next = last ? target : delta_ + std::copysign(step, remaining);

    IncrementRecord record;
    if (newton(next, record)) {
      delta_ = next;
      trace_.increments.push_back(record);
      continue;
    }
    if (step / 2.0 < smallest * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "Newton iteration diverged at tip displacement " << next << " mm after "
         << settings_.max_halvings << " increment halvings";
      throw NonConvergenceError(os.str(), trace_);
    }
    step /= 2.0;
  }
}

double TipDisplacementSolver::force() const {
  State f;
  assemble(u_, f, nullptr);
  return static_cast<double>(f[tip_dof_]);
}

double TipDisplacementSolver::stored_energy() const {
  Real energy = 0.0;
  for (std::size_t n = 0; n < model_.elements.size(); ++n) {
    const BeamElement& e = model_.elements[n];
    const int a = 3 * static_cast<int>(n);
    const LocalState st = local_state(e, u_.data() + a, u_.data() + a + 3);
    const Eigen::Matrix2d kb = bending_stiffness(e);
    energy += 0.5L * e.ea * st.stretch * st.stretch / e.length +
              0.5L * (kb(0, 0) * st.theta1 * st.theta1 + 2.0L * kb(0, 1) * st.theta1 * st.theta2 +
                      kb(1, 1) * st.theta2 * st.theta2);
  }
  return static_cast<double>(energy);
}

TipSolution solve_tip_displacement(const BeamModel& model, double delta, const SolverSettings& settings) {
  if (!(delta >= 0.0)) throw DomainError("solve_tip_displacement: need delta >= 0");
  TipDisplacementSolver solver(model, settings);
  solver.advance_to(delta);
  const auto& inc = solver.trace().increments;
  return {inc.empty() ? 0.0 : inc.back().force, solver.trace()};
}

validation::FDCurve run_protocol(const BeamModel& model, const SolverSettings& settings,
                                 const Protocol& protocol) {
  if (!(protocol.step > 0.0) || !(protocol.maximum >= 0.0)) throw DomainError("run_protocol: bad protocol");
  const int steps = static_cast<int>(std::lround(protocol.maximum / protocol.step));
  TipDisplacementSolver solver(model, settings);
  validation::FDCurve curve;
  curve.samples.push_back({0.0, 0.0});
  for (int k = 1; k <= steps; ++k) {
    const double delta = k * protocol.step;
    solver.advance_to(delta);
    curve.samples.push_back({delta, solver.trace().increments.back().force});
  }
  return curve;
}

}  // namespace fps::solver

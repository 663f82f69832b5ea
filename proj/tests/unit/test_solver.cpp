#include <array>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fps/solver.hpp"

using namespace fps;
using namespace fps::solver;

namespace {

constexpr double kE = 150e3;        // N/mm^2
constexpr double kI = 59.64117303;  // mm^4, annulus 6/3
constexpr double kA = 21.20575041;  // mm^2
constexpr double kKappa = 1.0832e-3;

// Inextensible elastica under a vertical end load P, alpha = P L^2 / EI.
// Shoots on the root curvature so the free end is moment free and returns
// the end deflection over L.
double elastica_deflection(double alpha) {
  auto integrate = [alpha](double c, double& end_curvature) {
    const int n = 4000;
    const double h = 1.0 / n;
    double th = 0.0, k = c, y = 0.0;
    for (int i = 0; i < n; ++i) {
      // state (theta, theta', y); theta'' = -alpha cos(theta)
      auto f = [alpha](double t, double kk) { return std::array<double, 3>{kk, -alpha * std::cos(t), std::sin(t)}; };
      const auto k1 = f(th, k);
      const auto k2 = f(th + 0.5 * h * k1[0], k + 0.5 * h * k1[1]);
      const auto k3 = f(th + 0.5 * h * k2[0], k + 0.5 * h * k2[1]);
      const auto k4 = f(th + h * k3[0], k + h * k3[1]);
      th += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      k += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      y += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
    }
    end_curvature = k;
    return y;
  };
  double lo = 0.0, hi = alpha, y = 0.0, kend = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    y = integrate(mid, kend);
    (kend > 0.0 ? hi : lo) = mid;
  }
  return y;
}

double linear_force(double ei, double length, double delta) { return 3.0 * ei * delta / std::pow(length, 3); }

}  // namespace

TEST(Discretize, PrototypeSpecStiffness) {
  const auto model = discretize(geometry::prototype_screw(), material::MaterialModel{}, 1.0, 64);
  ASSERT_EQ(model.elements.size(), 64u);
  double sum = 0.0;
  for (const auto& e : model.elements) sum += e.length;
  EXPECT_NEAR(sum, 30.8 + 3.0, 1e-9 * 33.8);
  EXPECT_NEAR(model.span, 33.8, 1e-12);
  for (const auto& e : model.elements) {
    if (e.region == geometry::Region::flexible) {
      EXPECT_NEAR(e.ei, kE * kI, 1e-6 * kE * kI);
      EXPECT_NEAR(e.ei, 8.946e6, 1e3);
    }
  }
}

TEST(Discretize, KnockDownAppliesToFlexibleElementsOnly) {
  const auto model = discretize(geometry::prototype_screw(), material::MaterialModel{}, 0.25, 64);
  int flexible = 0, tip = 0;
  for (const auto& e : model.elements) {
    if (e.region == geometry::Region::flexible) {
      ++flexible;
      EXPECT_NEAR(e.ei, 0.25 * kE * kI, 1e-6 * kE * kI);
      EXPECT_NEAR(e.ea, 0.25 * kE * kA, 1e-6 * kE * kA);
    } else {
      ++tip;
      EXPECT_NEAR(e.ei, kE * kI, 1e-6 * kE * kI);
    }
  }
  EXPECT_GT(flexible, 0);
  EXPECT_GE(tip, 1);
}

TEST(Discretize, RejectsBadInputs) {
  const auto spec = geometry::prototype_screw();
  EXPECT_THROW(discretize(spec, {}, 0.0), DomainError);
  EXPECT_THROW(discretize(spec, {}, 1.5), DomainError);
  EXPECT_THROW(discretize(spec, {}, 0.5, 4), DomainError);
  auto bad = spec;
  bad.cannula_d = 8.0;
  EXPECT_THROW(discretize(bad, {}, 0.5), DomainError);
}

TEST(CheckModel, LengthsMustSumToSpan) {
  auto model = BeamModel::prismatic(10.0, 1e6, 1e6, 8);
  EXPECT_NO_THROW(check_model(model));
  model.span = 11.0;
  EXPECT_THROW(check_model(model), DomainError);
  model = BeamModel::prismatic(10.0, 1e6, 1e6, 8);
  model.elements[2].ei = 0.0;
  EXPECT_THROW(check_model(model), DomainError);
}

TEST(Solve, ZeroDisplacementGivesZeroForce) {
  const auto r = solve_tip_displacement(BeamModel::prismatic(30.8, kE * kA, kE * kI, 16), 0.0);
  EXPECT_EQ(r.force, 0.0);
  EXPECT_THROW(solve_tip_displacement(BeamModel::prismatic(30.8, kE * kA, kE * kI, 16), -1.0), DomainError);
}

TEST(Solve, SmallDeflectionCantilever) {
  const double l = 30.8, delta = 1e-3 * l;
  const double oracle = linear_force(kE * kI, l, delta);
  EXPECT_NEAR(oracle, 28.29, 0.005);
  for (int n : {16, 64, 128}) {
    const auto r = solve_tip_displacement(BeamModel::prismatic(l, kE * kA, kE * kI, n), delta);
    EXPECT_LT(std::abs(r.force - oracle) / oracle, 0.002) << n << " elements";
    for (const auto& inc : r.trace.increments) EXPECT_LT(inc.residual, 1e-6);
  }
}

TEST(Solve, ShearFlexibleCantilever) {
  const double l = 10.0, delta = 1e-3 * l;
  const double ei = kE * kI, gas = 0.9 * 59e3 * kA;
  auto model = BeamModel::prismatic(l, kE * kA, ei, 64);
  for (auto& e : model.elements) e.gas = gas;
  const double oracle = delta / (l * l * l / (3.0 * ei) + l / gas);
  const auto r = solve_tip_displacement(model, delta);
  EXPECT_LT(std::abs(r.force - oracle) / oracle, 0.002);
  EXPECT_LT(r.force, linear_force(ei, l, delta));
}

TEST(Solve, LargeDeflectionMatchesElastica) {
  const double l = 100.0, ei = 1e6;
  for (double alpha : {1.0, 3.0}) {
    const double ratio = elastica_deflection(alpha);
    // axial strain stays below 1e-7, so the beam is effectively inextensible
    const auto r = solve_tip_displacement(BeamModel::prismatic(l, 1e10, ei, 64), ratio * l);
    const double expected = alpha * ei / (l * l);
    EXPECT_LT(std::abs(r.force - expected) / expected, 0.005) << "alpha " << alpha;
  }
  EXPECT_NEAR(elastica_deflection(1.0), 0.30172, 5e-5);
}

TEST(Solve, DoubledStiffnessDoublesForce) {
  const double l = 30.8, delta = 1e-3 * l;
  const auto a = solve_tip_displacement(BeamModel::prismatic(l, kE * kA, 2.0 * kE * kI, 32), delta);
  const auto b = solve_tip_displacement(BeamModel::prismatic(l, kE * kA, kE * kI, 32), delta);
  EXPECT_NEAR(a.force / b.force, 2.0, 0.02);
}

TEST(Solve, EnergyConsistency) {
  const auto model = discretize(geometry::prototype_screw(), {}, kKappa, 64);
  TipDisplacementSolver solver(model);
  double work = 0.0, prev_d = 0.0, prev_f = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double d = 0.1 * k;
    solver.advance_to(d);
    const double f = solver.force();
    work += 0.5 * (f + prev_f) * (d - prev_d);
    prev_d = d;
    prev_f = f;
  }
  const double energy = solver.stored_energy();
  EXPECT_GT(energy, 0.0);
  EXPECT_LT(std::abs(work - energy) / energy, 0.01);
}

TEST(Solve, Reciprocity) {
  const auto model = discretize(geometry::prototype_screw(), {}, kKappa, 64);
  const double target = 3.7;
  const double direct = solve_tip_displacement(model, target).force;
  SolverSettings fine;
  fine.increment = 0.05;
  const auto trace = solve_tip_displacement(model, 6.0, fine).trace;
  double read = std::nan("");
  for (std::size_t k = 1; k < trace.increments.size(); ++k) {
    const auto& a = trace.increments[k - 1];
    const auto& b = trace.increments[k];
    if (a.delta <= target && target <= b.delta) {
      read = a.force + (target - a.delta) / (b.delta - a.delta) * (b.force - a.force);
      break;
    }
  }
  ASSERT_TRUE(std::isfinite(read));
  EXPECT_LT(std::abs(read - direct) / direct, 0.005);
}

TEST(Solve, MeshConvergence) {
  const auto spec = geometry::prototype_screw();
  const double f64 = solve_tip_displacement(discretize(spec, {}, kKappa, 64), 6.0).force;
  const double f128 = solve_tip_displacement(discretize(spec, {}, kKappa, 128), 6.0).force;
  EXPECT_LT(std::abs(f128 - f64) / f128, 0.005);
}

TEST(Solve, MonotoneInKnockDownAndModulus) {
  const auto spec = geometry::prototype_screw();
  double prev = 0.0;
  for (double kappa : {5e-4, 1e-3, 2e-3, 1e-2}) {
    const double f = solve_tip_displacement(discretize(spec, {}, kappa, 32), 6.0).force;
    EXPECT_GT(f, prev);
    prev = f;
  }
  prev = 0.0;
  for (const auto& m : material::sensitivity_set()) {
    const double f = solve_tip_displacement(discretize(spec, m, kKappa, 32), 6.0).force;
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(Solve, Deterministic) {
  const auto model = discretize(geometry::prototype_screw(), {}, kKappa, 64);
  const auto a = solve_tip_displacement(model, 6.0).trace;
  const auto b = solve_tip_displacement(model, 6.0).trace;
  ASSERT_EQ(a.increments.size(), b.increments.size());
  for (std::size_t k = 0; k < a.increments.size(); ++k) {
    EXPECT_EQ(a.increments[k].delta, b.increments[k].delta);
    EXPECT_EQ(a.increments[k].force, b.increments[k].force);
    EXPECT_EQ(a.increments[k].iterations, b.increments[k].iterations);
    EXPECT_EQ(a.increments[k].residual, b.increments[k].residual);
  }
}

TEST(Solve, TraceIsOrderedAndConverged) {
  const auto trace = solve_tip_displacement(discretize(geometry::prototype_screw(), {}, kKappa, 64), 6.0).trace;
  ASSERT_FALSE(trace.increments.empty());
  for (std::size_t k = 0; k < trace.increments.size(); ++k) {
    EXPECT_LT(trace.increments[k].residual, 1e-6);
    if (k > 0) {
      EXPECT_GT(trace.increments[k].delta, trace.increments[k - 1].delta);
    }
  }
  EXPECT_EQ(trace.increments.back().delta, 6.0);
}

TEST(Solve, ExhaustedHalvingRaisesWithTrace) {
  SolverSettings settings;
  settings.max_iterations = 1;
  settings.max_halvings = 1;
  settings.tol = 1e-14;
  const auto model = discretize(geometry::prototype_screw(), {}, 1.0, 16);
  try {
    solve_tip_displacement(model, 6.0, settings);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("halving"), std::string::npos);
    for (const auto& inc : e.trace().increments) EXPECT_LT(inc.residual, 1e-14);
  }
}

TEST(Solve, RejectsBadSettings) {
  const auto model = BeamModel::prismatic(10.0, 1e6, 1e6, 8);
  SolverSettings s;
  s.tol = 0.0;
  EXPECT_THROW(TipDisplacementSolver(model, s), DomainError);
}

TEST(Protocol, ThirteenSamples) {
  const auto curve = run_protocol(discretize(geometry::prototype_screw(), {}, kKappa, 64));
  ASSERT_EQ(curve.size(), 13u);
  EXPECT_EQ(curve.samples.front().displacement, 0.0);
  EXPECT_EQ(curve.samples.front().force, 0.0);
  for (std::size_t k = 0; k < 13; ++k) EXPECT_DOUBLE_EQ(curve.samples[k].displacement, 0.5 * k);
  for (std::size_t k = 1; k < 13; ++k) EXPECT_GT(curve.samples[k].force, curve.samples[k - 1].force);
}

TEST(Calibrate, RoundTrip) {
  const auto spec = geometry::prototype_screw();
  const double kappa = calibrate_kappa(spec, {}, 6.0, 4.67);
  EXPECT_GT(kappa, 0.0);
  EXPECT_LE(kappa, 1.0);
  const auto curve = run_protocol(discretize(spec, {}, kappa, 64));
  EXPECT_NEAR(curve.samples.back().force, 4.67, 1e-3);
}

TEST(Calibrate, BoundaryRootAndUnreachableTarget) {
  const auto spec = geometry::prototype_screw();
  CalibrationOptions options;
  options.n_elements = 16;
  const double f1 = solve_tip_displacement(discretize(spec, {}, 1.0, 16), 1.0).force;
  EXPECT_EQ(calibrate_kappa(spec, {}, 1.0, f1, options), 1.0);
  try {
    calibrate_kappa(spec, {}, 1.0, 10.0 * f1, options);
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& e) {
    EXPECT_NEAR(e.force_at_unity(), f1, 1e-9 * f1);
  }
  EXPECT_THROW(calibrate_kappa(spec, {}, 1.0, -1.0, options), DomainError);
}

TEST(Sweep, OrderAndMonotonicity) {
  const auto spec = geometry::prototype_screw();
  const auto set = material::sensitivity_set();
  const auto result = sweep(spec, set, kKappa);
  ASSERT_EQ(result.size(), set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    EXPECT_EQ(result[k].first.e_xy, set[k].e_xy);
    EXPECT_EQ(result[k].second.size(), 13u);
    if (k > 0) {
      EXPECT_GT(result[k].second.samples.back().force, result[k - 1].second.samples.back().force);
    }
  }
}

TEST(Sweep, SingleAndEmpty) {
  const auto spec = geometry::prototype_screw();
  EXPECT_TRUE(sweep(spec, {}, kKappa).empty());
  const material::MaterialModel m;
  const auto one = sweep(spec, {m}, kKappa);
  ASSERT_EQ(one.size(), 1u);
  const auto direct = run_protocol(discretize(spec, m, kKappa, 64));
  ASSERT_EQ(one[0].second.size(), direct.size());
  for (std::size_t k = 0; k < direct.size(); ++k) EXPECT_EQ(one[0].second.samples[k].force, direct.samples[k].force);
}

TEST(Sweep, TagsFailuresWithMaterial) {
  SolverSettings settings;
  settings.max_iterations = 1;
  settings.max_halvings = 0;
  settings.tol = 1e-14;
  try {
    sweep(geometry::prototype_screw(), material::sensitivity_set(), 1.0, 16, settings);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("155/150"), std::string::npos);
  }
}

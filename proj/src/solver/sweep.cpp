#include <future>

#include "fps/solver.hpp"

namespace fps::solver {

SweepResult sweep(const geometry::ScrewSpec& spec, const std::vector<material::MaterialModel>& materials,
                  double kappa_f, int n_elements, const SolverSettings& settings, const Protocol& protocol) {
  std::vector<std::future<validation::FDCurve>> jobs;
  jobs.reserve(materials.size());
  for (const auto& m : materials) {
    jobs.push_back(std::async(std::launch::async, [&spec, m, kappa_f, n_elements, settings, protocol] {
      auto curve = run_protocol(discretize(spec, m, kappa_f, n_elements), settings, protocol);
      curve.label = m.label();
      return curve;
    }));
  }

  // collect in input order so the result does not depend on scheduling
  SweepResult out;
  out.reserve(materials.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    try {
      out.emplace_back(materials[k], jobs[k].get());
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("material " + materials[k].label() + ": " + e.what(), e.trace());
    } catch (const DomainError& e) {
      throw DomainError("material " + materials[k].label() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fps::solver

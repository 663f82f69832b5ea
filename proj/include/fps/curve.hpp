#pragma once

#include <string>
#include <vector>

namespace fps::validation {

struct Sample {
  double displacement = 0.0;  // mm
  double force = 0.0;         // N
};

/// Force-displacement curve: the unit of exchange between the solver, the
/// experiment pipeline and the metrics.
struct FDCurve {
  std::vector<Sample> samples;
  std::string label;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::vector<double> displacements() const;
  std::vector<double> forces() const;
};

/// Throws IntegrityError unless displacements are finite, strictly increasing
/// and start at or above zero, and forces are finite.
void check_curve(const FDCurve& curve);

}  // namespace fps::validation

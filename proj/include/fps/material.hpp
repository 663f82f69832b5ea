#pragma once

#include <string>
#include <vector>

#include "fps/errors.hpp"

namespace fps::material {

/// Which scalar modulus the beam surrogate uses for bending.
enum class BendingPolicy { use_e_z, use_e_xy, geometric_mean };

const char* to_string(BendingPolicy policy);
/// Parses "use_e_z" | "use_e_xy" | "geometric_mean"; throws DomainError otherwise.
BendingPolicy parse_bending_policy(const std::string& text);

/// Orthotropic elastic constants of the printed part, moduli in GPa.
/// The build plane is XY; Z is the build direction.
struct MaterialModel {
  double e_xy = 155.0;
  double e_z = 150.0;
  double nu = 0.3;
  double g = 59.0;
  BendingPolicy bending_policy = BendingPolicy::use_e_z;

  /// "155/150" style label used in reports.
  std::string label() const;
  /// "155_150" style stem used for curve file names.
  std::string file_stem() const;
};

/// Throws DomainError when a field is outside its physical range.
void validate(const MaterialModel& m);

/// Huber estimate G = sqrt(Ea Eb) / (2 (1 + sqrt(nu_ab nu_ba))).
double huber_shear_modulus(double e_a, double e_b, double nu_ab, double nu_ba);

/// The four build-plane/build-direction modulus pairs 155/150 ... 185/180 GPa,
/// each with nu = 0.3 and G fixed at 59 GPa.
std::vector<MaterialModel> sensitivity_set(BendingPolicy policy = BendingPolicy::use_e_z);

/// Bending modulus in GPa selected by the model's policy.
double bending_modulus(const MaterialModel& m);

}  // namespace fps::material

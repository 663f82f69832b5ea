#include "fps/material.hpp"

#include <cmath>
#include <sstream>

namespace fps::material {

namespace {

std::string trim_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(BendingPolicy policy) {
  switch (policy) {
    case BendingPolicy::use_e_z: return "use_e_z";
    case BendingPolicy::use_e_xy: return "use_e_xy";
    case BendingPolicy::geometric_mean: return "geometric_mean";
  }
  return "?";
}

BendingPolicy parse_bending_policy(const std::string& text) {
  if (text == "use_e_z") return BendingPolicy::use_e_z;
  if (text == "use_e_xy") return BendingPolicy::use_e_xy;
  if (text == "geometric_mean") return BendingPolicy::geometric_mean;
  throw DomainError("unknown bending_policy '" + text + "'");
}

std::string MaterialModel::label() const { return trim_number(e_xy) + "/" + trim_number(e_z); }
std::string MaterialModel::file_stem() const { return trim_number(e_xy) + "_" + trim_number(e_z); }

void validate(const MaterialModel& m) {
  if (!(m.e_xy > 0.0) || !(m.e_z > 0.0) || !(m.g > 0.0)) {
    throw DomainError("material " + m.label() + ": moduli must be positive");
  }
  if (!(m.nu > 0.0 && m.nu < 0.5)) throw DomainError("material " + m.label() + ": need 0 < nu < 0.5");
  if (m.e_z > m.e_xy) throw DomainError("material " + m.label() + ": need e_z <= e_xy");
}

double huber_shear_modulus(double e_a, double e_b, double nu_ab, double nu_ba) {
  if (!(e_a > 0.0) || !(e_b > 0.0)) throw DomainError("huber_shear_modulus: moduli must be positive");
  if (!(nu_ab > 0.0) || !(nu_ba > 0.0) || !(nu_ab * nu_ba < 1.0)) {
    throw DomainError("huber_shear_modulus: need positive Poisson ratios with nu_ab*nu_ba < 1");
  }
  return std::sqrt(e_a * e_b) / (2.0 * (1.0 + std::sqrt(nu_ab * nu_ba)));
}

std::vector<MaterialModel> sensitivity_set(BendingPolicy policy) {
  std::vector<MaterialModel> set;
  for (double e_xy : {155.0, 165.0, 175.0, 185.0}) {
    set.push_back({e_xy, e_xy - 5.0, 0.3, 59.0, policy});
  }
  return set;
}

double bending_modulus(const MaterialModel& m) {
  switch (m.bending_policy) {
    case BendingPolicy::use_e_z: return m.e_z;
    case BendingPolicy::use_e_xy: return m.e_xy;
    case BendingPolicy::geometric_mean: return std::sqrt(m.e_xy * m.e_z);
  }
  return m.e_z;
}

}  // namespace fps::material

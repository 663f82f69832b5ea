#include <cmath>
#include <sstream>

#include "fps/solver.hpp"

namespace fps::solver {

namespace {

constexpr double kGpaToNPerMm2 = 1000.0;

}  // namespace

BeamModel BeamModel::prismatic(double length, double ea, double ei, int n_elements) {
  if (!(length > 0.0) || n_elements < 1) throw DomainError("prismatic: need length > 0 and n >= 1");
  BeamModel model;
  model.span = length;
  model.elements.assign(n_elements, {length / n_elements, ea, ei, geometry::Region::flexible, 0.0});
  check_model(model);
  return model;
}

void check_model(const BeamModel& model) {
  if (model.elements.empty()) throw DomainError("beam model has no elements");
  double total = 0.0;
  for (const auto& e : model.elements) {
    if (!(e.length > 0.0) || !(e.ea > 0.0) || !(e.ei > 0.0) || e.gas < 0.0) {
      throw DomainError("beam element needs positive length, EA and EI");
    }
    total += e.length;
  }
  if (std::abs(total - model.span) > 1e-9 * model.span) {
    std::ostringstream os;
    os << "element lengths sum to " << total << " mm, span is " << model.span << " mm";
    throw DomainError(os.str());
  }
}

BeamModel discretize(const geometry::ScrewSpec& spec, const material::MaterialModel& m,
                     double kappa_f, int n_elements) {
  if (auto v = geometry::validate_spec(spec); !v.empty()) throw geometry::SpecError(std::move(v));
  material::validate(m);
  if (!(kappa_f > 0.0 && kappa_f <= 1.0)) {
    throw DomainError("discretize: kappa_f must lie in (0, 1]");
  }
  if (n_elements < 8) throw DomainError("discretize: need at least 8 elements");

  const double e = material::bending_modulus(m) * kGpaToNPerMm2;
  const auto section = geometry::section_properties(spec.core_d, spec.cannula_d);
  const double tip = spec.tip_r();

  BeamModel model;
  model.kappa_f = kappa_f;
  model.span = spec.len_flexible + tip;

  // node on the flexible/tip junction; tip gets its share of elements, at least one
  const int n_tip = std::max(1, static_cast<int>(std::lround(n_elements * tip / model.span)));
  const int n_flex = n_elements - n_tip;
  model.elements.reserve(n_elements);
  for (int k = 0; k < n_flex; ++k) {
    model.elements.push_back({spec.len_flexible / n_flex, kappa_f * e * section.area,
                              kappa_f * e * section.second_moment, geometry::Region::flexible, 0.0});
  }
  for (int k = 0; k < n_tip; ++k) {
    model.elements.push_back(
        {tip / n_tip, e * section.area, e * section.second_moment, geometry::Region::tip, 0.0});
  }
  check_model(model);
  return model;
}

}  // namespace fps::solver

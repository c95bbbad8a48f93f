#include "fracxy/potentials.hpp"

namespace fracxy {

std::string to_string(BaseProfile base) {
  switch (base) {
    case BaseProfile::one_minus_cos: return "one_minus_cos";
    case BaseProfile::stiffened: return "stiffened";
  }
  return "one_minus_cos";
}

BaseProfile base_profile_from_string(const std::string& name) {
  if (name == "one_minus_cos" || name == "1-cos") return BaseProfile::one_minus_cos;
  if (name == "stiffened") return BaseProfile::stiffened;
  throw Error(Errc::config, "unknown base profile '" + name + "'");
}

void validate(const PotentialSpec& spec) {
  if (spec.n < 1) throw Error(Errc::construction, "well count n must be at least 1");
  // The truncation must stay below f(pi) so the band endpoints are never
  // lifted; f(pi) >= 2 for every admissible base.
  const double f_pi = eval_base(spec.base, std::numbers::pi);
  if (!(spec.epsilon > 0.0) || !(spec.epsilon < f_pi))
    throw Error(Errc::construction, "truncation level must lie in (0, f(pi))");
}

}  // namespace fracxy

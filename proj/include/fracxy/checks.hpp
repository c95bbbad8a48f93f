#pragma once

#include <cstdint>
#include <string>

namespace fracxy {

/// Outcome of a randomized property check.
struct CheckResult {
  std::string name;
  long trials = 0;
  long violations = 0;
  double max_error = 0.0;  // check-specific worst deviation

  bool passed() const { return violations == 0; }
};

/// Cell vorticity in {-1, 0, 1} and the discrete Stokes identity (to 1e-10)
/// on the whole domain and a random disk subregion, for random fields.
CheckResult check_vorticity_and_stokes(long fields, std::uint64_t seed);

/// Differences of exactly +-pi and odd multiples of pi.
CheckResult check_tie_rule();

/// F^(n)_eps(phi) >= F^sym(n phi) >= XY(e^{i n phi}) for random fields, n,
/// eps and base profiles.
CheckResult check_comparison_chain(long fields, std::uint64_t seed);

/// XY(w) >= 1/2 int |grad A|^2 for the affine interpolation A of w.
CheckResult check_interpolation_bound(long fields, std::uint64_t seed);

/// construct_field followed by vorticity_measure(n phi) returns the prescribed
/// atoms, and the jump bonds are exactly those crossed by the strings.
CheckResult check_construct_roundtrip(int prescriptions, std::uint64_t seed);

/// Exact flat norm against the LP oracle within 2% plus grid quantization.
/// max_error is the worst relative gap.
CheckResult check_flat_norm_oracle(int instances, std::uint64_t seed, int grid);

/// Relaxation logs never increase in energy.
CheckResult check_relax_monotone(int runs, std::uint64_t seed);

}  // namespace fracxy

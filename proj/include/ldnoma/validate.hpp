#pragma once

#include "ldnoma/spectra.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ldnoma {

enum class ValidationLevel { Fast, Full };

// The closed-form density every check evaluates. Tests swap in a corrupted
// evaluator to confirm the suite can fail.
struct ValidationContext {
  std::function<double(double, const DensityParams&)> density = analytic_density;
  std::uint64_t seed = 20240611;
  unsigned threads = 1;
  // Realizations for the optional N=2600 spectrum check (full level).
  std::size_t full_size_realizations = 1000;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CheckResult> run_validation(ValidationLevel level, const ValidationContext& ctx,
                                        const std::function<void(const CheckResult&)>& on_result = {});

// Density that returns -rho; used by the injected-fault path.
double sign_flipped_density(double lambda, const DensityParams& p);

} // namespace ldnoma

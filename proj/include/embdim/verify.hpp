#pragma once

// Randomized checks of the lookup kernels against dense products.

#include <cstdint>
#include <string>
#include <vector>

namespace embdim {

struct KernelCheckConfig {
  std::int64_t n = 128;
  std::int64_t d = 16;
  std::int64_t r = 8;
  std::int64_t k = 5;
  std::uint64_t seed = 20190101;
  std::int64_t trials = 100;
  // Test-only negative control: negates the first accumulation of the
  // weighted kernel under test.
  bool inject_fault = false;
};

inline constexpr double kKernelRelativeTolerance = 1e-12;

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::int64_t trials = 0;
  std::uint64_t counterexample_seed = 0;  // meaningful when !passed
  std::string detail;
};

/// One-hot equivalence, weighted and batched densification oracles,
/// linearity, batch permutation and batch deletion. Trial i uses seed + i.
std::vector<PropertyResult> run_kernel_checks(const KernelCheckConfig& config);

}  // namespace embdim

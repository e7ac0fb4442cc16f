#pragma once

#include <cstdint>
#include <span>

namespace phonovec {

struct BootstrapConfig {
  int n_samples = 1000;
  int n_replicates = 10;
  double ci_level = 0.99;
  std::uint64_t seed = 0;
  /// Redraws allowed for a zero-norm sample before the estimate fails.
  int max_redraws = 100;
};

void validate(const BootstrapConfig& cfg);

struct BootstrapEstimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_samples = 0;
  int n_replicates = 0;
  std::uint64_t seed = 0;
};

/// Normal-approximation interval over replicate means:
/// mean +/- z_{(1+level)/2} * sd(replicate means).
BootstrapEstimate summarize_replicates(std::span<const double> replicate_means,
                                       double ci_level, int n_samples,
                                       std::uint64_t seed);

}  // namespace phonovec

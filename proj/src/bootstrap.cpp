#include "phonovec/bootstrap.hpp"

#include "phonovec/error.hpp"
#include "phonovec/stats.hpp"

namespace phonovec {

void validate(const BootstrapConfig& cfg) {
  if (cfg.n_samples < 1) throw Error(Errc::InvalidConfig, "n_samples must be >= 1");
  if (cfg.n_replicates < 2) throw Error(Errc::InvalidConfig, "n_replicates must be >= 2");
  if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) {
    throw Error(Errc::InvalidConfig, "ci_level must lie in (0, 1)");
  }
  if (cfg.max_redraws < 0) throw Error(Errc::InvalidConfig, "max_redraws must be >= 0");
}

BootstrapEstimate summarize_replicates(std::span<const double> replicate_means,
                                       double ci_level, int n_samples,
                                       std::uint64_t seed) {
  if (replicate_means.empty()) {
    throw Error(Errc::EmptyInput, "no replicate means to summarize");
  }
  const double m = mean(replicate_means);
  const double half = normal_quantile(0.5 + ci_level / 2) * sample_stddev(replicate_means);
  return {m, m - half, m + half, n_samples, static_cast<int>(replicate_means.size()), seed};
}

}  // namespace phonovec

#pragma once

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "phonovec/config.hpp"
#include "phonovec/corpus.hpp"
#include "phonovec/feature_system.hpp"

namespace phonovec {

/// Dump directories for the selected layers: either `dump` itself (when it
/// holds a manifest) or its `layer_<k>` subdirectories. Throws MissingLayer.
std::vector<std::pair<int, std::filesystem::path>> resolve_layers(const RunConfig& cfg);

FeatureTable load_table(const RunConfig& cfg);
BankFilters load_filters(const RunConfig& cfg);

// Subcommands. Each writes its files under cfg.out and a short summary to `log`.
void cmd_mine(const RunConfig& cfg, std::ostream& log);
void cmd_eval(const RunConfig& cfg, std::ostream& log);
void cmd_pcs(const RunConfig& cfg, std::ostream& log);
void cmd_vectors(const RunConfig& cfg, std::ostream& log);
void cmd_edit(const RunConfig& cfg, std::ostream& log);
void cmd_correlate(const RunConfig& cfg, std::ostream& log);
void cmd_stability(const RunConfig& cfg, std::ostream& log);
void cmd_gen_synthetic(const RunConfig& cfg, std::ostream& log);

/// Exit status: 0 success, 1 runtime failure, 2 usage or validation error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phonovec

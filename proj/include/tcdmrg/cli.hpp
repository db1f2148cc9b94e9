#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tcdmrg/config.hpp"

namespace tcdmrg {

// Command-line modifiers shared by every subcommand.  The seed override, when
// present, replaces dmrg.seed; a non-empty out path replaces output.path.
// Both replacements happen before the config echo is written, so output files
// always record what actually ran.
struct CliOptions {
  std::string out_override;
  bool slow = false;
  std::optional<std::uint64_t> seed_override;
};

// Largest determinant-sector dimension the ed command accepts by default, and
// the ceiling the --slow flag raises it to.
inline constexpr std::size_t kEdSectorCap = 200000;
inline constexpr std::size_t kEdSectorCapSlow = 20000000;

// Exit-code contract for all four commands: 0 success, 2 finished but not
// converged (run) or some grid cell failed (scan), 1 refused or failed.
// Configuration and I/O problems raise ConfigError; the binary's main maps
// any exception to exit 1.
int cmd_run(const ExperimentConfig& cfg, const CliOptions& opt,
            std::ostream& log);
int cmd_ed(const ExperimentConfig& cfg, const CliOptions& opt,
           std::ostream& log);
int cmd_mpo_stats(const ExperimentConfig& cfg, const CliOptions& opt,
                  std::ostream& log);
int cmd_scan(const ExperimentConfig& cfg, const CliOptions& opt,
             std::ostream& log);

}  // namespace tcdmrg

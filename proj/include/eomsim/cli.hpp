#pragma once

#include <iosfwd>
#include <string>

#include "eomsim/config.hpp"
#include "eomsim/equivcircuit.hpp"

namespace eomsim {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;  // 0: hardware concurrency
    bool override_sideband_guard = false;
};

/// Assemble the transducer from a parsed config.
TransducerSystem build_system(const RunConfig& cfg, bool override_guard = false);

/// Electrical readout port for homodyne/report defaults: the configured one,
/// else the first transmission-line port, else the first port.
std::string pick_readout_port(const TransducerSystem& sys, const RunConfig& cfg);

// Subcommands. All throw on failure; run_cli maps exceptions to exit codes
// (0 ok, 1 config error, 2 physics error, 3 I/O error).
void cmd_validate(const RunConfig& cfg, const CliOptions& opt, std::ostream& out);
void cmd_smatrix(const RunConfig& cfg, const CliOptions& opt, std::ostream& log);
void cmd_squeeze(const RunConfig& cfg, const CliOptions& opt, std::ostream& log);
void cmd_report(const RunConfig& cfg, const CliOptions& opt, std::ostream& log);
void cmd_reduce(const RunConfig& cfg, const CliOptions& opt, std::ostream& log);

int run_cli(int argc, const char* const* argv);

}  // namespace eomsim

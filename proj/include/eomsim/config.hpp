#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eomsim/couplings.hpp"
#include "eomsim/netlist.hpp"

namespace eomsim {

/// Flat INI-style sections of key = value pairs; '#' and ';' comments.
using IniData = std::map<std::string, std::map<std::string, std::string>>;

IniData parse_ini(const std::string& text);

enum class SweepSpacing { Linear, Log };

struct SweepSpec {
    double omega_min;  // rad/s, > 0
    double omega_max;
    int points;        // >= 2
    SweepSpacing spacing = SweepSpacing::Linear;

    std::vector<double> grid() const;
};

struct RunConfig {
    std::string netlist_path;      // resolved relative to the config file
    std::string netlist_text;      // loaded eagerly
    MechanicalMode mechanical;
    EMCouplingSpec em;
    std::optional<OMCouplingSpec> om;
    SweepSpec sweep;
    std::vector<double> homodyne_thetas;  // rad
    std::string readout_port;             // for homodyne pairs; default: first T port
    std::string signal_in;                // channel id for eta/N
    std::string signal_out;
};

/// Parse and validate a config file. SI base units throughout; angular
/// frequencies accepted as either omega_* (rad/s) or f_* (Hz, converted by
/// 2 pi), never both. Throws ConfigError with the offending section/key.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& base_dir);

}  // namespace eomsim

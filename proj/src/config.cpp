#include "eomsim/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eomsim/errors.hpp"

namespace eomsim {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class Section {
public:
    Section(const IniData& ini, std::string name) : name_(std::move(name)) {
        auto it = ini.find(name_);
        if (it != ini.end()) data_ = &it->second;
    }

    bool exists() const { return data_ != nullptr; }

    bool has(const std::string& key) const {
        return data_ != nullptr && data_->count(key) > 0;
    }

    std::string str(const std::string& key) const {
        require(key);
        return data_->at(key);
    }

    std::string str_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? data_->at(key) : fallback;
    }

    double number(const std::string& key) const {
        require(key);
        return to_number(key, data_->at(key));
    }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? to_number(key, data_->at(key)) : fallback;
    }

    /// Angular frequency: omega_<stem> in rad/s or f_<stem> in Hz.
    double angular(const std::string& stem) const {
        bool has_omega = has("omega_" + stem), has_f = has("f_" + stem);
        if (has_omega && has_f) {
            throw ConfigError("[" + name_ + "] specifies both omega_" + stem +
                              " and f_" + stem + "; use one");
        }
        if (has_omega) return number("omega_" + stem);
        if (has_f) return consts::two_pi * number("f_" + stem);
        throw ConfigError("[" + name_ + "] is missing omega_" + stem + " (rad/s) or f_" +
                          stem + " (Hz)");
    }

    void require(const std::string& key) const {
        if (!has(key)) {
            throw ConfigError("[" + name_ + "] is missing required key '" + key + "'");
        }
    }

    double to_number(const std::string& key, const std::string& value) const {
        double out = 0.0;
        auto trimmed = trim(value);
        auto [ptr, ec] =
            std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), out);
        if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
            throw ConfigError("[" + name_ + "] key '" + key + "' is not a number: '" +
                              value + "'");
        }
        return out;
    }

private:
    std::string name_;
    const std::map<std::string, std::string>* data_ = nullptr;
};

}  // namespace

IniData parse_ini(const std::string& text) {
    IniData ini;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header at line " +
                                  std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            ini[section];
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value at line " + std::to_string(line_no));
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("empty key at line " + std::to_string(line_no));
        }
        ini[section][key] = value;
    }
    return ini;
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> out(points);
    if (spacing == SweepSpacing::Linear) {
        for (int i = 0; i < points; ++i) {
            out[i] = omega_min +
                     (omega_max - omega_min) * static_cast<double>(i) / (points - 1);
        }
    } else {
        double l0 = std::log(omega_min), l1 = std::log(omega_max);
        for (int i = 0; i < points; ++i) {
            out[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (points - 1));
        }
    }
    return out;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    IniData ini = parse_ini(text);
    RunConfig cfg;

    Section netlist(ini, "netlist");
    if (!netlist.exists()) throw ConfigError("missing [netlist] section");
    cfg.netlist_path = netlist.str("path");
    std::filesystem::path p(cfg.netlist_path);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    {
        std::ifstream in(p);
        if (!in) throw ConfigError("cannot open netlist file '" + p.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg.netlist_text = buf.str();
    }

    Section mech(ini, "mechanical");
    if (!mech.exists()) throw ConfigError("missing [mechanical] section");
    cfg.mechanical.mass = mech.number("m");
    cfg.mechanical.omega_m0 = mech.angular("m0");
    cfg.mechanical.gamma_m0 = mech.number("gamma_m0");
    cfg.mechanical.temperature = mech.number_or("T_m", 0.0);
    if (cfg.mechanical.mass <= 0.0 || cfg.mechanical.omega_m0 <= 0.0 ||
        cfg.mechanical.gamma_m0 <= 0.0 || cfg.mechanical.temperature < 0.0) {
        throw ConfigError("[mechanical] m, omega_m0, gamma_m0 must be positive "
                          "and T_m non-negative");
    }

    Section em(ini, "em");
    if (!em.exists()) throw ConfigError("missing [em] section");
    cfg.em.c_couple = em.number("Cc");
    cfg.em.dC_dx = em.number("dCdx");
    cfg.em.d2C_dx2 = em.number_or("d2Cdx2", 0.0);
    cfg.em.q_bias = em.number("Qc0");
    std::string bias = em.str_or("bias", "dc");
    if (bias == "dc") {
        cfg.em.bias = BiasKind::DC;
        cfg.em.omega_drive = 0.0;
    } else if (bias == "ac") {
        cfg.em.bias = BiasKind::AC;
        cfg.em.omega_drive = em.angular("d");
        if (cfg.em.omega_drive <= 0.0) {
            throw ConfigError("[em] omega_d must be positive for AC bias");
        }
    } else {
        throw ConfigError("[em] bias must be \"dc\" or \"ac\"");
    }
    if (cfg.em.c_couple <= 0.0) throw ConfigError("[em] Cc must be positive");

    Section om(ini, "om");
    if (om.exists()) {
        OMCouplingSpec o;
        o.omega_cav = om.angular("cav");
        o.kappa_int = om.number("kappa_int");
        o.kappa_ext = om.number("kappa_ext");
        o.omega_laser = om.angular("l");
        o.coupling_gom = om.number("G_OM");
        o.theta = om.number_or("theta", 0.0);
        o.static_shift = om.number_or("static_shift", 0.0);
        o.temperature = om.number_or("T_opt", 0.0);
        if (o.kappa_int < 0.0 || o.kappa_ext < 0.0 || o.kappa_int + o.kappa_ext <= 0.0) {
            throw ConfigError("[om] kappa_int/kappa_ext must be non-negative with "
                              "a positive sum");
        }
        if (o.omega_cav <= 0.0 || o.omega_laser <= 0.0) {
            throw ConfigError("[om] omega_cav and omega_l must be positive");
        }
        cfg.om = o;
    }

    Section sweep(ini, "sweep");
    if (!sweep.exists()) throw ConfigError("missing [sweep] section");
    cfg.sweep.omega_min = sweep.angular("min");
    cfg.sweep.omega_max = sweep.angular("max");
    cfg.sweep.points = static_cast<int>(sweep.number("points"));
    std::string spacing = sweep.str_or("spacing", "linear");
    if (spacing == "linear") {
        cfg.sweep.spacing = SweepSpacing::Linear;
    } else if (spacing == "log") {
        cfg.sweep.spacing = SweepSpacing::Log;
    } else {
        throw ConfigError("[sweep] spacing must be \"linear\" or \"log\"");
    }
    if (!(cfg.sweep.omega_min > 0.0) || !(cfg.sweep.omega_max > cfg.sweep.omega_min)) {
        throw ConfigError("[sweep] requires 0 < omega_min < omega_max");
    }
    if (cfg.sweep.points < 2) throw ConfigError("[sweep] points must be >= 2");

    Section homodyne(ini, "homodyne");
    if (homodyne.exists()) {
        cfg.readout_port = homodyne.str_or("readout", "");
        if (homodyne.has("theta_list")) {
            std::istringstream ts(homodyne.str("theta_list"));
            std::string tok;
            while (std::getline(ts, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                cfg.homodyne_thetas.push_back(homodyne.to_number("theta_list", tok));
            }
        }
        for (double t : cfg.homodyne_thetas) {
            if (!std::isfinite(t)) throw ConfigError("[homodyne] theta_list has a "
                                                     "non-finite entry");
        }
    }
    if (cfg.homodyne_thetas.empty()) cfg.homodyne_thetas.push_back(0.0);

    Section report(ini, "report");
    if (report.exists()) {
        cfg.signal_in = report.str_or("signal_in", "");
        cfg.signal_out = report.str_or("signal_out", "");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace eomsim

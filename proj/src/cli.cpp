#include "eomsim/cli.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "eomsim/errors.hpp"
#include "eomsim/noise.hpp"
#include "eomsim/reduce.hpp"
#include "eomsim/scattering.hpp"

namespace eomsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Run fn(i) for i in [0, n) on a small worker pool, rethrowing the first
/// worker exception. Results must be written to pre-sized slots so output
/// order is independent of completion order.
template <typename F>
void parallel_for(int n, int threads, F&& fn) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

std::filesystem::path out_path(const CliOptions& opt, const std::string& name) {
    std::filesystem::path dir(opt.out_dir.empty() ? "." : opt.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    return dir / name;
}

void check_sweep_guard(const TransducerSystem& sys, const RunConfig& cfg,
                       const CliOptions& opt) {
    if (!opt.override_sideband_guard && cfg.sweep.omega_max > sys.guard_limit()) {
        throw SidebandOutOfRangeError(
            "sweep extends beyond the sideband validity guard (Omega_max > " +
            fmt(sys.options().sideband_guard_fraction) +
            " * carrier); rerun with --override-sideband-guard to accept the "
            "degraded slow-mechanics approximation");
    }
}

std::string guard_note(const CliOptions& opt) {
    return opt.override_sideband_guard
               ? "# WARNING: sideband validity guard overridden; slow-mechanics "
                 "approximation degraded\n"
               : "";
}

std::string channel_header(const std::vector<PortChannel>& channels) {
    std::string line = "# channels:";
    for (const auto& ch : channels) line += " " + ch.id;
    line += "\n";
    return line;
}

std::string matrix_csv(const std::vector<double>& grid,
                       const std::vector<Eigen::MatrixXcd>& mats,
                       const std::vector<PortChannel>& channels,
                       const std::string& kind, const std::string& note) {
    std::ostringstream os;
    os << "# eomsim smatrix (" << kind << " basis)\n" << note
       << channel_header(channels)
       << "# columns: omega_rad_s then Re,Im of S[i][j] row-major\n";
    for (size_t k = 0; k < grid.size(); ++k) {
        os << fmt(grid[k]);
        const Eigen::MatrixXcd& m = mats[k];
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                os << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag());
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace

TransducerSystem build_system(const RunConfig& cfg, bool override_guard) {
    TransducerOptions opt;
    opt.override_sideband_guard = override_guard;
    Netlist net = parse_netlist(cfg.netlist_text);
    return TransducerSystem(std::move(net), cfg.mechanical, cfg.em, cfg.om, opt);
}

std::string pick_readout_port(const TransducerSystem& sys, const RunConfig& cfg) {
    if (!cfg.readout_port.empty()) return cfg.readout_port;
    const auto& ports = sys.electrical_network().ports();
    if (ports.empty()) throw ConfigError("the netlist has no ports to read out");
    for (const PortInfo& p : ports) {
        if (p.origin == PortOrigin::TransmissionLine) return p.id;
    }
    return ports.front().id;
}

void cmd_validate(const RunConfig& cfg, const CliOptions& opt, std::ostream& out) {
    Netlist net = parse_netlist(cfg.netlist_text);
    NodalNetwork compiled(net);

    double g = coupling_strength(cfg.em);
    out << "G = " << fmt(g) << " V/m\n";
    if (g == 0.0) {
        out << "warning: mechanical branch decoupled (G = 0); no equivalent "
               "branch exists\n";
        return;
    }
    TransducerSystem sys = build_system(cfg, opt.override_sideband_guard);
    const EquivalentBranches& el = sys.elements();
    out << "L_m = " << fmt(el.l_mech) << " H\n"
        << "R_m = " << fmt(el.r_mech) << " ohm\n"
        << "C_m = " << fmt(el.c_mech) << " F\n"
        << "C_m_prime = " << fmt(el.c_mech_prime) << " F\n"
        << "omega_mV = " << fmt(el.omega_mV) << " rad/s\n"
        << "omega_mQ = " << fmt(el.omega_mQ) << " rad/s\n"
        << "f_mV = " << fmt(el.omega_mV / consts::two_pi) << " Hz\n"
        << "f_mQ = " << fmt(el.omega_mQ / consts::two_pi) << " Hz\n";

    ReducedCircuit rc = reduce(sys);
    out << "C_EM = " << fmt(rc.c_em) << "\n";
    if (sys.om_spec()) {
        out << "C_OM = " << fmt(rc.c_om) << "\n"
            << "g_OM = " << fmt(rc.g_om) << " rad/s\n"
            << "L_opt = " << fmt(el.l_opt) << " H\n"
            << "C_opt = " << fmt(el.c_opt) << " F\n"
            << "R_opt = " << fmt(el.r_opt) << " ohm\n";
        double kappa = sys.om_spec()->kappa_int + sys.om_spec()->kappa_ext;
        out << "eta_opt = " << fmt(sys.om_spec()->kappa_ext / kappa) << "\n";
    }
    if (rc.electrical_fit.valid) {
        out << "g_EM = " << fmt(rc.g_em) << " rad/s\n"
            << "electrical_resonance = " << fmt(rc.electrical_fit.omega_res)
            << " rad/s\n"
            << "electrical_linewidth = " << fmt(rc.electrical_fit.linewidth)
            << " rad/s\n";
    }
    {
        // Fraction of coupling-terminal power reaching the readout port at the
        // upper signal sideband.
        std::string ro = pick_readout_port(sys, cfg);
        const auto& ports = sys.electrical_network().ports();
        size_t ro_idx = 0;
        for (size_t i = 0; i < ports.size(); ++i) {
            if (ports[i].id == ro) ro_idx = i;
        }
        double w_sig = cfg.em.bias == BiasKind::AC ? cfg.em.omega_drive + el.omega_mQ
                                                   : el.omega_mQ;
        NetworkResponse r = sys.electrical_network().response(w_sig);
        double re_z = std::real(r.z_thev);
        if (re_z > 0.0) {
            double eta_el = std::norm(r.injection_response[ro_idx]) *
                            ports[ro_idx].impedance / re_z;
            out << "eta_el = " << fmt(eta_el) << "\n";
        }
    }
    for (const std::string& w : rc.warnings) out << "warning: " << w << "\n";
}

void cmd_smatrix(const RunConfig& cfg, const CliOptions& opt, std::ostream& log) {
    TransducerSystem sys = build_system(cfg, opt.override_sideband_guard);
    check_sweep_guard(sys, cfg, opt);
    std::vector<double> grid = cfg.sweep.grid();

    std::vector<Eigen::MatrixXcd> classical(grid.size()), bosonic(grid.size());
    std::vector<PortChannel> channels = scattering_channels(sys);
    parallel_for(static_cast<int>(grid.size()), opt.threads, [&](int i) {
        ScatteringMatrix sm = smatrix(sys, grid[i]);
        classical[i] = std::move(sm.classical);
        bosonic[i] = std::move(sm.bosonic);
    });

    atomic_write(out_path(opt, "smatrix_classical.csv"),
                 matrix_csv(grid, classical, channels, "classical voltage",
                            guard_note(opt)));
    atomic_write(out_path(opt, "smatrix_bosonic.csv"),
                 matrix_csv(grid, bosonic, channels, "bosonic", guard_note(opt)));
    log << "wrote smatrix_classical.csv, smatrix_bosonic.csv ("
        << grid.size() << " points, " << channels.size() << " channels)\n";
}

void cmd_squeeze(const RunConfig& cfg, const CliOptions& opt, std::ostream& log) {
    TransducerSystem sys = build_system(cfg, opt.override_sideband_guard);
    check_sweep_guard(sys, cfg, opt);
    std::vector<double> grid = cfg.sweep.grid();
    std::vector<PortChannel> channels = scattering_channels(sys);
    HomodynePair pair = find_readout_pair(channels, pick_readout_port(sys, cfg));

    const auto& thetas = cfg.homodyne_thetas;
    std::vector<std::vector<double>> s_values(grid.size(),
                                              std::vector<double>(thetas.size()));
    parallel_for(static_cast<int>(grid.size()), opt.threads, [&](int i) {
        ScatteringMatrix sm = smatrix(sys, grid[i]);
        for (size_t t = 0; t < thetas.size(); ++t) {
            s_values[i][t] = homodyne_spectrum_value(sm, pair, thetas[t]);
        }
    });

    std::ostringstream os;
    os << "# eomsim squeeze: homodyne spectrum, shot noise = 1\n" << guard_note(opt)
       << "# readout pair: " << channels[pair.upper].id << " / "
       << channels[pair.lower].id << "\n# columns: omega_rad_s";
    for (double t : thetas) os << ",S(theta=" << fmt(t) << ")";
    os << '\n';
    for (size_t i = 0; i < grid.size(); ++i) {
        os << fmt(grid[i]);
        for (double v : s_values[i]) os << ',' << fmt(v);
        os << '\n';
    }
    atomic_write(out_path(opt, "squeeze.csv"), os.str());
    log << "wrote squeeze.csv (" << grid.size() << " points, " << thetas.size()
        << " phases)\n";
}

namespace {

struct SignalChannels {
    size_t in;
    size_t out;
};

SignalChannels pick_signal_channels(const TransducerSystem& sys, const RunConfig& cfg,
                                    const std::vector<PortChannel>& channels) {
    std::string in_id = cfg.signal_in, out_id = cfg.signal_out;
    if (in_id.empty()) {
        in_id = sys.om_spec() ? pick_readout_port(sys, cfg) + ":+" : "m";
    }
    if (out_id.empty()) {
        out_id = sys.om_spec() ? "opt_ext:+" : pick_readout_port(sys, cfg) + ":+";
    }
    return {channel_index(channels, in_id), channel_index(channels, out_id)};
}

}  // namespace

void cmd_report(const RunConfig& cfg, const CliOptions& opt, std::ostream& log) {
    TransducerSystem sys = build_system(cfg, opt.override_sideband_guard);
    check_sweep_guard(sys, cfg, opt);
    std::vector<PortChannel> channels = scattering_channels(sys);
    SignalChannels sig = pick_signal_channels(sys, cfg, channels);

    const MechanicalPeak& pk = sys.peak();
    ReducedCircuit rc = reduce(sys);

    std::vector<double> grid = cfg.sweep.grid();
    std::vector<TransferNoise> tn(grid.size());
    parallel_for(static_cast<int>(grid.size()), opt.threads, [&](int i) {
        ScatteringMatrix sm = smatrix(sys, grid[i]);
        tn[i] = transfer_and_noise(sm, sig.in, sig.out);
    });

    TransferNoise peak_tn;
    {
        ScatteringMatrix sm = smatrix(sys, pk.omega_m);
        peak_tn = transfer_and_noise(sm, sig.in, sig.out);
    }

    std::ostringstream rep;
    rep << "# eomsim report\n" << guard_note(opt)
        << "signal_in = " << channels[sig.in].id << "\n"
        << "signal_out = " << channels[sig.out].id << "\n"
        << "Omega_m = " << fmt(pk.omega_m) << "\n"
        << "f_m = " << fmt(pk.omega_m / consts::two_pi) << "\n"
        << "R_m_eff = " << fmt(pk.r_m_eff) << "\n"
        << "gamma_m_eff = " << fmt(pk.gamma_m_eff) << "\n"
        << "omega_ref = " << fmt(rc.eval_omega) << "\n"
        << "C_EM = " << fmt(rc.c_em) << "\n"
        << "C_OM = " << fmt(rc.c_om) << "\n"
        << "g_EM = " << fmt(rc.g_em) << "\n"
        << "g_OM = " << fmt(rc.g_om) << "\n"
        << "eta_peak = " << fmt(peak_tn.eta) << "\n"
        << "N_peak = " << fmt(peak_tn.added_noise) << "\n";
    if (pk.multiple_roots) {
        rep << "# warning: multiple Im[Z_m,eff] roots in bracket (normal-mode "
               "splitting?); nearest to omega_mQ selected\n";
    }
    if (sys.om_spec()) {
        double kappa = sys.om_spec()->kappa_int + sys.om_spec()->kappa_ext;
        rep << "eta_opt = " << fmt(sys.om_spec()->kappa_ext / kappa) << "\n";
    }
    for (const std::string& w : rc.warnings) rep << "# warning: " << w << "\n";
    atomic_write(out_path(opt, "report.txt"), rep.str());

    std::ostringstream csv;
    csv << "# eomsim transfer/noise sweep\n" << guard_note(opt)
        << "# signal: " << channels[sig.in].id << " -> " << channels[sig.out].id
        << "\n# columns: omega_rad_s,eta,N\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        csv << fmt(grid[i]) << ',' << fmt(tn[i].eta) << ',' << fmt(tn[i].added_noise)
            << '\n';
    }
    atomic_write(out_path(opt, "transfer.csv"), csv.str());
    log << "wrote report.txt, transfer.csv\n";
}

void cmd_reduce(const RunConfig& cfg, const CliOptions& opt, std::ostream& log) {
    TransducerSystem sys = build_system(cfg, opt.override_sideband_guard);
    check_sweep_guard(sys, cfg, opt);
    ReducedCircuit rc = reduce(sys);
    const auto& sidebands = sys.sidebands();

    std::ostringstream rep;
    rep << "# eomsim reduced circuit\n" << guard_note(opt)
        << "eval_omega = " << fmt(rc.eval_omega) << "\n"
        << "C_m_tilde = " << fmt(rc.c_m_tilde) << "\n"
        << "Omega_m = " << fmt(rc.omega_m) << "\n"
        << "R_m_eff = " << fmt(rc.r_m_eff) << "\n"
        << "gamma_m_eff = " << fmt(rc.gamma_m_eff) << "\n"
        << "C_EM = " << fmt(rc.c_em) << "\n"
        << "C_OM = " << fmt(rc.c_om) << "\n"
        << "g_EM = " << fmt(rc.g_em) << "\n"
        << "g_OM = " << fmt(rc.g_om) << "\n";
    for (size_t s = 0; s < sidebands.size(); ++s) {
        std::string tag = (sidebands[s].subsystem == Subsystem::Electrical ? "EM" : "OM");
        tag += sidebands[s].baseband ? "_0" : (sidebands[s].sign > 0 ? "_plus" : "_minus");
        rep << "R_" << tag << " = " << fmt(rc.loads[s].resistance) << "\n"
            << "gamma_" << tag << " = " << fmt(rc.loads[s].rate) << "\n";
        if (rc.loads[s].lorentzian_valid) {
            rep << "lorentz_strength_" << tag << " = "
                << fmt(rc.loads[s].lorentz_strength) << "\n"
                << "lorentz_phase_" << tag << " = " << fmt(rc.loads[s].lorentz_phase)
                << "\n";
        }
    }
    for (const std::string& w : rc.warnings) rep << "# warning: " << w << "\n";
    atomic_write(out_path(opt, "reduced.txt"), rep.str());

    std::vector<double> grid = cfg.sweep.grid();
    std::vector<Eigen::MatrixXcd> full(grid.size()), red(grid.size());
    parallel_for(static_cast<int>(grid.size()), opt.threads, [&](int i) {
        full[i] = smatrix(sys, grid[i]).bosonic;
        red[i] = reduced_smatrix(sys, rc, grid[i]).bosonic;
    });

    std::vector<PortChannel> channels = scattering_channels(sys);
    std::ostringstream csv;
    csv << "# eomsim reduced vs full scattering (bosonic basis)\n" << guard_note(opt)
        << channel_header(channels)
        << "# columns: omega_rad_s,row,col,re_reduced,im_reduced,re_full,im_full\n";
    for (size_t k = 0; k < grid.size(); ++k) {
        for (Eigen::Index i = 0; i < full[k].rows(); ++i) {
            for (Eigen::Index j = 0; j < full[k].cols(); ++j) {
                csv << fmt(grid[k]) << ',' << i << ',' << j << ','
                    << fmt(red[k](i, j).real()) << ',' << fmt(red[k](i, j).imag()) << ','
                    << fmt(full[k](i, j).real()) << ',' << fmt(full[k](i, j).imag())
                    << '\n';
            }
        }
    }
    atomic_write(out_path(opt, "reduced_vs_full.csv"), csv.str());
    log << "wrote reduced.txt, reduced_vs_full.csv\n";
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"frequency-domain simulator for electro-optomechanical "
                 "transducers on their equivalent circuit"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "config file (INI)")->required();
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--threads", opt.threads, "worker threads (0 = auto)");
    app.add_flag("--override-sideband-guard", opt.override_sideband_guard,
                 "accept sweeps beyond the slow-mechanics validity guard");

    auto* validate = app.add_subcommand("validate", "parse inputs and print "
                                                    "derived quantities");
    auto* smx = app.add_subcommand("smatrix", "sweep the scattering matrix");
    auto* squeeze = app.add_subcommand("squeeze", "homodyne spectrum sweep");
    auto* report = app.add_subcommand("report", "transfer efficiency and added "
                                                "noise");
    auto* reduce_cmd = app.add_subcommand("reduce", "adiabatically reduced "
                                                    "circuit and scattering");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = load_config(opt.config_path);
        if (validate->parsed()) cmd_validate(cfg, opt, std::cout);
        if (smx->parsed()) cmd_smatrix(cfg, opt, std::cout);
        if (squeeze->parsed()) cmd_squeeze(cfg, opt, std::cout);
        if (report->parsed()) cmd_report(cfg, opt, std::cout);
        if (reduce_cmd->parsed()) cmd_reduce(cfg, opt, std::cout);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const SyntaxError& e) {
        std::cerr << "netlist error: " << e.what() << '\n';
        return 1;
    } catch (const DanglingNodeError& e) {
        std::cerr << "netlist error: " << e.what() << '\n';
        return 1;
    } catch (const NonPositiveValueError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const MissingCoupleDirectiveError& e) {
        std::cerr << "netlist error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "physics error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace eomsim

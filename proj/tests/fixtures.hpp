#pragma once

// Shared example systems for the test suites.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "eomsim/equivcircuit.hpp"
#include "eomsim/netlist.hpp"

namespace fixtures {

using namespace eomsim;

/// Random connected RLC(+port) netlist on a ring with chords.
inline Netlist random_netlist(std::mt19937& rng, bool with_ports = true) {
    std::uniform_real_distribution<double> log_r(0.0, 3.0);
    std::uniform_real_distribution<double> log_l(-8.0, -5.0);
    std::uniform_real_distribution<double> log_c(-14.0, -10.0);

    Netlist net;
    int n_nodes = 3 + static_cast<int>(rng() % 4);
    int n_elems = n_nodes + static_cast<int>(rng() % 4);
    for (int e = 0; e < n_elems; ++e) {
        Element el;
        int a = e % n_nodes;
        int b = (e < n_nodes) ? (e + 1) % n_nodes : static_cast<int>(rng() % n_nodes);
        if (a == b) b = (b + 1) % n_nodes;
        el.node_a = a == 0 ? "0" : "n" + std::to_string(a);
        el.node_b = b == 0 ? "0" : "n" + std::to_string(b);
        int kind = static_cast<int>(rng() % (with_ports ? 4 : 3));
        switch (kind) {
            case 0:
                el.kind = ElementKind::Resistor;
                el.value = std::pow(10.0, log_r(rng));
                break;
            case 1:
                el.kind = ElementKind::Inductor;
                el.value = std::pow(10.0, log_l(rng));
                break;
            case 2:
                el.kind = ElementKind::Capacitor;
                el.value = std::pow(10.0, log_c(rng));
                break;
            default:
                el.kind = ElementKind::TransmissionLine;
                el.value = std::pow(10.0, log_r(rng));
                break;
        }
        el.temperature = 0.0;
        const char* prefix[] = {"R", "L", "C", "T"};
        el.name = std::string(prefix[static_cast<int>(el.kind)]) + std::to_string(e);
        net.elements.push_back(el);
    }
    net.couple_terminals = {"n1", "0"};
    return net;
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// AC-biased squeezing example: overcoupled serial RLC (R_LC = 0) at
/// 1 GHz with Q_LC = 100 on a 50 ohm line, mechanics at 1 MHz with
/// gamma_m0 = 2 pi x 0.1 Hz at 4 K, drive red-detuned by 5 MHz,
/// G/sqrt(m) = 3.2e11 V/(m sqrt(kg)).
struct SqueezeLC {
    double z_tx = 50.0;
    double q_lc = 100.0;
    double omega_lc = consts::two_pi * 1e9;
    double l = q_lc * z_tx / omega_lc;
    double c_couple = 1.0 / (omega_lc * omega_lc * l);
    double mass = 1e-12;
    double g_over_sqrt_m = 3.2e11;
    double omega_drive = consts::two_pi * 0.995e9;
    double line_temperature = 0.0;

    std::string netlist_text() const {
        return "Ltank 1 2 " + num(l) + "\nRloss 2 3 0\nTtx 3 0 " + num(z_tx) +
               " temp=" + num(line_temperature) + "\n.couple 1 0\n";
    }

    MechanicalMode mech() const {
        return {mass, consts::two_pi * 1e6, consts::two_pi * 0.1, 4.0};
    }

    EMCouplingSpec em() const {
        EMCouplingSpec spec;
        spec.c_couple = c_couple;
        spec.dC_dx = -1e-12;
        spec.d2C_dx2 = 0.0;
        spec.bias = BiasKind::AC;
        spec.omega_drive = omega_drive;
        double g = g_over_sqrt_m * std::sqrt(mass);
        spec.q_bias = g * c_couple * c_couple / (-spec.dC_dx);
        return spec;
    }

    TransducerSystem system(TransducerOptions opt = {}) const {
        return TransducerSystem(parse_netlist(netlist_text()), mech(), em(),
                                std::nullopt, opt);
    }
};

/// Full electro-optomechanical transducer in the doubly resolved-sideband,
/// high-Q, weak-coupling regime: serial RLC (1 GHz, Q_LC = 500,
/// eta_el = 0.9) + mechanics near 10 MHz + optical mode (Q_cav = 1e8,
/// eta_opt = 0.9), both drives red-detuned by omega_mQ. C_EM = C_OM = 500.
struct Transducer {
    double z_tx = 50.0;
    double r_lc = 50.0 / 9.0;  // eta_el = 0.9
    double q_lc = 500.0;
    double omega_lc = consts::two_pi * 1e9;
    double l = q_lc * (z_tx + r_lc) / omega_lc;
    double c_couple = 1.0 / (omega_lc * omega_lc * l);
    double mass = 1e-12;
    double omega_mq = consts::two_pi * 1e7;
    // 2 Cc G^2/m = 1e-5 omega_mQ^2 keeps the spring shifts tiny.
    double g = std::sqrt(1e-5 * omega_mq * omega_mq * mass / (2.0 * c_couple));
    double gamma_m0 = consts::two_pi * 50.0;
    double t_m = 0.02;
    double t_el = 0.03;

    double omega_cav = consts::two_pi * 2e14;
    double kappa = consts::two_pi * 2e6;
    double eta_opt = 0.9;
    // gamma_OM,+ matches gamma_EM,+ = Q_LC Cc G^2 / (m omega_mQ).
    double g_om_rate() const { return std::sqrt(gamma_em_plus() * kappa / 4.0); }
    double gamma_em_plus() const { return q_lc * c_couple * g * g / (mass * omega_mq); }

    std::string netlist_text() const {
        return "Ltank 1 2 " + num(l) + "\nRloss 2 3 " + num(r_lc) + " temp=" +
               num(t_el) + "\nTtx 3 0 " + num(z_tx) + " temp=" + num(t_el) +
               "\n.couple 1 0\n";
    }

    MechanicalMode mech() const {
        double w_mv_sq = omega_mq * omega_mq - 2.0 * c_couple * g * g / mass;
        return {mass, std::sqrt(w_mv_sq), gamma_m0, t_m};
    }

    EMCouplingSpec em() const {
        EMCouplingSpec spec;
        spec.c_couple = c_couple;
        spec.dC_dx = -1e-12;
        spec.d2C_dx2 = 0.0;
        spec.bias = BiasKind::AC;
        spec.omega_drive = omega_lc - omega_mq;  // red-detuned at resonance
        spec.q_bias = g * c_couple * c_couple / (-spec.dC_dx);
        return spec;
    }

    OMCouplingSpec om() const {
        OMCouplingSpec spec;
        spec.omega_cav = omega_cav;
        spec.kappa_int = (1.0 - eta_opt) * kappa;
        spec.kappa_ext = eta_opt * kappa;
        spec.omega_laser = omega_cav - omega_mq;
        spec.coupling_gom = g_om_rate() * std::sqrt(4.0 * mass * omega_mq);
        spec.theta = 0.0;
        spec.static_shift = 0.0;
        spec.temperature = 0.0;
        return spec;
    }

    TransducerSystem system(TransducerOptions opt = {}) const {
        return TransducerSystem(parse_netlist(netlist_text()), mech(), em(), om(),
                                opt);
    }
};

/// DC-biased electromechanics: serial L + line resonating near the 1 MHz
/// mechanical mode, moderate cooperativity; used by the time-domain cross
/// checks.
struct DcBiased {
    double z_tx = 50.0;
    double omega_m = consts::two_pi * 1e6;
    double c_couple = 1e-9;
    double l = 1.0 / (omega_m * omega_m * c_couple);
    double mass = 1e-9;
    double g = 1e5;
    double gamma_m0 = consts::two_pi * 2e3;

    std::string netlist_text() const {
        return "Ltank 1 2 " + num(l) + "\nTtx 2 0 " + num(z_tx) + "\n.couple 1 0\n";
    }

    MechanicalMode mech() const { return {mass, omega_m, gamma_m0, 0.1}; }

    EMCouplingSpec em() const {
        EMCouplingSpec spec;
        spec.c_couple = c_couple;
        spec.dC_dx = -1e-12;
        spec.d2C_dx2 = 0.0;
        spec.bias = BiasKind::DC;
        spec.omega_drive = 0.0;
        spec.q_bias = g * c_couple * c_couple / (-spec.dC_dx);
        return spec;
    }

    TransducerSystem system(TransducerOptions opt = {}) const {
        return TransducerSystem(parse_netlist(netlist_text()), mech(), em(),
                                std::nullopt, opt);
    }
};

}  // namespace fixtures

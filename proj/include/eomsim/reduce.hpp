#pragma once

#include <string>
#include <vector>

#include "eomsim/scattering.hpp"

namespace eomsim {

/// Lorentzian description of an eliminated resonance, fitted to the total
/// admittance -i w C + 1/Z(w) seen by the mechanical loop. For the optical
/// mode this is exact by construction; for a structured electrical Z(w) the
/// fit may fail, in which case only the general resistances apply.
struct LorentzianFit {
    bool valid = false;
    double omega_res = 0.0;   // resonance of the loaded branch
    double linewidth = 0.0;   // loaded energy decay rate
    double q_factor = 0.0;
};

/// Per-sideband effective load in the reduced mechanical circuit. The stored
/// resistance is non-negative; its sign (+ upper / - lower) is applied only
/// in the R_m,eff sum.
struct BranchLoad {
    double resistance;  // R_EM,+- or R_OM,+-
    double rate;        // gamma_s = R_s / L_m (anti-Stokes / Stokes rate)
    bool lorentzian_valid = false;
    double lorentz_strength = 0.0;  // |L(w_c +- w_mQ)|
    double lorentz_phase = 0.0;     // Arg[L(w_c +- w_mQ)]
};

struct ReducedCircuit {
    double eval_omega;   // frequency at which the branches were frozen (w_mQ)
    double c_m_tilde;    // effective mechanical capacitance
    double omega_m;      // perturbative peak 1/sqrt(L_m C_m~)
    double r_m_eff;      // R_m + sum of signed branch resistances
    double gamma_m_eff;  // r_m_eff / L_m
    std::vector<BranchLoad> loads;  // parallel to TransducerSystem::sidebands()
    LorentzianFit electrical_fit;
    LorentzianFit optical_fit;
    double c_em = 0.0;   // anti-Stokes EM cooperativity R_EM,+/R_m
    double c_om = 0.0;   // 4 g_OM^2 / (gamma_m0 kappa)
    double g_em = 0.0;   // NaN when the electrical fit is invalid
    double g_om = 0.0;
    std::vector<std::string> warnings;
};

/// Adiabatic elimination of the electrical and optical loops: effective
/// capacitance, per-sideband resistances, Stokes/anti-Stokes rates, and
/// Lorentzian data, all evaluated at w_mQ. Throws AdiabaticityViolatedError
/// only when the effective mechanical linewidth exceeds the smallest
/// eliminated linewidth; a merely marginal separation produces a warning.
ReducedCircuit reduce(const TransducerSystem& sys);

/// Scattering matrix of the reduced single-loop circuit (Fig.-9-style):
/// susceptibilities and port transfers frozen at w_mQ, kinematic 1/Omega
/// factors kept exact. Valid for |Omega - Omega_m| small compared to the
/// eliminated linewidths.
ScatteringMatrix reduced_smatrix(const TransducerSystem& sys,
                                 const ReducedCircuit& rc, double big_omega);

/// Fit of -i w C + 1/Z(w) near omega_guess (exposed for reporting).
LorentzianFit fit_branch_lorentzian(const NodalNetwork& network, double c_couple,
                                    double omega_guess);

}  // namespace eomsim

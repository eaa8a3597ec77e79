#pragma once

#include <optional>

#include "eomsim/si.hpp"

namespace eomsim {

struct MechanicalMode {
    double mass;         // kg
    double omega_m0;     // rad/s, bare resonance
    double gamma_m0;     // rad/s, intrinsic linewidth
    double temperature;  // K
};

enum class BiasKind { DC, AC };

/// Electromechanical interface: mechanically modulated coupling capacitor
/// with a DC or AC charge bias. For AC bias, q_bias is half the physical
/// charge amplitude (the amplitude of each of the e^{+-i w_d t} components).
struct EMCouplingSpec {
    double c_couple;     // steady-state coupling capacitance (F)
    double dC_dx;        // F/m
    double d2C_dx2;      // F/m^2
    BiasKind bias;
    double q_bias;       // C
    double omega_drive;  // rad/s; 0 for DC
};

/// Optomechanical interface: single cavity mode dispersively coupled to the
/// same mechanical coordinate. static_shift is the optically induced shift
/// of the squared mechanical frequency, hbar*|alpha|^2*(d^2 w_cav/dx^2)/m,
/// supplied pre-multiplied (rad^2/s^2).
struct OMCouplingSpec {
    double omega_cav;     // rad/s
    double kappa_int;     // rad/s
    double kappa_ext;     // rad/s
    double omega_laser;   // rad/s
    double coupling_gom;  // G_OM, sqrt(J*Hz)/m
    double theta;         // intracavity drive phase (rad)
    double static_shift;  // rad^2/s^2
    double temperature = 0.0;  // optical bath; vacuum by default
};

/// Element values of the synthesized equivalent circuit.
struct EquivalentBranches {
    double coupling;      // G, V/m
    double l_mech;        // L_m = m / (Cc G)^2
    double r_mech;        // R_m = gamma_m0 L_m
    double c_mech;        // C_m = (Cc G)^2 / (m w_mV^2)
    double c_mech_prime;  // 1/C_m' = 1/C_m - 2/C_opt (identical to C_m without OM)
    double omega_mV;      // fixed-voltage mechanical resonance
    double omega_mQ;      // fixed-charge mechanical resonance
    bool has_optical = false;
    double l_opt = 0.0;
    double c_opt = 0.0;   // optical coupling capacitance
    double r_opt = 0.0;   // kappa L_opt
    double r_int = 0.0;   // kappa_int L_opt
    double z_ext = 0.0;   // kappa_ext L_opt
};

/// Drive-enhanced EM coupling G = -(q_bias / Cc^2) dC/dx, in V/m.
double coupling_strength(const EMCouplingSpec& em);

struct MechFrequencies {
    double omega_mV;
    double omega_mQ;
};

/// Fixed-voltage / fixed-charge mechanical resonance frequencies, including
/// the bias-induced and (optional) optical static shifts. Throws
/// NegativeStiffnessError when the bias destabilizes the mode.
MechFrequencies mechanical_frequencies(const MechanicalMode& mech,
                                       const EMCouplingSpec& em,
                                       const OMCouplingSpec* om = nullptr);

/// Synthesize all equivalent-circuit element values. Throws
/// DecoupledMechanicsError when G = 0 (the branch elements diverge).
/// An OM spec with G_OM = 0 is treated as absent.
EquivalentBranches synthesize_branches(const MechanicalMode& mech,
                                       const EMCouplingSpec& em,
                                       const OMCouplingSpec* om = nullptr);

struct OmRates {
    double g_om;           // rad/s
    double cooperativity;  // C_OM = 4 g_OM^2 / (gamma_m0 kappa)
};

/// g_OM = G_OM / sqrt(4 m w_ref) and the OM cooperativity; w_ref is the
/// mechanical frequency at which the zero-point amplitude is evaluated.
OmRates om_rates(const OMCouplingSpec& om, const MechanicalMode& mech,
                 double omega_ref);

}  // namespace eomsim

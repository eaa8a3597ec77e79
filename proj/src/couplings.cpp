#include "eomsim/couplings.hpp"

#include <cmath>

#include "eomsim/errors.hpp"

namespace eomsim {

double coupling_strength(const EMCouplingSpec& em) {
    return -(em.q_bias / (em.c_couple * em.c_couple)) * em.dC_dx;
}

MechFrequencies mechanical_frequencies(const MechanicalMode& mech,
                                       const EMCouplingSpec& em,
                                       const OMCouplingSpec* om) {
    // <Qc^2(t)>: Qc0^2 for DC, 2 Qc0^2 for an AC bias Qc0 (e^{-iwt}+e^{+iwt}).
    double q_sq_avg = em.q_bias * em.q_bias;
    if (em.bias == BiasKind::AC) q_sq_avg *= 2.0;

    double w_v_sq = mech.omega_m0 * mech.omega_m0 -
                    q_sq_avg / (2.0 * mech.mass * em.c_couple * em.c_couple) *
                        em.d2C_dx2;
    if (om != nullptr) w_v_sq += om->static_shift;
    if (w_v_sq <= 0.0) {
        throw NegativeStiffnessError(
            "bias-induced static shift makes the squared mechanical frequency "
            "non-positive (unstable equilibrium)");
    }

    double g = coupling_strength(em);
    double k = em.bias == BiasKind::AC ? 2.0 : 1.0;  // one coupling capacitor per sideband loop
    double w_q_sq = w_v_sq + k * em.c_couple * g * g / mech.mass;
    return {std::sqrt(w_v_sq), std::sqrt(w_q_sq)};
}

EquivalentBranches synthesize_branches(const MechanicalMode& mech,
                                       const EMCouplingSpec& em,
                                       const OMCouplingSpec* om) {
    double g = coupling_strength(em);
    if (g == 0.0) {
        throw DecoupledMechanicsError(
            "EM coupling G = 0: the mechanical branch elements diverge and the "
            "loop decouples from the circuit");
    }
    if (om != nullptr && om->coupling_gom == 0.0) om = nullptr;

    MechFrequencies freqs = mechanical_frequencies(mech, em, om);

    EquivalentBranches b;
    b.coupling = g;
    double cg = em.c_couple * g;
    b.l_mech = mech.mass / (cg * cg);
    b.r_mech = mech.gamma_m0 * b.l_mech;
    b.c_mech = cg * cg / (mech.mass * freqs.omega_mV * freqs.omega_mV);
    b.omega_mV = freqs.omega_mV;
    b.omega_mQ = freqs.omega_mQ;
    b.c_mech_prime = b.c_mech;

    if (om != nullptr) {
        b.has_optical = true;
        double gom_sq = om->coupling_gom * om->coupling_gom;
        double w_cav = om->omega_cav;
        b.l_opt = gom_sq / (cg * cg * w_cav * w_cav * w_cav);
        b.c_opt = w_cav * cg * cg / gom_sq;
        double kappa = om->kappa_int + om->kappa_ext;
        b.r_opt = kappa * b.l_opt;
        b.r_int = om->kappa_int * b.l_opt;
        b.z_ext = om->kappa_ext * b.l_opt;
        // The optical loops insert 2/C_opt into the mechanical loop; C_m'
        // compensates so the static (fixed-charge) frequency stays w_mQ.
        b.c_mech_prime = 1.0 / (1.0 / b.c_mech - 2.0 / b.c_opt);
    }
    return b;
}

OmRates om_rates(const OMCouplingSpec& om, const MechanicalMode& mech,
                 double omega_ref) {
    double g_om = om.coupling_gom / std::sqrt(4.0 * mech.mass * omega_ref);
    double kappa = om.kappa_int + om.kappa_ext;
    double coop = (mech.gamma_m0 > 0.0 && kappa > 0.0)
                      ? 4.0 * g_om * g_om / (mech.gamma_m0 * kappa)
                      : 0.0;
    return {g_om, coop};
}

}  // namespace eomsim

#include "doctest.h"

#include <cmath>
#include <random>

#include "eomsim/couplings.hpp"
#include "eomsim/errors.hpp"

using namespace eomsim;
using doctest::Approx;

namespace {

// Parameters of the 1 GHz / 1 MHz squeezing example: Q_LC = 100 on a 50 ohm
// line fixes L and the coupling capacitance; G/sqrt(m) = 3.2e11 V/(m sqrt(kg)).
struct SqueezeExample {
    double l = 100.0 * 50.0 / (consts::two_pi * 1e9);
    double c_couple = 1.0 / ((consts::two_pi * 1e9) * (consts::two_pi * 1e9) * l);
    double g_over_sqrt_m = 3.2e11;
    double mass = 1e-12;
    MechanicalMode mech{1e-12, consts::two_pi * 1e6, consts::two_pi * 0.1, 4.0};

    EMCouplingSpec em() const {
        EMCouplingSpec spec;
        spec.c_couple = c_couple;
        spec.dC_dx = -1e-12;
        spec.d2C_dx2 = 0.0;
        spec.bias = BiasKind::AC;
        spec.omega_drive = consts::two_pi * 0.995e9;
        double g = g_over_sqrt_m * std::sqrt(mass);
        spec.q_bias = g * c_couple * c_couple / (-spec.dC_dx);
        return spec;
    }
};

}  // namespace

TEST_SUITE("couplings") {

TEST_CASE("coupling strength arithmetic") {
    EMCouplingSpec em;
    em.c_couple = 3.18e-14;
    em.dC_dx = -1e-9;
    em.d2C_dx2 = 0.0;
    em.bias = BiasKind::DC;
    em.q_bias = 1e-12;
    em.omega_drive = 0.0;

    // Independent arithmetic: G = -Qc0 dCdx / Cc^2, sign flipped by dCdx < 0.
    double expected = 1e-12 * 1e-9 / (3.18e-14 * 3.18e-14);
    CHECK(coupling_strength(em) == Approx(expected).epsilon(1e-14));
    CHECK(coupling_strength(em) == Approx(9.88885e5).epsilon(1e-4));
    CHECK(coupling_strength(em) > 0.0);

    SUBCASE("no modulation, no coupling") {
        em.dC_dx = 0.0;
        CHECK(coupling_strength(em) == 0.0);
    }
    SUBCASE("linear in the bias charge") {
        double g1 = coupling_strength(em);
        em.q_bias *= 2.0;
        CHECK(coupling_strength(em) == Approx(2.0 * g1).epsilon(1e-14));
    }
}

TEST_CASE("mechanical frequencies") {
    SqueezeExample ex;
    EMCouplingSpec em = ex.em();

    SUBCASE("no curvature, no optics: omega_mV = omega_m0") {
        MechFrequencies f = mechanical_frequencies(ex.mech, em);
        CHECK(f.omega_mV == Approx(ex.mech.omega_m0).epsilon(1e-14));
    }

    SUBCASE("AC split: omega_mQ^2 - omega_mV^2 = 2 Cc G^2 / m") {
        MechFrequencies f = mechanical_frequencies(ex.mech, em);
        double split = f.omega_mQ * f.omega_mQ - f.omega_mV * f.omega_mV;
        double expected = 2.0 * ex.c_couple * ex.g_over_sqrt_m * ex.g_over_sqrt_m;
        CHECK(split == Approx(expected).epsilon(1e-10));
        CHECK(split == Approx(6.52e9).epsilon(2e-3));  // ~8e-5 relative shift
        CHECK(f.omega_mQ >= f.omega_mV);
    }

    SUBCASE("DC split has no factor 2") {
        em.bias = BiasKind::DC;
        em.omega_drive = 0.0;
        MechFrequencies f = mechanical_frequencies(ex.mech, em);
        double split = f.omega_mQ * f.omega_mQ - f.omega_mV * f.omega_mV;
        double g = coupling_strength(em);
        CHECK(split == Approx(ex.c_couple * g * g / ex.mech.mass).epsilon(1e-10));
    }

    SUBCASE("G = 0 leaves the frequencies equal") {
        em.dC_dx = 0.0;
        MechFrequencies f = mechanical_frequencies(ex.mech, em);
        CHECK(f.omega_mQ == Approx(f.omega_mV).epsilon(1e-15));
    }

    SUBCASE("bias-induced instability raises NegativeStiffness") {
        em.d2C_dx2 = 1e6;  // huge softening curvature
        CHECK_THROWS_AS(mechanical_frequencies(ex.mech, em), NegativeStiffnessError);
    }

    SUBCASE("curvature shifts omega_mV by <Qc^2>/(2 m Cc^2) d2C/dx2") {
        em.d2C_dx2 = -1e-3;  // stiffening
        MechFrequencies f = mechanical_frequencies(ex.mech, em);
        double q_sq = 2.0 * em.q_bias * em.q_bias;  // AC time average
        double expect = ex.mech.omega_m0 * ex.mech.omega_m0 -
                        q_sq / (2.0 * ex.mech.mass * ex.c_couple * ex.c_couple) *
                            em.d2C_dx2;
        CHECK(f.omega_mV * f.omega_mV == Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("branch synthesis on the squeezing-example numbers") {
    SqueezeExample ex;
    EquivalentBranches b = synthesize_branches(ex.mech, ex.em());

    // Independent arithmetic chain: L_m = 1/(Cc^2 G^2/m).
    double g2_over_m = ex.g_over_sqrt_m * ex.g_over_sqrt_m;
    double l_m_expected = 1.0 / (ex.c_couple * ex.c_couple * g2_over_m);
    CHECK(b.l_mech == Approx(l_m_expected).epsilon(1e-12));
    CHECK(b.l_mech == Approx(9.64e3).epsilon(2e-3));
    CHECK(b.r_mech == Approx(ex.mech.gamma_m0 * l_m_expected).epsilon(1e-12));
    CHECK(b.r_mech == Approx(6.06e3).epsilon(2e-3));
    CHECK(1.0 / (b.l_mech * b.c_mech) ==
          Approx(b.omega_mV * b.omega_mV).epsilon(1e-12));
    CHECK(b.c_mech_prime == b.c_mech);  // no OM spec
    CHECK_FALSE(b.has_optical);
}

TEST_CASE("G = 0 refuses to synthesize") {
    SqueezeExample ex;
    EMCouplingSpec em = ex.em();
    em.dC_dx = 0.0;
    CHECK_THROWS_AS(synthesize_branches(ex.mech, em), DecoupledMechanicsError);
}

TEST_CASE("optical branch values and C_m'") {
    SqueezeExample ex;
    OMCouplingSpec om;
    om.omega_cav = consts::two_pi * 2e14;
    om.kappa_int = consts::two_pi * 0.2e6;
    om.kappa_ext = consts::two_pi * 1.8e6;
    om.omega_laser = om.omega_cav - consts::two_pi * 1e6;
    om.coupling_gom = 5e3;
    om.theta = 0.0;
    om.static_shift = 0.0;

    EquivalentBranches b = synthesize_branches(ex.mech, ex.em(), &om);
    REQUIRE(b.has_optical);
    double cg = ex.c_couple * b.coupling;
    CHECK(b.l_opt == Approx(om.coupling_gom * om.coupling_gom /
                            (cg * cg * std::pow(om.omega_cav, 3)))
                         .epsilon(1e-12));
    // L_opt C_opt resonates at the cavity frequency.
    CHECK(1.0 / std::sqrt(b.l_opt * b.c_opt) == Approx(om.omega_cav).epsilon(1e-12));
    double kappa = om.kappa_int + om.kappa_ext;
    CHECK(b.r_opt == Approx(kappa * b.l_opt).epsilon(1e-12));
    CHECK(b.r_int == Approx(om.kappa_int * b.l_opt).epsilon(1e-12));
    CHECK(b.z_ext == Approx(om.kappa_ext * b.l_opt).epsilon(1e-12));
    CHECK(1.0 / b.c_mech_prime ==
          Approx(1.0 / b.c_mech - 2.0 / b.c_opt).epsilon(1e-12));

    SUBCASE("G_OM = 0 behaves as no optics") {
        om.coupling_gom = 0.0;
        EquivalentBranches b0 = synthesize_branches(ex.mech, ex.em(), &om);
        CHECK_FALSE(b0.has_optical);
        CHECK(b0.c_mech_prime == b0.c_mech);
    }
}

TEST_CASE("om_rates identity and scaling") {
    SqueezeExample ex;
    OMCouplingSpec om;
    om.omega_cav = consts::two_pi * 2e14;
    om.kappa_int = consts::two_pi * 1e6;
    om.kappa_ext = consts::two_pi * 1e6;
    om.omega_laser = om.omega_cav;
    om.coupling_gom = 7.3e3;
    om.theta = 0.0;
    om.static_shift = 0.0;

    double w_ref = consts::two_pi * 1e6;

    SUBCASE("G_OM = 0 gives zero rates") {
        om.coupling_gom = 0.0;
        OmRates r = om_rates(om, ex.mech, w_ref);
        CHECK(r.g_om == 0.0);
        CHECK(r.cooperativity == 0.0);
    }

    SUBCASE("identity g_OM^2 * 4 m w_ref = G_OM^2") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> logu(-3.0, 3.0);
        for (int k = 0; k < 50; ++k) {
            MechanicalMode mech = ex.mech;
            mech.mass = 1e-12 * std::pow(10.0, logu(rng));
            double w = consts::two_pi * 1e6 * std::pow(10.0, logu(rng) / 3.0);
            om.coupling_gom = 1e3 * std::pow(10.0, logu(rng) / 2.0);
            OmRates r = om_rates(om, mech, w);
            CHECK(r.g_om * r.g_om * 4.0 * mech.mass * w ==
                  Approx(om.coupling_gom * om.coupling_gom).epsilon(1e-12));
        }
    }

    SUBCASE("quadrupling the mass halves g_OM") {
        OmRates r1 = om_rates(om, ex.mech, w_ref);
        MechanicalMode heavy = ex.mech;
        heavy.mass *= 4.0;
        OmRates r4 = om_rates(om, heavy, w_ref);
        CHECK(r4.g_om == Approx(0.5 * r1.g_om).epsilon(1e-14));
    }
}

TEST_CASE("canonical scaling: both Hamiltonian forms agree on random states") {
    // dQ_m = Cc G dx and phi_m = p/(Cc G) must map
    //   p^2/2m + (1/2) m w_mQ^2 dx^2
    // onto phi^2/(2 L_m) + dQ_m^2/2 (1/C_m + 1/Cc) exactly (DC, fixed charge).
    SqueezeExample ex;
    EMCouplingSpec em = ex.em();
    em.bias = BiasKind::DC;  // single coupling capacitor in the loop
    em.omega_drive = 0.0;
    EquivalentBranches b = synthesize_branches(ex.mech, em);
    double cg = ex.c_couple * b.coupling;

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        double dx = 1e-12 * u(rng);
        double p = 1e-18 * u(rng);
        double dq_m = cg * dx;
        double phi_m = p / cg;

        double mech_side = p * p / (2.0 * ex.mech.mass) +
                           0.5 * ex.mech.mass * b.omega_mQ * b.omega_mQ * dx * dx;
        double circuit_side =
            phi_m * phi_m / (2.0 * b.l_mech) +
            0.5 * dq_m * dq_m * (1.0 / b.c_mech + 1.0 / ex.c_couple);
        CHECK(std::abs(circuit_side - mech_side) <= 1e-12 * std::abs(mech_side));
    }
}

TEST_CASE("mechanical Johnson source reproduces the classical force spectrum") {
    // <V*V> = R_m kB T_m / 2 per unit bandwidth in the classical limit;
    // mapping F = 2 G Cc V_m must give <F*F> = 2 m gamma_m0 kB T_m.
    SqueezeExample ex;
    EquivalentBranches b = synthesize_branches(ex.mech, ex.em());
    double s_v_classical = b.r_mech * consts::k_B * ex.mech.temperature / 2.0;
    double mapped = 4.0 * b.coupling * b.coupling * ex.c_couple * ex.c_couple *
                    s_v_classical;
    double expected = 2.0 * ex.mech.mass * ex.mech.gamma_m0 * consts::k_B *
                      ex.mech.temperature;
    CHECK(mapped == Approx(expected).epsilon(1e-10));
}

}  // TEST_SUITE

#include "doctest.h"

#include <random>

#include "eomsim/errors.hpp"
#include "fixtures.hpp"

using namespace eomsim;
using doctest::Approx;

namespace {

cplx zc(double w, double c) { return 1.0 / (-im_unit * w * c); }

// The serial-RLC electrical susceptibility in closed form:
// Q_e,+-(W) = -w_LC^2 / (w_LC^2 - (w_d +- W)^2 -+ i (w_d +- W) R_tot / L).
cplx q_serial_closed_form(const fixtures::SqueezeLC& ex, int sign, double big_w) {
    double w = ex.omega_drive + sign * big_w;
    double r_tot = ex.z_tx;  // overcoupled: R_LC = 0
    cplx den = ex.omega_lc * ex.omega_lc - w * w -
               static_cast<double>(sign) * im_unit * w * r_tot / ex.l;
    return -(ex.omega_lc * ex.omega_lc) / den;
}

}  // namespace

TEST_SUITE("equivcircuit") {

TEST_CASE("susceptibility closed form and the -iQ_LC anchor") {
    // Red-detuned drive with the upper sideband exactly at the LC resonance:
    // the upper susceptibility is -i Q_LC there.
    fixtures::SqueezeLC ex;
    double probe = ex.omega_lc - ex.omega_drive;  // 2 pi x 5 MHz
    TransducerSystem sys = ex.system();

    BranchState up = sys.branch_state(0, probe);
    CHECK(std::abs(up.q_s - cplx(0.0, -ex.q_lc)) <= 1e-6 * ex.q_lc);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> freq(0.2, 1.8);
    for (int k = 0; k < 25; ++k) {
        double w = freq(rng) * consts::two_pi * 1e6;
        for (size_t b : {size_t(0), size_t(1)}) {
            BranchState st = sys.branch_state(b, w);
            cplx expect = q_serial_closed_form(ex, b == 0 ? +1 : -1, w);
            CHECK(std::abs(st.q_s - expect) <= 1e-10 * std::abs(expect));
        }
    }
}

TEST_CASE("susceptibility open/short limits") {
    double w = consts::two_pi * 1e6;
    double c = 1e-12;
    CHECK(std::abs(sideband_susceptibility(cplx(1e30, 0.0), w, c)) < 1e-12);
    CHECK(std::abs(sideband_susceptibility(cplx(0.0, 0.0), w, c) - cplx(-1.0)) <
          1e-15);
}

TEST_CASE("sideband transform rules") {
    fixtures::SqueezeLC ex;
    TransducerSystem sys = ex.system();

    SUBCASE("lower sideband flips resistances, keeps reactances") {
        for (double w : {0.3e6, 1.0e6, 3.0e6}) {
            BranchState lo = sys.branch_state(1, consts::two_pi * w);
            CHECK(lo.z_s.real() <= 0.0);  // negative resistance
            CHECK(lo.z_s.imag() <= 0.0);  // still inductive below resonance
        }
    }

    SUBCASE("a physical capacitor keeps 1/(-iWC) on both sidebands") {
        double c_phys = 2e-12;
        Netlist net = parse_netlist("Cpar 1 0 " + fixtures::num(c_phys) +
                                    "\n.couple 1 0\n");
        TransducerSystem csys(std::move(net), ex.mech(), ex.em(), std::nullopt, {});
        for (double w : {0.2e6, 1.1e6}) {
            double big_w = consts::two_pi * w;
            cplx expect = zc(big_w, c_phys);
            for (size_t b : {size_t(0), size_t(1)}) {
                BranchState st = csys.branch_state(b, big_w);
                CHECK(std::abs(st.z_s - expect) <= 1e-12 * std::abs(expect));
            }
        }
    }
}

TEST_CASE("loaded impedance: two-term closed form and conjugation symmetry") {
    fixtures::SqueezeLC ex;
    TransducerSystem sys = ex.system();
    const EquivalentBranches& el = sys.elements();

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> freq(0.2e6, 3e6);
    for (int k = 0; k < 20; ++k) {
        double w = consts::two_pi * freq(rng);

        // Independent evaluation of dZ = sum_s (1 + Q_s)/(-i W Cc) with the
        // closed-form susceptibilities.
        cplx dz_expected = (2.0 + q_serial_closed_form(ex, +1, w) +
                            q_serial_closed_form(ex, -1, w)) *
                           zc(w, ex.c_couple);
        cplx dz = sys.delta_impedance(w);
        CHECK(std::abs(dz - dz_expected) <= 1e-12 * std::abs(dz_expected));

        cplx z_m = -im_unit * w * el.l_mech + el.r_mech + zc(w, el.c_mech);
        cplx z_eff = sys.loaded_impedance(w);
        CHECK(std::abs(z_eff - (z_m + dz)) <= 1e-12 * std::abs(z_eff));

        // Conjugation symmetry Z*_m,eff(W) = Z_m,eff(-W).
        cplx z_neg = sys.loaded_impedance(-w);
        CHECK(std::abs(z_neg - std::conj(z_eff)) <= 1e-12 * std::abs(z_eff));
    }
}

TEST_CASE("peak frequency: open branches give exactly omega_mQ") {
    // A vanishing capacitor across the terminals makes both sideband branch
    // impedances astronomically large; the couplings are then effectively
    // off and the loop resonates at the fixed-charge frequency.
    fixtures::SqueezeLC ex;
    Netlist net = parse_netlist("Cpar 1 0 1e-26\n.couple 1 0\n");
    TransducerSystem sys(std::move(net), ex.mech(), ex.em(), std::nullopt, {});
    const MechanicalPeak& pk = sys.peak();
    CHECK(pk.omega_m == Approx(sys.elements().omega_mQ).epsilon(1e-9));
    CHECK(pk.gamma_m_eff == Approx(ex.mech().gamma_m0).epsilon(1e-9));
    CHECK_FALSE(pk.multiple_roots);
}

TEST_CASE("guard behavior") {
    fixtures::SqueezeLC ex;
    TransducerSystem sys = ex.system();
    CHECK_THROWS_AS(sys.check_guard(0.2 * ex.omega_drive), SidebandOutOfRangeError);
    CHECK_THROWS_AS(sys.check_guard(1.1 * ex.omega_drive), SidebandOutOfRangeError);
    CHECK_THROWS_AS(sys.check_guard(0.0), SidebandOutOfRangeError);
    CHECK_NOTHROW(sys.check_guard(0.05 * ex.omega_drive));

    TransducerOptions opt;
    opt.override_sideband_guard = true;
    TransducerSystem loose = ex.system(opt);
    CHECK_NOTHROW(loose.check_guard(0.2 * ex.omega_drive));
    // Omega >= carrier breaks the decomposition outright, override or not.
    CHECK_THROWS_AS(loose.check_guard(1.1 * ex.omega_drive), SidebandOutOfRangeError);
}

TEST_CASE("loop solve: composition equals the dense KVL solve") {
    fixtures::Transducer ex;
    TransducerSystem sys = ex.system();
    const size_t nb = sys.sidebands().size();
    REQUIRE(nb == 4);

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.8, 1.2);
    for (int k = 0; k < 40; ++k) {
        double w = ex.omega_mq * freq(rng);
        cplx v_m2(u(rng), u(rng));
        std::vector<cplx> v_s(nb);
        for (auto& v : v_s) v = cplx(u(rng), u(rng));

        LoopSolution a = sys.solve_loops(w, v_m2, v_s);
        LoopSolution b = sys.solve_loops_dense(w, v_m2, v_s);
        CHECK(a.residual < 1e-10);
        CHECK(b.residual < 1e-10);
        double scale = std::abs(b.i_mech) + 1e-300;
        CHECK(std::abs(a.i_mech - b.i_mech) <= 1e-10 * scale);
        for (size_t s = 0; s < nb; ++s) {
            double sscale = std::abs(b.i_branch[s]) + 1e-300;
            CHECK(std::abs(a.i_branch[s] - b.i_branch[s]) <= 1e-10 * sscale);
        }
    }
}

TEST_CASE("sideband currents reproduce the serial-circuit closed form") {
    // I_e,+- = Q_+-[Q_+-/Z_m,eff + i W Cc]V_+- + Q_+ Q_-/Z_m,eff V_-+
    //          + Q_+-/Z_m,eff 2V_m.
    fixtures::SqueezeLC ex;
    TransducerSystem sys = ex.system();

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.3e6, 2.5e6);
    for (int k = 0; k < 20; ++k) {
        double w = consts::two_pi * freq(rng);
        cplx v_m(u(rng), u(rng));
        cplx v_p(u(rng), u(rng));
        cplx v_l(u(rng), u(rng));

        LoopSolution sol = sys.solve_loops(w, 2.0 * v_m, std::vector<cplx>{v_p, v_l});

        cplx qp = q_serial_closed_form(ex, +1, w);
        cplx ql = q_serial_closed_form(ex, -1, w);
        cplx z_eff = sys.loaded_impedance(w);
        cplx i_p_expect = qp * (qp / z_eff + im_unit * w * ex.c_couple) * v_p +
                          qp * ql / z_eff * v_l + qp / z_eff * 2.0 * v_m;
        cplx i_l_expect = ql * (ql / z_eff + im_unit * w * ex.c_couple) * v_l +
                          qp * ql / z_eff * v_p + ql / z_eff * 2.0 * v_m;
        CHECK(std::abs(sol.i_branch[0] - i_p_expect) <=
              1e-10 * std::abs(i_p_expect));
        CHECK(std::abs(sol.i_branch[1] - i_l_expect) <=
              1e-10 * std::abs(i_l_expect));
    }
}

TEST_CASE("mechanical response falls off a resonance like a Lorentzian tail") {
    fixtures::Transducer ex;
    TransducerSystem sys = ex.system();
    const MechanicalPeak& pk = sys.peak();

    std::vector<cplx> no_inputs(sys.sidebands().size(), cplx(0.0));
    cplx i_peak = sys.solve_loops(pk.omega_m, cplx(2.0), no_inputs).i_mech;
    double far = pk.omega_m + 100.0 * pk.gamma_m_eff;
    cplx i_far = sys.solve_loops(far, cplx(2.0), no_inputs).i_mech;
    // 100 linewidths out the response must be down by more than 40 dB.
    CHECK(std::abs(i_far) < 1e-2 * std::abs(i_peak));
}

TEST_CASE("mechanical-source-only back-action checks against the dense solve") {
    fixtures::Transducer ex;
    TransducerSystem sys = ex.system();
    const size_t nb = sys.sidebands().size();
    std::vector<cplx> v_s(nb, cplx(0.0));

    for (double f : {0.97, 1.0, 1.03}) {
        double w = ex.omega_mq * f;
        LoopSolution a = sys.solve_loops(w, cplx(2.0), v_s);
        LoopSolution b = sys.solve_loops_dense(w, cplx(2.0), v_s);
        for (size_t s = 0; s < nb; ++s) {
            BranchState st = sys.branch_state(s, w);
            // With no branch sources, I_s = Q_s I_m.
            CHECK(std::abs(a.i_branch[s] - st.q_s * a.i_mech) <=
                  1e-12 * std::abs(a.i_branch[s]));
            CHECK(std::abs(a.i_branch[s] - b.i_branch[s]) <=
                  1e-10 * (std::abs(b.i_branch[s]) + 1e-300));
        }
    }
}

TEST_CASE("transducer peak sits near omega_mQ with a small red spring shift") {
    fixtures::Transducer ex;
    TransducerSystem sys = ex.system();
    const MechanicalPeak& pk = sys.peak();
    CHECK(pk.omega_m < ex.omega_mq);
    CHECK(pk.omega_m == Approx(ex.omega_mq).epsilon(1e-3));
    CHECK(pk.r_m_eff > sys.elements().r_mech);
}

}  // TEST_SUITE

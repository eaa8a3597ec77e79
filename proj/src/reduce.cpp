#include "eomsim/reduce.hpp"

#include <cmath>
#include <limits>

#include "eomsim/errors.hpp"

namespace eomsim {

namespace {

cplx cap_impedance(double w, double c) { return 1.0 / (-im_unit * w * c); }

cplx total_admittance(const NodalNetwork& network, double c_couple, double w) {
    return -im_unit * w * c_couple + 1.0 / network.response(w).z_thev;
}

cplx lorentzian(double omega, double omega_res, double linewidth) {
    return (0.5 * linewidth) / (-im_unit * (omega - omega_res) + 0.5 * linewidth);
}

}  // namespace

LorentzianFit fit_branch_lorentzian(const NodalNetwork& network, double c_couple,
                                    double omega_guess) {
    LorentzianFit fit;
    auto im_y = [&](double w) { return std::imag(total_admittance(network, c_couple, w)); };

    // Bracket the resonance root of Im[Y_tot] around the carrier.
    const int kScan = 256;
    double lo = 0.5 * omega_guess, hi = 1.5 * omega_guess;
    double prev_w = lo, prev_f;
    try {
        prev_f = im_y(lo);
    } catch (const SingularNetworkError&) {
        return fit;
    }
    double root = 0.0;
    bool found = false;
    for (int i = 1; i <= kScan && !found; ++i) {
        double w = lo + (hi - lo) * static_cast<double>(i) / kScan;
        double f;
        try {
            f = im_y(w);
        } catch (const SingularNetworkError&) {
            return fit;
        }
        if (std::isfinite(prev_f) && std::isfinite(f) && (prev_f < 0.0) != (f < 0.0)) {
            // Bisection is plenty here; the fit only feeds reporting.
            double a = prev_w, b = w, fa = prev_f;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (a + b);
                double fm = im_y(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            root = 0.5 * (a + b);
            found = true;
        }
        prev_w = w;
        prev_f = f;
    }
    if (!found) return fit;

    double g_res = std::real(total_admittance(network, c_couple, root));
    double dw = 1e-7 * root;
    double slope = (im_y(root + dw) - im_y(root - dw)) / (2.0 * dw);
    if (!(g_res > 0.0) || !(std::abs(slope) > 0.0)) return fit;

    fit.valid = true;
    fit.omega_res = root;
    fit.linewidth = 2.0 * g_res / std::abs(slope);
    fit.q_factor = root / fit.linewidth;
    return fit;
}

ReducedCircuit reduce(const TransducerSystem& sys) {
    const EquivalentBranches& el = sys.elements();
    const auto& sidebands = sys.sidebands();
    const double w_eval = el.omega_mQ;

    ReducedCircuit rc;
    rc.eval_omega = w_eval;
    rc.loads.resize(sidebands.size());

    double inv_c_tilde = 1.0 / el.c_mech_prime;
    double r_signed_sum = 0.0;

    for (size_t s = 0; s < sidebands.size(); ++s) {
        BranchState st = sys.branch_state(s, w_eval);
        cplx load = (1.0 + st.q_s) * cap_impedance(w_eval, sidebands[s].c_couple);
        inv_c_tilde += (1.0 + std::real(st.q_s)) / sidebands[s].c_couple;
        double r_contrib = std::real(load);
        r_signed_sum += r_contrib;
        rc.loads[s].resistance = static_cast<double>(sidebands[s].sign) * r_contrib;
        rc.loads[s].rate = rc.loads[s].resistance / el.l_mech;
    }

    if (!(inv_c_tilde > 0.0)) {
        throw NoRootError(
            "effective mechanical capacitance is non-positive; the reduced "
            "circuit has no resonance (beyond normal-mode splitting?)");
    }
    rc.c_m_tilde = 1.0 / inv_c_tilde;
    rc.omega_m = 1.0 / std::sqrt(el.l_mech * rc.c_m_tilde);
    rc.r_m_eff = el.r_mech + r_signed_sum;
    rc.gamma_m_eff = rc.r_m_eff / el.l_mech;

    // Lorentzian labels: exact for the single optical mode, fitted for the
    // electrical branch; a structured Z(w) simply leaves them absent.
    if (sys.om_spec()) {
        const OMCouplingSpec& om = *sys.om_spec();
        double kappa = om.kappa_int + om.kappa_ext;
        rc.optical_fit.valid = true;
        rc.optical_fit.omega_res = om.omega_cav;
        rc.optical_fit.linewidth = kappa;
        rc.optical_fit.q_factor = om.omega_cav / kappa;
        OmRates rates = om_rates(om, sys.mechanics(), w_eval);
        rc.c_om = rates.cooperativity;
        rc.g_om = rates.g_om;
    }
    rc.electrical_fit = fit_branch_lorentzian(
        sys.electrical_network(), sys.em_spec().c_couple,
        sidebands.front().baseband ? w_eval : sidebands.front().carrier);

    for (size_t s = 0; s < sidebands.size(); ++s) {
        const SidebandBranch& br = sidebands[s];
        const LorentzianFit& fit =
            br.subsystem == Subsystem::Optical ? rc.optical_fit : rc.electrical_fit;
        if (!fit.valid || br.baseband) continue;
        cplx lor = lorentzian(br.carrier + br.sign * w_eval, fit.omega_res,
                              fit.linewidth);
        rc.loads[s].lorentz_strength = std::abs(lor);
        rc.loads[s].lorentz_phase = std::arg(lor);
        // The Lorentzian label only applies where it reproduces the general
        // resistance; strongly structured baths fail this check.
        double r_lorentz = fit.q_factor / (w_eval * br.c_couple) *
                           std::norm(lor);
        rc.loads[s].lorentzian_valid =
            rc.loads[s].resistance > 0.0 &&
            std::abs(r_lorentz - rc.loads[s].resistance) <=
                0.2 * rc.loads[s].resistance;
    }

    // EM cooperativity from the anti-Stokes resistance; g_EM only where the
    // electrical bath is Lorentzian.
    size_t em_upper = 0;  // electrical branches come first, upper first
    rc.c_em = rc.loads[em_upper].resistance / el.r_mech;
    rc.g_em = std::numeric_limits<double>::quiet_NaN();
    if (rc.electrical_fit.valid) {
        rc.g_em = 0.5 * std::sqrt(rc.c_em * rc.electrical_fit.linewidth *
                                  sys.mechanics().gamma_m0);
    }

    double min_linewidth = std::numeric_limits<double>::infinity();
    if (rc.electrical_fit.valid) min_linewidth = rc.electrical_fit.linewidth;
    if (rc.optical_fit.valid)
        min_linewidth = std::min(min_linewidth, rc.optical_fit.linewidth);
    if (std::isfinite(min_linewidth)) {
        if (rc.gamma_m_eff > min_linewidth) {
            throw AdiabaticityViolatedError(
                "effective mechanical linewidth exceeds an eliminated "
                "subsystem linewidth; adiabatic elimination is invalid");
        }
        if (rc.gamma_m_eff > 0.1 * min_linewidth) {
            rc.warnings.push_back(
                "effective mechanical linewidth is not small compared to the "
                "eliminated linewidths; reduced-circuit accuracy degrades");
        }
    } else {
        rc.warnings.push_back(
            "no Lorentzian resonance identified for the eliminated branches; "
            "adiabaticity could not be checked");
    }
    return rc;
}

ScatteringMatrix reduced_smatrix(const TransducerSystem& sys,
                                 const ReducedCircuit& rc, double big_omega) {
    sys.check_guard(big_omega);
    const EquivalentBranches& el = sys.elements();
    const auto& sidebands = sys.sidebands();
    const size_t nb = sidebands.size();

    ScatteringMatrix sm;
    sm.omega = big_omega;
    sm.channels = scattering_channels(sys);
    const size_t n = sm.channels.size();
    sm.classical.resize(n, n);

    // Branch data frozen at the elimination frequency.
    std::vector<BranchState> frozen;
    frozen.reserve(nb);
    for (size_t s = 0; s < nb; ++s) frozen.push_back(sys.branch_state(s, rc.eval_omega));

    cplx z_red = -im_unit * big_omega * el.l_mech +
                 cap_impedance(big_omega, rc.c_m_tilde) + rc.r_m_eff;

    for (size_t jc = 0; jc < n; ++jc) {
        const PortChannel& in = sm.channels[jc];
        cplx v_mech2 = in.mechanical ? cplx(2.0) : cplx(0.0);
        std::vector<cplx> v_branch(nb, cplx(0.0));
        if (!in.mechanical) v_branch[in.branch] = frozen[in.branch].h[in.port] * 2.0;

        cplx drive = v_mech2;
        for (size_t s = 0; s < nb; ++s) drive += frozen[s].q_s * v_branch[s];
        cplx i_mech = drive / z_red;

        for (size_t ic = 0; ic < n; ++ic) {
            const PortChannel& outc = sm.channels[ic];
            cplx v_in_direct = (ic == jc) ? cplx(1.0) : cplx(0.0);
            cplx v_out;
            if (outc.mechanical) {
                v_out = v_in_direct - el.r_mech * i_mech;
            } else {
                size_t s = static_cast<size_t>(outc.branch);
                const BranchState& st = frozen[s];
                cplx i_s = im_unit * big_omega * sidebands[s].c_couple * st.q_s *
                               v_branch[s] +
                           st.q_s * i_mech;
                cplx i_lab = static_cast<double>(sidebands[s].sign) *
                             (st.omega_lab / big_omega) * i_s;
                cplx i_port = -st.b[outc.port] * i_lab;
                if (!in.mechanical && in.branch == outc.branch) {
                    i_port += st.a(outc.port, in.port) * 2.0;
                }
                v_out = v_in_direct - outc.impedance * i_port;
            }
            sm.classical(ic, jc) = v_out;
        }
    }

    // Bosonic rescale with frozen sideband lab frequencies (the mechanical
    // channel keeps its exact lab frequency Omega).
    std::vector<double> conv(n);
    for (size_t i = 0; i < n; ++i) {
        const PortChannel& ch = sm.channels[i];
        double w = ch.mechanical ? big_omega : ch.lab_frequency(rc.eval_omega);
        if (!(w > 0.0)) {
            throw NonPositiveLabFrequencyError(
                "channel '" + ch.id + "' has non-positive lab frequency");
        }
        conv[i] = std::sqrt(w * ch.impedance);
    }
    sm.bosonic.resize(n, n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            sm.bosonic(i, j) = sm.classical(i, j) * (conv[j] / conv[i]);
        }
    }
    sm.has_bosonic = true;
    return sm;
}

}  // namespace eomsim

#include "eomsim/scattering.hpp"

#include <cmath>

#include "eomsim/errors.hpp"

namespace eomsim {

std::vector<PortChannel> scattering_channels(const TransducerSystem& sys) {
    std::vector<PortChannel> out;

    PortChannel mech;
    mech.id = "m";
    mech.mechanical = true;
    mech.baseband = true;
    mech.impedance = sys.elements().r_mech;
    mech.temperature = sys.mechanics().temperature;
    out.push_back(mech);

    const auto& sidebands = sys.sidebands();
    // Group by network so each physical port contributes its +/- pair
    // adjacently (electrical loops come before optical ones by construction).
    for (size_t s = 0; s < sidebands.size();) {
        const SidebandBranch& first = sidebands[s];
        size_t group_end = s + 1;
        while (group_end < sidebands.size() &&
               sidebands[group_end].network == first.network) {
            ++group_end;
        }
        const auto& ports = first.network->ports();
        for (size_t p = 0; p < ports.size(); ++p) {
            for (size_t bi = s; bi < group_end; ++bi) {
                const SidebandBranch& br = sidebands[bi];
                PortChannel ch;
                ch.branch = static_cast<int>(bi);
                ch.port = static_cast<int>(p);
                ch.carrier = br.carrier;
                ch.sign = br.sign;
                ch.baseband = br.baseband;
                ch.impedance = ports[p].impedance;
                ch.temperature = ports[p].temperature;
                ch.id = ports[p].id +
                        (br.baseband ? ":0" : (br.sign > 0 ? ":+" : ":-"));
                out.push_back(ch);
            }
        }
        s = group_end;
    }
    return out;
}

size_t channel_index(const std::vector<PortChannel>& channels, const std::string& id) {
    for (size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].id == id) return i;
    }
    throw Error("unknown channel id '" + id + "'");
}

ScatteringMatrix classical_smatrix(const TransducerSystem& sys, double big_omega) {
    sys.check_guard(big_omega);

    ScatteringMatrix sm;
    sm.omega = big_omega;
    sm.channels = scattering_channels(sys);
    const size_t n = sm.channels.size();
    const size_t nb = sys.sidebands().size();
    sm.classical.resize(n, n);

    auto states = sys.branch_states(big_omega);

    for (size_t jc = 0; jc < n; ++jc) {
        const PortChannel& in = sm.channels[jc];
        cplx v_mech2 = in.mechanical ? cplx(2.0) : cplx(0.0);
        std::vector<cplx> v_branch(nb, cplx(0.0));
        if (!in.mechanical) {
            v_branch[in.branch] = states[in.branch].h[in.port] * 2.0;
        }

        LoopSolution sol = sys.solve_loops(states, big_omega, v_mech2, v_branch);

        for (size_t ic = 0; ic < n; ++ic) {
            const PortChannel& outc = sm.channels[ic];
            cplx v_in_direct = (ic == jc) ? cplx(1.0) : cplx(0.0);
            cplx v_out;
            if (outc.mechanical) {
                v_out = v_in_direct - sys.elements().r_mech * sol.i_mech;
            } else {
                const BranchState& st = states[outc.branch];
                const SidebandBranch& br = sys.sidebands()[outc.branch];
                // Lab-frame current drawn by the transducer branch (stored
                // conjugated for lower sidebands, matching the channel basis).
                cplx i_lab = static_cast<double>(br.sign) * (st.omega_lab / big_omega) *
                             sol.i_branch[outc.branch];
                cplx i_port = -st.b[outc.port] * i_lab;
                if (!in.mechanical && in.branch == outc.branch) {
                    i_port += st.a(outc.port, in.port) * 2.0;
                }
                v_out = v_in_direct - outc.impedance * i_port;
            }
            sm.classical(ic, jc) = v_out;
        }
    }
    return sm;
}

void bosonic_smatrix(ScatteringMatrix& sm) {
    const size_t n = sm.channels.size();
    std::vector<double> conv(n);
    for (size_t i = 0; i < n; ++i) {
        double w = sm.channels[i].lab_frequency(sm.omega);
        if (!(w > 0.0)) {
            throw NonPositiveLabFrequencyError(
                "channel '" + sm.channels[i].id +
                "' has non-positive lab frequency; bosonic rescale undefined");
        }
        conv[i] = std::sqrt(w * sm.channels[i].impedance);
    }
    sm.bosonic.resize(n, n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            sm.bosonic(i, j) = sm.classical(i, j) * (conv[j] / conv[i]);
        }
    }
    sm.has_bosonic = true;
}

ScatteringMatrix smatrix(const TransducerSystem& sys, double big_omega) {
    ScatteringMatrix sm = classical_smatrix(sys, big_omega);
    bosonic_smatrix(sm);
    return sm;
}

}  // namespace eomsim

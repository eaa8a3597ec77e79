#include "eomsim/equivcircuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eomsim/errors.hpp"

namespace eomsim {

namespace {

cplx cap_impedance(double big_omega, double c) {
    return 1.0 / (-im_unit * big_omega * c);
}

// Classic Brent root finder; f must have opposite signs at the bracket ends.
template <typename F>
double brent_root(F&& f, double a, double b, double fa, double fb, double xtol) {
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + xtol;
        double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = e = b - a;
        }
    }
    return b;
}

}  // namespace

cplx sideband_susceptibility(cplx z_s, double big_omega, double c_couple) {
    cplx zc = cap_impedance(big_omega, c_couple);
    return -zc / (z_s + zc);
}

Netlist optical_equivalent_netlist(const EquivalentBranches& el,
                                   double optical_temperature) {
    Netlist net;
    net.ground = "o0";
    net.elements.push_back({ElementKind::Inductor, "Lopt", "o1", "o2", el.l_opt, 0.0});
    net.elements.push_back({ElementKind::Resistor, "opt_int", "o2", "o3", el.r_int,
                            optical_temperature});
    net.elements.push_back({ElementKind::Resistor, "opt_ext", "o3", "o0", el.z_ext,
                            optical_temperature});
    net.couple_terminals = {"o1", "o0"};
    return net;
}

TransducerSystem::TransducerSystem(Netlist netlist, MechanicalMode mech,
                                   EMCouplingSpec em,
                                   std::optional<OMCouplingSpec> om,
                                   TransducerOptions options)
    : mech_(mech), em_(em), om_(std::move(om)), options_(options) {
    if (om_ && om_->coupling_gom == 0.0) om_.reset();
    elements_ = synthesize_branches(mech_, em_, om_ ? &*om_ : nullptr);
    electrical_ = std::make_unique<NodalNetwork>(std::move(netlist));

    if (em_.bias == BiasKind::AC) {
        if (em_.omega_drive <= 0.0) {
            throw NonPositiveValueError("AC bias requires omega_drive > 0");
        }
        sidebands_.push_back({Subsystem::Electrical, +1, false, em_.omega_drive,
                              em_.c_couple, electrical_.get()});
        sidebands_.push_back({Subsystem::Electrical, -1, false, em_.omega_drive,
                              em_.c_couple, electrical_.get()});
    } else {
        sidebands_.push_back({Subsystem::Electrical, +1, true, 0.0, em_.c_couple,
                              electrical_.get()});
    }
    if (om_) {
        optical_ = std::make_unique<NodalNetwork>(
            optical_equivalent_netlist(elements_, om_->temperature));
        sidebands_.push_back({Subsystem::Optical, +1, false, om_->omega_laser,
                              elements_.c_opt, optical_.get()});
        sidebands_.push_back({Subsystem::Optical, -1, false, om_->omega_laser,
                              elements_.c_opt, optical_.get()});
    }
}

double TransducerSystem::guard_limit() const {
    double lim = std::numeric_limits<double>::infinity();
    for (const SidebandBranch& s : sidebands_) {
        if (!s.baseband) lim = std::min(lim, options_.sideband_guard_fraction * s.carrier);
    }
    return lim;
}

void TransducerSystem::check_guard(double big_omega) const {
    if (big_omega == 0.0) {
        throw SidebandOutOfRangeError("modulation frequency Omega must be nonzero");
    }
    for (const SidebandBranch& s : sidebands_) {
        if (!s.baseband && std::abs(big_omega) >= s.carrier) {
            throw SidebandOutOfRangeError(
                "modulation frequency exceeds a carrier frequency; the sideband "
                "decomposition does not apply");
        }
    }
    if (!options_.override_sideband_guard && std::abs(big_omega) > guard_limit()) {
        throw SidebandOutOfRangeError(
            "modulation frequency exceeds the slow-mechanics validity guard "
            "(Omega <= " + std::to_string(options_.sideband_guard_fraction) +
            " * carrier); pass the override to proceed anyway");
    }
}

BranchState TransducerSystem::branch_state(size_t index, double big_omega) const {
    const SidebandBranch& s = sidebands_[index];
    BranchState st;
    st.omega_lab = s.lab_frequency(big_omega);
    NetworkResponse resp = s.network->response(st.omega_lab);

    bool conj = s.sign < 0;
    auto cc = [&](cplx z) { return conj ? std::conj(z) : z; };
    st.z_lab = cc(resp.z_thev);
    st.h.resize(resp.source_transfer.size());
    st.b.resize(resp.injection_response.size());
    for (size_t j = 0; j < st.h.size(); ++j) st.h[j] = cc(resp.source_transfer[j]);
    for (size_t j = 0; j < st.b.size(); ++j) st.b[j] = cc(resp.injection_response[j]);
    st.a = conj ? resp.oc_port_currents.conjugate().eval() : resp.oc_port_currents;

    // Upper: Z_s = +(w_lab/W) Z(w_lab); lower: Z_s = -(w_lab/W) Z*(w_lab).
    // Reactances keep their sign, resistances flip on the lower sideband.
    double factor = st.omega_lab / big_omega;
    st.z_s = static_cast<double>(s.sign) * factor * st.z_lab;
    st.q_s = sideband_susceptibility(st.z_s, big_omega, s.c_couple);
    return st;
}

std::vector<BranchState> TransducerSystem::branch_states(double big_omega) const {
    std::vector<BranchState> out;
    out.reserve(sidebands_.size());
    for (size_t i = 0; i < sidebands_.size(); ++i) {
        out.push_back(branch_state(i, big_omega));
    }
    return out;
}

cplx TransducerSystem::mech_impedance(double big_omega) const {
    return -im_unit * big_omega * elements_.l_mech + elements_.r_mech +
           cap_impedance(big_omega, elements_.c_mech_prime);
}

cplx TransducerSystem::delta_impedance(std::span<const BranchState> states,
                                       double big_omega) const {
    cplx sum = 0.0;
    for (size_t i = 0; i < states.size(); ++i) {
        sum += (1.0 + states[i].q_s) * cap_impedance(big_omega, sidebands_[i].c_couple);
    }
    return sum;
}

cplx TransducerSystem::delta_impedance(double big_omega) const {
    auto states = branch_states(big_omega);
    return delta_impedance(states, big_omega);
}

cplx TransducerSystem::loaded_impedance(double big_omega) const {
    return mech_impedance(big_omega) + delta_impedance(big_omega);
}

const MechanicalPeak& TransducerSystem::peak() const {
    std::call_once(peak_once_, [this] {
        double w0 = elements_.omega_mQ;
        double delta = options_.peak_bracket_delta;
        double lo = w0 * (1.0 - delta);
        double hi = std::min(w0 * (1.0 + delta), guard_limit());
        if (options_.override_sideband_guard) hi = w0 * (1.0 + delta);
        for (const SidebandBranch& s : sidebands_) {
            if (!s.baseband) hi = std::min(hi, 0.999 * s.carrier);
        }
        if (!(hi > lo)) {
            throw NoRootError("peak search bracket is empty under the sideband guard");
        }

        auto im_z = [this](double w) { return std::imag(loaded_impedance(w)); };

        const int kScan = 400;
        std::vector<double> roots;
        double prev_w = lo, prev_f = im_z(lo);
        for (int i = 1; i <= kScan; ++i) {
            double w = lo + (hi - lo) * static_cast<double>(i) / kScan;
            double f = im_z(w);
            if (std::isfinite(prev_f) && std::isfinite(f) &&
                ((prev_f < 0.0) != (f < 0.0))) {
                double r = brent_root(im_z, prev_w, w, prev_f, f, 1e-12 * w0);
                // Reject sign changes across branch-resonance poles.
                cplx z = loaded_impedance(r);
                if (std::abs(std::imag(z)) <= 1e-6 * std::abs(z) + 1e-9) {
                    roots.push_back(r);
                }
            }
            prev_w = w;
            prev_f = f;
        }
        if (roots.empty()) {
            throw NoRootError(
                "Im[Z_m,eff] has no zero inside the peak search bracket");
        }
        double best = roots.front();
        for (double r : roots) {
            if (std::abs(r - w0) < std::abs(best - w0)) best = r;
        }
        peak_.omega_m = best;
        peak_.r_m_eff = std::real(loaded_impedance(best));
        peak_.gamma_m_eff = peak_.r_m_eff / elements_.l_mech;
        peak_.roots = roots;
        peak_.multiple_roots = roots.size() > 1;
    });
    return peak_;
}

LoopSolution TransducerSystem::solve_loops(std::span<const BranchState> states,
                                           double big_omega, cplx v_mech2,
                                           std::span<const cplx> v_branch) const {
    const size_t nb = sidebands_.size();
    LoopSolution sol;
    sol.omega = big_omega;
    sol.i_branch.resize(nb);

    cplx z_m_eff = mech_impedance(big_omega) + delta_impedance(states, big_omega);
    cplx drive = v_mech2;
    for (size_t s = 0; s < nb; ++s) drive += states[s].q_s * v_branch[s];
    sol.i_mech = drive / z_m_eff;

    for (size_t s = 0; s < nb; ++s) {
        cplx zc = cap_impedance(big_omega, sidebands_[s].c_couple);
        sol.i_branch[s] = (v_branch[s] - sol.i_mech * zc) / (states[s].z_s + zc);
    }

    // Residual of the assembled KVL system, relative to its largest term.
    double num = 0.0, den = std::abs(v_mech2);
    {
        cplx lhs = mech_impedance(big_omega) * sol.i_mech;
        den = std::max(den, std::abs(lhs));
        for (size_t s = 0; s < nb; ++s) {
            cplx zc = cap_impedance(big_omega, sidebands_[s].c_couple);
            cplx term = (sol.i_mech + sol.i_branch[s]) * zc;
            lhs += term;
            den = std::max(den, std::abs(term));
        }
        num = std::max(num, std::abs(lhs - v_mech2));
        for (size_t s = 0; s < nb; ++s) {
            cplx zc = cap_impedance(big_omega, sidebands_[s].c_couple);
            cplx row = states[s].z_s * sol.i_branch[s] +
                       (sol.i_branch[s] + sol.i_mech) * zc;
            double rden = std::max({std::abs(v_branch[s]),
                                    std::abs(states[s].z_s * sol.i_branch[s]),
                                    std::abs((sol.i_branch[s] + sol.i_mech) * zc)});
            den = std::max(den, rden);
            num = std::max(num, std::abs(row - v_branch[s]));
        }
    }
    sol.residual = den > 0.0 ? num / den : 0.0;
    return sol;
}

LoopSolution TransducerSystem::solve_loops(double big_omega, cplx v_mech2,
                                           std::span<const cplx> v_branch) const {
    auto states = branch_states(big_omega);
    return solve_loops(states, big_omega, v_mech2, v_branch);
}

LoopSolution TransducerSystem::solve_loops_dense(double big_omega, cplx v_mech2,
                                                 std::span<const cplx> v_branch) const {
    auto states = branch_states(big_omega);
    const size_t nb = sidebands_.size();
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(nb + 1, nb + 1);
    Eigen::VectorXcd rhs(nb + 1);

    k(0, 0) = mech_impedance(big_omega);
    for (size_t s = 0; s < nb; ++s) {
        cplx zc = cap_impedance(big_omega, sidebands_[s].c_couple);
        k(0, 0) += zc;
        k(0, s + 1) = zc;
        k(s + 1, 0) = zc;
        k(s + 1, s + 1) = states[s].z_s + zc;
    }
    rhs(0) = v_mech2;
    for (size_t s = 0; s < nb; ++s) rhs(s + 1) = v_branch[s];

    Eigen::VectorXcd x = k.partialPivLu().solve(rhs);
    LoopSolution sol;
    sol.omega = big_omega;
    sol.i_mech = x(0);
    sol.i_branch.assign(x.data() + 1, x.data() + 1 + nb);
    // Row-relative residual: the KVL rows span many decades of impedance.
    sol.residual = 0.0;
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        cplx lhs = 0.0;
        double den = std::abs(rhs(i));
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            cplx term = k(i, j) * x(j);
            lhs += term;
            den = std::max(den, std::abs(term));
        }
        if (den > 0.0) {
            sol.residual = std::max(sol.residual, std::abs(lhs - rhs(i)) / den);
        }
    }
    return sol;
}

}  // namespace eomsim

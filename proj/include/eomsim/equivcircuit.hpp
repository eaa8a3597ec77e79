#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "eomsim/couplings.hpp"
#include "eomsim/network.hpp"

namespace eomsim {

enum class Subsystem { Electrical, Optical };

/// One sideband loop of the equivalent circuit: a coupling capacitor in
/// series with the rotating-frame image of a physical one-port network.
struct SidebandBranch {
    Subsystem subsystem;
    int sign;        // +1 upper, -1 lower
    bool baseband;   // DC bias: carrier = 0, lab frame == rotating frame
    double carrier;  // omega_d or omega_l (rad/s); 0 for baseband
    double c_couple;
    const NodalNetwork* network;  // non-owning

    double lab_frequency(double big_omega) const {
        return baseband ? big_omega : carrier + sign * big_omega;
    }
};

/// Per-branch quantities at one modulation frequency. For lower sidebands
/// all lab-frame responses are stored conjugated, so that downstream
/// assembly is sign-uniform; the stored values are then the coefficients of
/// the conjugated field amplitudes V*(w_c - Omega).
struct BranchState {
    double omega_lab;
    cplx z_lab;                    // (conjugated) Thevenin impedance
    std::vector<cplx> h;           // (conjugated) source transfers
    std::vector<cplx> b;           // (conjugated) injection responses
    Eigen::MatrixXcd a;            // (conjugated) open-circuit port currents
    cplx z_s;                      // rotating-frame sideband impedance
    cplx q_s;                      // susceptibility
};

struct MechanicalPeak {
    double omega_m;      // root of Im[Z_m,eff] nearest omega_mQ
    double r_m_eff;      // Re[Z_m,eff(omega_m)]
    double gamma_m_eff;  // r_m_eff / L_m
    std::vector<double> roots;  // all roots found in the bracket
    bool multiple_roots = false;
};

struct LoopSolution {
    double omega;               // modulation frequency
    cplx i_mech;
    std::vector<cplx> i_branch;  // rotating-frame sideband loop currents
    double residual;             // relative KVL residual
};

/// Dimensionless rotating-frame response of a sideband branch seen through
/// its coupling capacitor: Q_s = -[1/(-iwC)] / [Z_s + 1/(-iwC)].
cplx sideband_susceptibility(cplx z_s, double big_omega, double c_couple);

struct TransducerOptions {
    double sideband_guard_fraction = 0.1;
    bool override_sideband_guard = false;
    double peak_bracket_delta = 0.2;
};

/// The assembled electro-optomechanical equivalent circuit: mechanical loop
/// plus electrical and (optional) optical sideband loops. All per-Omega
/// member functions are pure; the peak is computed once and cached.
class TransducerSystem {
public:
    TransducerSystem(Netlist netlist, MechanicalMode mech, EMCouplingSpec em,
                     std::optional<OMCouplingSpec> om = std::nullopt,
                     TransducerOptions options = {});

    const EquivalentBranches& elements() const { return elements_; }
    const std::vector<SidebandBranch>& sidebands() const { return sidebands_; }
    const NodalNetwork& electrical_network() const { return *electrical_; }
    const NodalNetwork* optical_network() const { return optical_.get(); }
    const MechanicalMode& mechanics() const { return mech_; }
    const EMCouplingSpec& em_spec() const { return em_; }
    const std::optional<OMCouplingSpec>& om_spec() const { return om_; }
    const TransducerOptions& options() const { return options_; }

    /// Largest modulation frequency admitted by the sideband validity guard.
    double guard_limit() const;
    void check_guard(double big_omega) const;

    BranchState branch_state(size_t index, double big_omega) const;
    std::vector<BranchState> branch_states(double big_omega) const;

    /// Bare mechanical loop impedance Z_m' (no coupling capacitors).
    cplx mech_impedance(double big_omega) const;
    /// Load of all sideband loops seen from the mechanical loop.
    cplx delta_impedance(double big_omega) const;
    cplx delta_impedance(std::span<const BranchState> states, double big_omega) const;
    /// Z_m,eff = Z_m' + delta Z.
    cplx loaded_impedance(double big_omega) const;

    /// Effective mechanical peak: Im[Z_m,eff(Omega_m)] = 0 by bracketed root
    /// search around omega_mQ. Cached after the first call.
    const MechanicalPeak& peak() const;

    /// Loop currents for given rotating-frame sources: v_mech2 is the full
    /// mechanical source 2V_m; v_branch[s] is V_s for each sideband branch.
    LoopSolution solve_loops(double big_omega, cplx v_mech2,
                             std::span<const cplx> v_branch) const;
    LoopSolution solve_loops(std::span<const BranchState> states, double big_omega,
                             cplx v_mech2, std::span<const cplx> v_branch) const;

    /// Same equations as one dense linear solve; verification path.
    LoopSolution solve_loops_dense(double big_omega, cplx v_mech2,
                                   std::span<const cplx> v_branch) const;

private:
    std::unique_ptr<NodalNetwork> electrical_;
    std::unique_ptr<NodalNetwork> optical_;
    MechanicalMode mech_;
    EMCouplingSpec em_;
    std::optional<OMCouplingSpec> om_;
    TransducerOptions options_;
    EquivalentBranches elements_;
    std::vector<SidebandBranch> sidebands_;

    mutable std::once_flag peak_once_;
    mutable MechanicalPeak peak_;
};

/// Build the internal serial L-R-R representation of a single cavity mode
/// with two decay channels (ports "opt_int", "opt_ext").
Netlist optical_equivalent_netlist(const EquivalentBranches& elements,
                                   double optical_temperature);

}  // namespace eomsim

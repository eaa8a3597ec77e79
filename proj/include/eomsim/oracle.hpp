#pragma once

#include <optional>
#include <string>

#include "eomsim/couplings.hpp"
#include "eomsim/network.hpp"

namespace eomsim {

struct ProbeSettings {
    double duration;                 // total integration time (s)
    double dt;                       // base step; must resolve omega_max
    double discard_fraction = 0.5;   // transient discard before demodulation
    bool richardson = true;          // second run at 2*dt, h^2 extrapolation
    bool check_convergence = true;   // compare the two halves of the window
    double convergence_tol = 1e-3;
    double instability_bound = 1e9;  // state-norm blowup threshold (per unit drive)
};

/// Brute-force time-domain integrator of the linearized coupled equations:
/// mechanics (x, p), the physical circuit state variables (node voltages,
/// inductor currents, coupling-capacitor charge), and, when present, the
/// optical quadratures (X, P). For AC bias the true time-periodic coupling
/// 2G cos(w_d t) and the 2 w_d stiffness ripple are integrated without any
/// sideband decomposition, so agreement with the frequency-domain solver
/// independently validates the slow-mechanics approximation. Deterministic
/// probes only; the integrator is implicit midpoint (A-stable, second order,
/// preserves quadratic invariants of time-invariant lossless systems).
class TimeDomainOracle {
public:
    TimeDomainOracle(const Netlist& netlist, MechanicalMode mech, EMCouplingSpec em,
                     std::optional<OMCouplingSpec> om = std::nullopt);

    /// Complex transfer from a unit sinusoidal drive V_in = cos(w_probe t)
    /// at drive_port to the outgoing wave at response_port, by Hann-windowed
    /// quadrature demodulation after transient discard. response_port may be
    /// "x" to read the mechanical displacement instead (m/V).
    /// Throws NotConvergedError / UnstableSystemError.
    cplx probe_transfer(const std::string& drive_port,
                        const std::string& response_port, double omega_probe,
                        const ProbeSettings& settings) const;

    /// Free evolution from a deterministic initial condition with all drives
    /// off; returns the maximum relative energy drift over the run. Only
    /// meaningful for DC bias with lossless circuits and gamma_m0 = 0.
    double free_energy_drift(double x0, double p0, double qc0, int steps,
                             double dt) const;

    int state_dimension() const { return dim_; }

private:
    struct Entry {
        int row;
        int col;
        double value;
    };

    void assemble();
    Eigen::MatrixXd system_matrix(double t) const;  // A(t)
    double drive_carrier() const;

    NodalNetwork network_;
    MechanicalMode mech_;
    EMCouplingSpec em_;
    std::optional<OMCouplingSpec> om_;

    int dim_ = 0;
    int idx_qc_ = 0, idx_x_ = 0, idx_p_ = 0, idx_oX_ = -1, idx_oP_ = -1;
    std::vector<int> inductor_index_;  // per compiled element, -1 if not L

    Eigen::MatrixXd mass_;     // M in M y' = A(t) y + f(t)
    Eigen::MatrixXd a_const_;
    std::vector<Entry> a_cos_wd_;   // entries multiplied by cos(w_d t)
    std::vector<Entry> a_cos_2wd_;  // entries multiplied by cos(2 w_d t)
    std::vector<Entry> a_cos_wl_;   // entries multiplied by cos(w_l t)
    double stiffness_avg_ = 0.0;    // time-averaged squared mech frequency
};

}  // namespace eomsim

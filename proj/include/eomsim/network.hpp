#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eomsim/netlist.hpp"
#include "eomsim/si.hpp"

namespace eomsim {

enum class PortOrigin { TransmissionLine, ResistorMapped };

struct PortInfo {
    std::string id;       // element name
    double impedance;     // Z_tx (real, > 0)
    double temperature;   // kelvin
    PortOrigin origin;
};

/// Full linear response of the circuit at one lab-frame frequency.
///
/// Conventions (fixed throughout):
///  - Fourier sign e^{-i w t}; inductor impedance -iwL, capacitor 1/(-iwC).
///  - Each port j is a characteristic impedance Z_tx,j in series with a
///    source of amplitude 2V_in,j whose + terminal faces the element's
///    first node.
///  - Port currents are oriented INTO the circuit at the element's first
///    node, so that V_port = -Z_tx I + 2V_in holds.
///  - source_transfer[j]  (H_j): open-circuit voltage across the coupling
///    terminals per unit 2V_in,j.
///  - injection_response[i] (B_i): port-i current per unit current injected
///    into couple_a (returned at couple_b) with all sources off.
///  - oc_port_currents(i,j) (A_ij): port-i current per unit 2V_in,j with
///    the coupling terminals open. Reciprocity: A_ij = A_ji.
struct NetworkResponse {
    double omega = 0.0;
    cplx z_thev;
    std::vector<cplx> source_transfer;
    std::vector<cplx> injection_response;
    Eigen::MatrixXcd oc_port_currents;
};

/// A netlist compiled for repeated frequency-domain solves. Immutable after
/// construction; response() is a pure function of omega, so concurrent
/// sweeps need no synchronization.
class NodalNetwork {
public:
    explicit NodalNetwork(Netlist net);

    /// Element with ideal wires collapsed and nodes renumbered; index -1 is
    /// the reference node.
    struct CompiledElement {
        ElementKind kind;
        int a;
        int b;
        double value;
        int port = -1;  // index into ports(), or -1
    };

    const Netlist& netlist() const { return net_; }
    const std::vector<PortInfo>& ports() const { return ports_; }
    const std::vector<CompiledElement>& compiled_elements() const { return elements_; }
    int couple_node_a() const { return couple_a_; }
    int couple_node_b() const { return couple_b_; }

    NetworkResponse response(double omega) const;

    /// Node voltages (internal node indexing; reference node eliminated)
    /// for the given source amplitudes (one 2V_in per port) and a current
    /// injected into couple_a / out of couple_b. Exposed for superposition
    /// and oracle-style checks.
    Eigen::VectorXcd solve(double omega, std::span<const cplx> source_2vin,
                           cplx injected_current) const;

    cplx couple_voltage(const Eigen::VectorXcd& v) const;
    cplx port_current(const Eigen::VectorXcd& v, size_t port, cplx source_2vin) const;

    int node_count() const { return static_cast<int>(node_names_.size()); }

private:
    Eigen::MatrixXcd admittance(double omega) const;

    Netlist net_;
    std::vector<std::string> node_names_;      // internal index -> representative name
    std::vector<CompiledElement> elements_;    // wires (R=0) removed
    std::vector<PortInfo> ports_;
    std::vector<size_t> port_element_;         // port index -> elements_ index
    int couple_a_ = -1;
    int couple_b_ = -1;
};

}  // namespace eomsim

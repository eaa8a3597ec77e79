#pragma once

#include <string>
#include <vector>

#include "eomsim/equivcircuit.hpp"

namespace eomsim {

/// One scattering channel: a physical port at one sideband (or baseband for
/// DC bias), or the mechanical noise port. Lower-sideband channels carry the
/// conjugated field amplitude V*(w_c - Omega) and behave as creation
/// channels in the bosonic basis.
struct PortChannel {
    std::string id;        // "m", "<port>:+", "<port>:-", "<port>:0"
    int branch = -1;       // index into TransducerSystem::sidebands(); -1 = mechanical
    int port = -1;         // port index within the branch's network
    double carrier = 0.0;  // rad/s
    int sign = +1;
    bool baseband = false;
    bool mechanical = false;
    double impedance = 0.0;
    double temperature = 0.0;

    double lab_frequency(double big_omega) const {
        return (mechanical || baseband) ? big_omega : carrier + sign * big_omega;
    }
    bool creation() const { return sign < 0; }
};

/// Fixed channel ordering: mechanical first, then electrical ports (each as
/// a +/- pair or a single baseband channel), then optical ports.
std::vector<PortChannel> scattering_channels(const TransducerSystem& sys);

struct ScatteringMatrix {
    double omega = 0.0;  // modulation frequency
    std::vector<PortChannel> channels;
    Eigen::MatrixXcd classical;
    Eigen::MatrixXcd bosonic;
    bool has_bosonic = false;
};

/// Classical voltage-basis scattering matrix at modulation frequency Omega:
/// column j is the response of every outgoing channel to a unit incoming
/// amplitude on channel j.
ScatteringMatrix classical_smatrix(const TransducerSystem& sys, double big_omega);

/// Fill the bosonic (annihilation/creation basis) matrix by the zero-point
/// rescale S_b[i,j] = S_c[i,j] sqrt(w_j Z_j / (w_i Z_i)) with lab-frame
/// frequencies. Throws NonPositiveLabFrequencyError if a lab frequency is
/// not positive.
void bosonic_smatrix(ScatteringMatrix& sm);

/// Convenience: classical + bosonic in one call.
ScatteringMatrix smatrix(const TransducerSystem& sys, double big_omega);

/// Index of a channel id; throws Error if absent.
size_t channel_index(const std::vector<PortChannel>& channels, const std::string& id);

}  // namespace eomsim

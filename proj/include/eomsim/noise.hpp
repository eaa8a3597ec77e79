#pragma once

#include <string>
#include <vector>

#include "eomsim/scattering.hpp"

namespace eomsim {

/// Thermal occupation n(w) = 1/(exp(hbar w / kB T) - 1); returns 0 at T = 0
/// without evaluating the exponential.
double bose_einstein(double omega, double temperature);

/// Per-channel thermal occupations at the channel lab frequencies. Upper and
/// lower sidebands of the same port generally differ.
std::vector<double> thermal_occupations(const ScatteringMatrix& sm);

struct HomodynePair {
    size_t upper;
    size_t lower;
};

/// Locate the (carrier+Omega, carrier-Omega) channel pair of a port. Throws
/// UnpairedChannelsError if the port has no sideband pair (e.g. DC bias).
HomodynePair find_readout_pair(const std::vector<PortChannel>& channels,
                               const std::string& port_id);

/// Homodyne power spectral density of X_theta built from the two readout
/// channels, with all reservoirs thermal. Normalized so that an identity
/// scattering matrix with vacuum inputs gives exactly 1 (shot noise).
double homodyne_spectrum_value(const ScatteringMatrix& sm, HomodynePair pair,
                               double theta);

struct TransferNoise {
    double eta;          // |S_b[out,in]|^2
    double added_noise;  // quanta s^-1 Hz^-1 referenced to the input; NaN if
                         // eta is below 1e-30 (zero-transfer channel)
};

/// Signal transfer efficiency and added input-referenced noise flux for a
/// designated (input, output) channel pair; the signal input is excluded
/// from the noise sum, creation channels contribute (n+1), annihilation
/// channels contribute n.
TransferNoise transfer_and_noise(const ScatteringMatrix& sm, size_t in_channel,
                                 size_t out_channel);

}  // namespace eomsim

#include "eomsim/noise.hpp"

#include <cmath>
#include <limits>

#include "eomsim/errors.hpp"

namespace eomsim {

double bose_einstein(double omega, double temperature) {
    if (temperature <= 0.0) return 0.0;
    double x = consts::hbar * omega / (consts::k_B * temperature);
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

std::vector<double> thermal_occupations(const ScatteringMatrix& sm) {
    std::vector<double> n(sm.channels.size());
    for (size_t k = 0; k < n.size(); ++k) {
        n[k] = bose_einstein(std::abs(sm.channels[k].lab_frequency(sm.omega)),
                             sm.channels[k].temperature);
    }
    return n;
}

HomodynePair find_readout_pair(const std::vector<PortChannel>& channels,
                               const std::string& port_id) {
    size_t upper = channels.size(), lower = channels.size();
    for (size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].id == port_id + ":+") upper = i;
        if (channels[i].id == port_id + ":-") lower = i;
    }
    if (upper == channels.size() || lower == channels.size()) {
        throw UnpairedChannelsError(
            "port '" + port_id +
            "' does not carry an upper/lower sideband pair; homodyne readout "
            "requires an AC carrier");
    }
    if (channels[upper].carrier != channels[lower].carrier) {
        throw UnpairedChannelsError("sideband channels of port '" + port_id +
                                    "' have mismatched carriers");
    }
    return {upper, lower};
}

double homodyne_spectrum_value(const ScatteringMatrix& sm, HomodynePair pair,
                               double theta) {
    const auto& chs = sm.channels;
    if (pair.upper >= chs.size() || pair.lower >= chs.size() ||
        chs[pair.upper].sign <= 0 || chs[pair.lower].sign >= 0) {
        throw UnpairedChannelsError("homodyne readout channels are not an "
                                    "upper/lower sideband pair");
    }
    const Eigen::MatrixXcd& s = sm.bosonic;
    std::vector<double> n = thermal_occupations(sm);

    // X_theta = [e^{-i theta} b_out(w_d+W) + e^{i theta} b_out^dag(w_d-W)]/2 + h.c.
    // With thermal (phase-insensitive) inputs the anomalous second moments
    // vanish and S_raw = sum_k |alpha_k|^2 (2 n_k + 1); the vacuum value of
    // the same estimator is 1/2, which sets the shot-noise normalization.
    cplx eim = std::exp(-im_unit * theta);
    cplx eip = std::exp(im_unit * theta);
    double s_raw = 0.0;
    for (size_t k = 0; k < chs.size(); ++k) {
        cplx alpha =
            0.5 * (eim * s(static_cast<Eigen::Index>(pair.upper), static_cast<Eigen::Index>(k)) +
                   eip * s(static_cast<Eigen::Index>(pair.lower), static_cast<Eigen::Index>(k)));
        s_raw += std::norm(alpha) * (2.0 * n[k] + 1.0);
    }
    return s_raw / 0.5;
}

TransferNoise transfer_and_noise(const ScatteringMatrix& sm, size_t in_channel,
                                 size_t out_channel) {
    const Eigen::MatrixXcd& s = sm.bosonic;
    std::vector<double> n = thermal_occupations(sm);

    double eta = std::norm(s(static_cast<Eigen::Index>(out_channel),
                             static_cast<Eigen::Index>(in_channel)));
    if (eta < 1e-30) {
        return {eta, std::numeric_limits<double>::quiet_NaN()};
    }
    double flux = 0.0;
    for (size_t k = 0; k < sm.channels.size(); ++k) {
        if (k == in_channel) continue;  // the signal itself is not noise
        double weight = sm.channels[k].creation() ? n[k] + 1.0 : n[k];
        flux += std::norm(s(static_cast<Eigen::Index>(out_channel),
                            static_cast<Eigen::Index>(k))) *
                weight;
    }
    return {eta, flux / eta};
}

}  // namespace eomsim

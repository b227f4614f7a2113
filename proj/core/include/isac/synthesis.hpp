#ifndef ISAC_SYNTHESIS_HPP
#define ISAC_SYNTHESIS_HPP

#include <cstdint>
#include <string>

#include "isac/dataset.hpp"
#include "isac/emulation.hpp"

namespace isac {

struct SweepParams {
    double carrier_hz = 3.5e9;
    double bandwidth_hz = 40e6;
    std::size_t n_freq = 251;
};

// Switched-monostatic acquisition over the compiled chain: for port k, time
// step i and baseband offset f' in [-B/2, +B/2],
//   H_k(t_i, f_j) = sum_n w_tx[k,n] * w_rx[k,n] * cir[n][i].gain
//                          * exp(j*2*pi*f'_j*cir[n][i].delay).
// Both weights apply on the same port: the rig transmits and receives on one
// antenna at a time. The record gain already carries the stepped Doppler
// phasor. Tensor axes: [time_s, frequency_hz, port].
CfrDataset synthesize_cfr_adtr(const ApmConfig& apm, const std::vector<RtsUnitConfig>& units,
                               const SweepParams& sweep, std::string metadata_json = {});

// Full Tx/Rx cross acquisition for the split array (static, single time step):
//   H(k_R, k_T, f_j) = sum_n w_tx[tx_k_T,n] * w_rx[rx_k_R,n] * cir[n][0].gain
//                            * exp(j*2*pi*f'_j*cir[n][0].delay).
// Tensor axes: [rx_port, tx_port, frequency_hz].
CfrDataset synthesize_cfr_satr(const ApmConfig& apm, const std::vector<RtsUnitConfig>& units,
                               const SweepParams& sweep, std::string metadata_json = {});

// Adds complex white Gaussian noise at the given SNR relative to the mean
// sample power of the tensor. Deterministic for a fixed seed.
void add_complex_awgn(CfrDataset& d, double snr_db, std::uint64_t seed);

} // namespace isac

#endif
